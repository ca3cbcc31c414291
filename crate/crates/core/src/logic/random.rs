//! Seeded random formula sampler for the cross-engine property suites.

use super::*;
use crate::history::MetaParams;
use crate::history::OpType;
use rand::prelude::*;

#[derive(Debug, Clone)]
pub struct SamplerCfg {
    /// Bound on quantifier nesting.
    pub max_quant_depth: usize,
    /// Rough bound on formula size in nodes.
    pub size_budget: usize,
    /// Allow `vis`/`ar` and the macros built on them.
    pub exec_atoms: bool,
    /// Allow relation macros (`rb`, `so`, `finite`, ...).
    pub macro_atoms: bool,
}

impl Default for SamplerCfg {
    fn default() -> Self {
        SamplerCfg {
            max_quant_depth: 4,
            size_budget: 24,
            exec_atoms: false,
            macro_atoms: true,
        }
    }
}

/// Draws a closed formula whose literals are taken from `meta`.
pub fn random_closed_formula<R: Rng>(rng: &mut R, meta: &MetaParams, cfg: &SamplerCfg) -> Formula {
    let mut st = Sampler {
        rng,
        meta,
        cfg,
        next_var: 0,
    };
    let mut budget = cfg.size_budget;
    st.formula(&mut budget, cfg.max_quant_depth, &mut Vec::new(), &mut Vec::new())
}

struct Sampler<'a, R: Rng> {
    rng: &'a mut R,
    meta: &'a MetaParams,
    cfg: &'a SamplerCfg,
    next_var: usize,
}

impl<R: Rng> Sampler<'_, R> {
    fn fresh_fo(&mut self) -> FoVar {
        let v = FoVar(format!("q{}", self.next_var));
        self.next_var += 1;
        v
    }

    fn fresh_so(&mut self) -> SoVar {
        let v = SoVar(format!("Q{}", self.next_var));
        self.next_var += 1;
        v
    }

    fn formula(
        &mut self,
        budget: &mut usize,
        qdepth: usize,
        fo: &mut Vec<FoVar>,
        so: &mut Vec<SoVar>,
    ) -> Formula {
        *budget = budget.saturating_sub(1);
        // Without variables in scope only quantifiers or constants make sense.
        if fo.is_empty() {
            if qdepth == 0 || *budget == 0 {
                return if self.rng.gen_bool(0.5) {
                    Formula::tt()
                } else {
                    Formula::ff()
                };
            }
            return self.quantifier(budget, qdepth, fo, so);
        }
        if *budget == 0 {
            return self.atom(fo, so);
        }
        let roll: f64 = self.rng.gen();
        if roll < 0.40 {
            self.atom(fo, so)
        } else if roll < 0.50 {
            Formula::not(self.formula(budget, qdepth, fo, so))
        } else if roll < 0.75 || qdepth == 0 {
            let p = self.formula(budget, qdepth, fo, so);
            let q = self.formula(budget, qdepth, fo, so);
            match self.rng.gen_range(0..3) {
                0 => Formula::or(p, q),
                1 => Formula::and(p, q),
                _ => Formula::implies(p, q),
            }
        } else {
            self.quantifier(budget, qdepth, fo, so)
        }
    }

    fn quantifier(
        &mut self,
        budget: &mut usize,
        qdepth: usize,
        fo: &mut Vec<FoVar>,
        so: &mut Vec<SoVar>,
    ) -> Formula {
        let second_order = self.rng.gen_bool(0.2);
        let universal = self.rng.gen_bool(0.5);
        if second_order {
            let v = self.fresh_so();
            so.push(v.clone());
            let body = self.formula(budget, qdepth - 1, fo, so);
            so.pop();
            if universal {
                Formula::ForallSo(v, Box::new(body))
            } else {
                Formula::exists_so(v.0, body)
            }
        } else {
            let v = self.fresh_fo();
            fo.push(v.clone());
            let body = self.formula(budget, qdepth - 1, fo, so);
            fo.pop();
            if universal {
                Formula::ForallFo(v, Box::new(body))
            } else {
                Formula::exists_fo(v.0, body)
            }
        }
    }

    fn pick_fo(&mut self, fo: &[FoVar]) -> FoVar {
        fo[self.rng.gen_range(0..fo.len())].clone()
    }

    fn pick_time_attr(&mut self) -> TimeAttr {
        if self.rng.gen_bool(0.5) {
            TimeAttr::STime
        } else {
            TimeAttr::RTime
        }
    }

    fn atom(&mut self, fo: &[FoVar], so: &[SoVar]) -> Formula {
        let a = self.pick_fo(fo);
        let b = self.pick_fo(fo);
        let mut kinds: Vec<u32> = vec![0, 1, 2, 3, 4, 5, 6, 7, 8];
        if !so.is_empty() {
            kinds.push(9);
        }
        if self.cfg.macro_atoms {
            kinds.extend([10, 11, 12, 13]);
        }
        if self.cfg.exec_atoms {
            kinds.extend([14, 15]);
            if self.cfg.macro_atoms {
                kinds.push(16);
            }
        }
        let kind = kinds[self.rng.gen_range(0..kinds.len())];
        let atom = match kind {
            0 => Atom::TimeLt(
                Term {
                    var: a,
                    attr: self.pick_time_attr(),
                },
                Term {
                    var: b,
                    attr: self.pick_time_attr(),
                },
            ),
            1 => {
                let pairs: &[(Attr, Attr)] = &[
                    (Attr::STime, Attr::STime),
                    (Attr::STime, Attr::RTime),
                    (Attr::RTime, Attr::RTime),
                    (Attr::IVal, Attr::IVal),
                    (Attr::IVal, Attr::OVal),
                    (Attr::OVal, Attr::OVal),
                    (Attr::Proc, Attr::Proc),
                    (Attr::Obj, Attr::Obj),
                    (Attr::Type, Attr::Type),
                ];
                let (x, y) = pairs[self.rng.gen_range(0..pairs.len())];
                Atom::AttrEq(a, x, b, y)
            }
            2 => {
                let p = &self.meta.processes[self.rng.gen_range(0..self.meta.processes.len())];
                Atom::ProcIs(a, p.clone())
            }
            3 => {
                let o = &self.meta.objects[self.rng.gen_range(0..self.meta.objects.len())];
                Atom::ObjIs(a, o.clone())
            }
            4 => Atom::TypeIs(
                a,
                if self.rng.gen_bool(0.5) {
                    OpType::Read
                } else {
                    OpType::Write
                },
            ),
            5 => Atom::IvalEmpty(a),
            6 => Atom::OvalEmpty(a),
            7 => Atom::OvalUndef(a),
            8 => {
                let v = &self.meta.values[self.rng.gen_range(0..self.meta.values.len())];
                let w = if self.rng.gen_bool(0.5) {
                    ValAttr::IVal
                } else {
                    ValAttr::OVal
                };
                Atom::ValEq(a, w, v.clone())
            }
            9 => {
                let s = so[self.rng.gen_range(0..so.len())].clone();
                Atom::InSet(a, s)
            }
            10 => Atom::Rb(a, b),
            11 => Atom::Ss(a, b),
            12 => Atom::So(a, b),
            13 => Atom::Sorr(a, b),
            14 => Atom::Vis(a, b),
            15 => Atom::Ar(a, b),
            _ => Atom::InCtxt(a, b),
        };
        Formula::Atom(atom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_formulas_are_closed_and_deterministic() {
        let meta = MetaParams::canonical(3, 2, 2);
        let cfg = SamplerCfg::default();
        let mut rng1 = ChaCha8Rng::seed_from_u64(42);
        let mut rng2 = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let f = random_closed_formula(&mut rng1, &meta, &cfg);
            let g = random_closed_formula(&mut rng2, &meta, &cfg);
            assert_eq!(f, g);
            assert!(f.is_closed(), "not closed: {f:?}");
        }
    }

    #[test]
    fn exec_atoms_only_when_enabled() {
        let meta = MetaParams::canonical(2, 1, 2);
        let cfg = SamplerCfg {
            exec_atoms: false,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let f = random_closed_formula(&mut rng, &meta, &cfg);
            assert!(!f.uses_exec_relations());
        }
    }
}
