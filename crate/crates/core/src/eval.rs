//! Direct, enumeration-based semantics of formulas over finite histories and
//! abstract executions. This is the oracle the word/automata pipeline is
//! validated against: first-order quantifiers range over operations,
//! second-order quantifiers enumerate all subsets.

use crate::history::{AbstractExecution, History, OpId, OpType, OpVal, Time};
use crate::logic::{Atom, Attr, Formula, FiniteArg, FoVar, SoVar, Term, TimeAttr};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

/// Default cap on the operation count for second-order enumeration
/// (2^16 subsets per quantifier).
pub const DEFAULT_SO_CAP: usize = 16;

/// The model a formula is evaluated against.
#[derive(Debug, Clone, Copy)]
pub enum ModelRef<'a> {
    History(&'a History),
    Exec(&'a AbstractExecution),
}

impl<'a> ModelRef<'a> {
    pub fn history(&self) -> &'a History {
        match self {
            ModelRef::History(h) => h,
            ModelRef::Exec(x) => &x.history,
        }
    }

    fn vis(&self, a: usize, b: usize) -> Result<bool, EvalError> {
        match self {
            ModelRef::History(_) => Err(EvalError::ExecRelationOnHistory),
            ModelRef::Exec(x) => Ok(x.vis.contains(&(a, b))),
        }
    }

    fn ar(&self, a: usize, b: usize) -> Result<bool, EvalError> {
        match self {
            ModelRef::History(_) => Err(EvalError::ExecRelationOnHistory),
            ModelRef::Exec(x) => Ok(x.ar.contains(&(a, b))),
        }
    }
}

impl<'a> From<&'a History> for ModelRef<'a> {
    fn from(h: &'a History) -> Self {
        ModelRef::History(h)
    }
}

impl<'a> From<&'a AbstractExecution> for ModelRef<'a> {
    fn from(x: &'a AbstractExecution) -> Self {
        ModelRef::Exec(x)
    }
}

/// Variable assignment: operations for first-order variables, operation sets
/// (as bitmasks) for second-order ones.
#[derive(Debug, Clone, Default)]
pub struct Assignment {
    pub fo: HashMap<FoVar, usize>,
    pub so: HashMap<SoVar, u64>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("visibility/arbitration atom evaluated against a bare history")]
    ExecRelationOnHistory,
    #[error("unknown {0} literal `{1}`")]
    UnknownLiteral(&'static str, String),
    #[error("{ops} operations exceed the second-order enumeration cap of {cap}")]
    TooManyOps { ops: usize, cap: usize },
    #[error("formula is not closed (free: {0})")]
    NotClosed(String),
}

/// Evaluates `f` under `asg`. Free variables of `f` must be bound by `asg`.
pub fn eval(model: ModelRef, asg: &Assignment, f: &Formula) -> Result<bool, EvalError> {
    eval_with_cap(model, asg, f, DEFAULT_SO_CAP)
}

pub fn eval_with_cap(
    model: ModelRef,
    asg: &Assignment,
    f: &Formula,
    so_cap: usize,
) -> Result<bool, EvalError> {
    let (fo, so) = f.free_variables();
    for v in &fo {
        if !asg.fo.contains_key(v) {
            return Err(EvalError::Unbound(v.0.clone()));
        }
    }
    for v in &so {
        if !asg.so.contains_key(v) {
            return Err(EvalError::Unbound(v.0.clone()));
        }
    }
    if f.uses_exec_relations() && matches!(model, ModelRef::History(_)) {
        return Err(EvalError::ExecRelationOnHistory);
    }
    let mut asg = asg.clone();
    ev(model, &mut asg, f, so_cap)
}

/// Evaluates a closed formula.
pub fn check_model(model: ModelRef, f: &Formula) -> Result<bool, EvalError> {
    check_model_with_cap(model, f, DEFAULT_SO_CAP)
}

pub fn check_model_with_cap(
    model: ModelRef,
    f: &Formula,
    so_cap: usize,
) -> Result<bool, EvalError> {
    let (fo, so) = f.free_variables();
    if !fo.is_empty() || !so.is_empty() {
        let names: Vec<String> = fo
            .iter()
            .map(|v| v.0.clone())
            .chain(so.iter().map(|v| v.0.clone()))
            .collect();
        return Err(EvalError::NotClosed(names.join(", ")));
    }
    eval_with_cap(model, &Assignment::default(), f, so_cap)
}

fn ev(model: ModelRef, asg: &mut Assignment, f: &Formula, cap: usize) -> Result<bool, EvalError> {
    match f {
        Formula::Atom(a) => eval_atom(model, asg, a),
        Formula::Or(p, q) => Ok(ev(model, asg, p, cap)? || ev(model, asg, q, cap)?),
        Formula::Not(p) => Ok(!ev(model, asg, p, cap)?),
        Formula::ForallFo(v, p) => {
            let n = model.history().len();
            let old = asg.fo.remove(v);
            let mut result = true;
            for ix in 0..n {
                asg.fo.insert(v.clone(), ix);
                if !ev(model, asg, p, cap)? {
                    result = false;
                    break;
                }
            }
            restore_fo(asg, v, old);
            Ok(result)
        }
        Formula::ForallSo(v, p) => {
            let n = model.history().len();
            if n > cap {
                return Err(EvalError::TooManyOps { ops: n, cap });
            }
            let old = asg.so.remove(v);
            let mut result = true;
            for mask in 0..(1u64 << n) {
                asg.so.insert(v.clone(), mask);
                if !ev(model, asg, p, cap)? {
                    result = false;
                    break;
                }
            }
            restore_so(asg, v, old);
            Ok(result)
        }
        // Every subset of a finite model is finite.
        Formula::Finite(FiniteArg::SetVar(_)) => Ok(true),
        Formula::Finite(FiniteArg::Comprehension(_, _)) => Ok(true),
        Formula::LastWrite(val_of, ctxt_of) => {
            let h = model.history();
            let a = lookup_fo(asg, val_of)?;
            let c = lookup_fo(asg, ctxt_of)?;
            let v = h.op(a).oval;
            let ctxt: Vec<usize> = (0..h.len())
                .map(|b| {
                    Ok::<_, EvalError>(
                        model.vis(b, c)?
                            && h.op(b).kind == OpType::Write
                            && h.op(b).obj == h.op(c).obj,
                    )
                })
                .collect::<Result<Vec<bool>, _>>()?
                .into_iter()
                .enumerate()
                .filter_map(|(ix, keep)| keep.then_some(ix))
                .collect();
            for &b in &ctxt {
                if h.op(b).ival != v && !ctxt.iter().any(|&d| model.ar(b, d).unwrap_or(false)) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

fn restore_fo(asg: &mut Assignment, v: &FoVar, old: Option<usize>) {
    match old {
        Some(ix) => {
            asg.fo.insert(v.clone(), ix);
        }
        None => {
            asg.fo.remove(v);
        }
    }
}

fn restore_so(asg: &mut Assignment, v: &SoVar, old: Option<u64>) {
    match old {
        Some(m) => {
            asg.so.insert(v.clone(), m);
        }
        None => {
            asg.so.remove(v);
        }
    }
}

fn lookup_fo(asg: &Assignment, v: &FoVar) -> Result<usize, EvalError> {
    asg.fo
        .get(v)
        .copied()
        .ok_or_else(|| EvalError::Unbound(v.0.clone()))
}

fn time_of(h: &History, ix: usize, attr: TimeAttr) -> Time {
    match attr {
        TimeAttr::STime => h.op(ix).stime,
        TimeAttr::RTime => h.op(ix).rtime,
    }
}

fn term_time(h: &History, asg: &Assignment, t: &Term) -> Result<Time, EvalError> {
    Ok(time_of(h, lookup_fo(asg, &t.var)?, t.attr))
}

fn eval_atom(model: ModelRef, asg: &Assignment, atom: &Atom) -> Result<bool, EvalError> {
    let h = model.history();
    match atom {
        Atom::AttrEq(a, x, b, y) => {
            let (a, b) = (lookup_fo(asg, a)?, lookup_fo(asg, b)?);
            let oa = h.op(a);
            let ob = h.op(b);
            Ok(match (x, y) {
                (Attr::STime | Attr::RTime, Attr::STime | Attr::RTime) => {
                    let ta = time_of(h, a, time_attr(*x));
                    let tb = time_of(h, b, time_attr(*y));
                    ta == tb
                }
                (Attr::IVal | Attr::OVal, Attr::IVal | Attr::OVal) => {
                    val_of(oa, *x) == val_of(ob, *y)
                }
                (Attr::Proc, Attr::Proc) => oa.proc == ob.proc,
                (Attr::Obj, Attr::Obj) => oa.obj == ob.obj,
                (Attr::Type, Attr::Type) => oa.kind == ob.kind,
                _ => unreachable!("ill-kinded comparison survived construction"),
            })
        }
        Atom::TimeLt(s, t) => Ok(term_time(h, asg, s)? < term_time(h, asg, t)?),
        Atom::TimeLe(s, t) => Ok(term_time(h, asg, s)? <= term_time(h, asg, t)?),
        Atom::ProcIs(a, p) => {
            let ix = lookup_fo(asg, a)?;
            let pid = h
                .meta()
                .proc_id(p)
                .ok_or_else(|| EvalError::UnknownLiteral("process", p.clone()))?;
            Ok(h.op(ix).proc == pid)
        }
        Atom::ObjIs(a, o) => {
            let ix = lookup_fo(asg, a)?;
            let oid = h
                .meta()
                .obj_id(o)
                .ok_or_else(|| EvalError::UnknownLiteral("object", o.clone()))?;
            Ok(h.op(ix).obj == oid)
        }
        Atom::TypeIs(a, t) => Ok(h.op(lookup_fo(asg, a)?).kind == *t),
        Atom::IvalEmpty(a) => Ok(h.op(lookup_fo(asg, a)?).ival == OpVal::Empty),
        Atom::OvalEmpty(a) => Ok(h.op(lookup_fo(asg, a)?).oval == OpVal::Empty),
        Atom::OvalUndef(a) => Ok(h.op(lookup_fo(asg, a)?).oval == OpVal::Undef),
        Atom::ValEq(a, w, name) => {
            let ix = lookup_fo(asg, a)?;
            let vid = h
                .meta()
                .val_id(name)
                .ok_or_else(|| EvalError::UnknownLiteral("value", name.clone()))?;
            let actual = match w {
                crate::logic::ValAttr::IVal => h.op(ix).ival,
                crate::logic::ValAttr::OVal => h.op(ix).oval,
            };
            Ok(actual == OpVal::Val(vid))
        }
        Atom::InSet(a, s) => {
            let ix = lookup_fo(asg, a)?;
            let mask = asg
                .so
                .get(s)
                .copied()
                .ok_or_else(|| EvalError::Unbound(s.0.clone()))?;
            Ok(mask >> ix & 1 == 1)
        }
        Atom::Vis(a, b) => model.vis(lookup_fo(asg, a)?, lookup_fo(asg, b)?),
        Atom::Ar(a, b) => model.ar(lookup_fo(asg, a)?, lookup_fo(asg, b)?),
        Atom::Rb(a, b) => Ok(h.rb(lookup_fo(asg, a)?, lookup_fo(asg, b)?)),
        Atom::Ss(a, b) => Ok(h.same_session(lookup_fo(asg, a)?, lookup_fo(asg, b)?)),
        Atom::So(a, b) => Ok(h.session_order(lookup_fo(asg, a)?, lookup_fo(asg, b)?)),
        Atom::Sorr(a, b) => {
            let (a, b) = (lookup_fo(asg, a)?, lookup_fo(asg, b)?);
            Ok(h.op(a).kind == OpType::Read
                && h.op(b).kind == OpType::Read
                && h.session_order(a, b))
        }
        Atom::DirectSuccOn(a, b, p) => {
            let (a, b) = (lookup_fo(asg, a)?, lookup_fo(asg, b)?);
            let pid = h
                .meta()
                .proc_id(p)
                .ok_or_else(|| EvalError::UnknownLiteral("process", p.clone()))?;
            Ok(h.direct_successor_on(a, pid) == Some(b))
        }
        Atom::InCtxt(b, a) => {
            let (b, a) = (lookup_fo(asg, b)?, lookup_fo(asg, a)?);
            Ok(model.vis(b, a)? && h.op(b).kind == OpType::Write && h.op(b).obj == h.op(a).obj)
        }
    }
}

fn time_attr(a: Attr) -> TimeAttr {
    match a {
        Attr::STime => TimeAttr::STime,
        Attr::RTime => TimeAttr::RTime,
        _ => unreachable!(),
    }
}

fn val_of(op: &crate::history::Operation, a: Attr) -> OpVal {
    match a {
        Attr::IVal => op.ival,
        Attr::OVal => op.oval,
        _ => unreachable!(),
    }
}

/// If the formula is a chain of outermost universals, enumerate their
/// instantiations and return the first falsifying one as `var -> op id`.
/// Returns `None` when the formula holds, `Some(map)` with the witness
/// otherwise (the map is empty when the root is not a universal).
pub fn falsify_outer_universals(
    model: ModelRef,
    f: &Formula,
    so_cap: usize,
) -> Result<Option<BTreeMap<String, OpId>>, EvalError> {
    let mut vars = Vec::new();
    let mut body = f;
    while let Formula::ForallFo(v, p) = body {
        vars.push(v.clone());
        body = p;
    }
    if vars.is_empty() {
        return Ok(if check_model_with_cap(model, f, so_cap)? {
            None
        } else {
            Some(BTreeMap::new())
        });
    }
    let n = model.history().len();
    if n == 0 {
        return Ok(None);
    }
    let mut counters = vec![0usize; vars.len()];
    loop {
        let mut asg = Assignment::default();
        for (v, &ix) in vars.iter().zip(&counters) {
            asg.fo.insert(v.clone(), ix);
        }
        if !eval_with_cap(model, &asg, body, so_cap)? {
            let mut witness = BTreeMap::new();
            for (v, &ix) in vars.iter().zip(&counters) {
                witness.insert(v.0.clone(), model.history().op(ix).id.clone());
            }
            return Ok(Some(witness));
        }
        // Next tuple.
        let mut i = vars.len();
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            counters[i] += 1;
            if counters[i] < n {
                break;
            }
            counters[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{expand_macros, parse_formula};
    use crate::testutil::{exec_with_stime_ar, fig1, op};
    use crate::{History, MetaParams};
    use std::collections::BTreeSet;

    fn check(model: ModelRef, src: &str) -> bool {
        check_model(model, &parse_formula(src).unwrap()).unwrap()
    }

    #[test]
    fn sessions_are_totally_ordered_on_fig1() {
        let h = fig1();
        assert!(check(
            (&h).into(),
            "forall1 a. forall1 b. (ss(a,b) & !(a.stime = b.stime)) => (rb(a,b) | rb(b,a))"
        ));
    }

    #[test]
    fn truth_constants() {
        let h = fig1();
        assert!(check((&h).into(), "true"));
        assert!(!check((&h).into(), "false"));
        let empty = History::new(MetaParams::canonical(1, 1, 1), vec![]).unwrap();
        assert!(!check((&empty).into(), "exists1 a. true"));
        assert!(check((&empty).into(), "forall1 a. false"));
    }

    #[test]
    fn ops_start_after_zero_on_fig1() {
        let h = fig1();
        assert!(check(
            (&h).into(),
            "forall1 a. forall1 b. a.stime < a.rtime"
        ));
    }

    #[test]
    fn two_op_realtime_truth_table() {
        let meta = MetaParams::canonical(2, 1, 1);
        let a = op("a", 0, 1, 2, OpType::Write, 0, Some(0), None);
        let b = op("b", 1, 3, 4, OpType::Write, 0, Some(0), None);
        let h = History::new(meta, vec![a, b]).unwrap();
        let realtime = parse_formula("forall1 a. forall1 b. rb(a,b) => ar(a,b)").unwrap();

        let good = AbstractExecution::new(
            h.clone(),
            BTreeSet::new(),
            [(0usize, 1usize)].into_iter().collect(),
        )
        .unwrap();
        assert!(check_model((&good).into(), &realtime).unwrap());

        let bad = AbstractExecution::new(
            h,
            BTreeSet::new(),
            [(1usize, 0usize)].into_iter().collect(),
        )
        .unwrap();
        assert!(!check_model((&bad).into(), &realtime).unwrap());
    }

    #[test]
    fn exec_atom_on_history_is_an_error() {
        let h = fig1();
        let f = parse_formula("forall1 a. forall1 b. vis(a,b) => ar(a,b)").unwrap();
        assert_eq!(
            check_model((&h).into(), &f),
            Err(EvalError::ExecRelationOnHistory)
        );
    }

    #[test]
    fn open_formula_is_rejected_by_check_model() {
        let h = fig1();
        let f = parse_formula("a.stime < a.rtime").unwrap();
        assert!(matches!(check_model((&h).into(), &f), Err(EvalError::NotClosed(_))));
    }

    #[test]
    fn macro_soundness_on_samples() {
        use crate::logic::random::{random_closed_formula, SamplerCfg};
        use rand::SeedableRng;
        let h = fig1();
        let x = exec_with_stime_ar(h.clone());
        let cfg = SamplerCfg {
            exec_atoms: true,
            ..Default::default()
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let f = random_closed_formula(&mut rng, h.meta(), &cfg);
            let expanded = expand_macros(&f);
            let direct = check_model((&x).into(), &f).unwrap();
            let via_core = check_model((&x).into(), &expanded).unwrap();
            assert_eq!(direct, via_core, "macro expansion changed meaning of {f:?}");
        }
    }

    #[test]
    fn demorgan_duality() {
        use crate::logic::random::{random_closed_formula, SamplerCfg};
        use crate::logic::Formula;
        use rand::SeedableRng;
        let h = fig1();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let cfg = SamplerCfg::default();
        for _ in 0..40 {
            let body = random_closed_formula(&mut rng, h.meta(), &cfg);
            // ¬∀a.φ ≡ ∃a.¬φ with φ any closed formula (a unused is fine).
            let lhs = Formula::not(Formula::forall_fo("zz", body.clone()));
            let rhs = Formula::exists_fo("zz", Formula::not(body));
            assert_eq!(
                check_model((&h).into(), &lhs).unwrap(),
                check_model((&h).into(), &rhs).unwrap()
            );
        }
    }

    #[test]
    fn evaluation_is_insertion_order_independent() {
        use crate::logic::random::{random_closed_formula, SamplerCfg};
        use rand::SeedableRng;
        let h = fig1();
        let mut shuffled_ops: Vec<_> = h.ops().to_vec();
        shuffled_ops.reverse();
        let h2 = History::new(h.meta().clone(), shuffled_ops).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let cfg = SamplerCfg::default();
        for _ in 0..40 {
            let f = random_closed_formula(&mut rng, h.meta(), &cfg);
            assert_eq!(
                check_model((&h).into(), &f).unwrap(),
                check_model((&h2).into(), &f).unwrap(),
                "operation order changed the verdict of {f:?}"
            );
        }
    }

    #[test]
    fn alpha_renaming_preserves_meaning() {
        use crate::logic::random::{random_closed_formula, SamplerCfg};
        use crate::logic::alpha_normalize;
        use rand::SeedableRng;
        let h = fig1();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let cfg = SamplerCfg::default();
        for _ in 0..20 {
            let f = random_closed_formula(&mut rng, h.meta(), &cfg);
            let renamed = alpha_normalize(&f);
            assert_eq!(
                check_model((&h).into(), &f).unwrap(),
                check_model((&h).into(), &renamed).unwrap()
            );
        }
    }

    #[test]
    fn so_cap_is_enforced() {
        let h = fig1();
        let f = parse_formula("forall2 X. exists1 a. a in X | true").unwrap();
        assert!(matches!(
            check_model_with_cap((&h).into(), &f, 3),
            Err(EvalError::TooManyOps { .. })
        ));
    }
}
