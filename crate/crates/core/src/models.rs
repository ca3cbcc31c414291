//! Catalog of consistency models as closed formulas, plus the direct
//! (evaluator-backed) checking path.
//!
//! Only models whose definitions are fully pinned ship as builtins; further
//! models can be supplied as formula files (see [`parse_model_file`]).

use crate::eval::{falsify_outer_universals, EvalError, ModelRef, DEFAULT_SO_CAP};
use crate::logic::{parse_formula, Formula, ParseError};
use crate::OpId;
use std::collections::BTreeMap;
use thiserror::Error;

/// A named consistency model.
#[derive(Debug, Clone)]
pub struct ModelDef {
    pub name: String,
    pub formula: Formula,
    /// True iff the formula mentions visibility or arbitration and therefore
    /// needs an abstract execution.
    pub requires_exec: bool,
    pub notes: String,
}

impl ModelDef {
    pub fn new(name: impl Into<String>, formula: Formula, notes: impl Into<String>) -> Self {
        let requires_exec = formula.uses_exec_relations();
        ModelDef {
            name: name.into(),
            formula,
            requires_exec,
            notes: notes.into(),
        }
    }
}

fn p(src: &str) -> Formula {
    parse_formula(src).expect("builtin model must parse")
}

/// The built-in model catalog.
pub fn builtin_models() -> Vec<ModelDef> {
    let rval = p(
        "forall1 a. (a.type = write => a.oval = _) & (a.type = read => lastwrite(a, a))",
    );
    let real_time = p("forall1 a. forall1 b. rb(a,b) => ar(a,b)");
    let single_order = p(
        "exists2 X. (forall1 x. x in X => x.oval = undef) \
         & (forall1 a. forall1 b. (vis(a,b) <=> (ar(a,b) & !(a in X))))",
    );
    let linearizability = Formula::and(
        single_order.clone(),
        Formula::and(real_time.clone(), rval.clone()),
    );
    let quiescent = p(
        "finite{a | a.type = write} => \
         (exists1 a. a.type = read & finite{b | !lastwrite(b, a)})",
    );
    let monotonic_reads =
        p("forall1 a. forall1 b. forall1 c. (vis(a,b) & sorr(b,c)) => vis(a,c)");
    let read_your_writes = p(
        "forall1 a. forall1 b. (a.type = write & b.type = read) => (so(a,b) => vis(a,b))",
    );
    vec![
        ModelDef::new(
            "RVal",
            rval,
            "writes return the empty value; reads return the last visible write under arbitration",
        ),
        ModelDef::new(
            "RealTime",
            real_time,
            "arbitration respects the returns-before order",
        ),
        ModelDef::new(
            "SingleOrder",
            single_order,
            "visibility equals arbitration minus a set of incomplete operations",
        ),
        ModelDef::new(
            "Linearizability",
            linearizability,
            "single order, real time and return-value consistency combined",
        ),
        ModelDef::new(
            "QuiescentConsistency",
            quiescent,
            "once writes stop, all but finitely many operations agree with some read's context",
        ),
        ModelDef::new(
            "MonotonicReads",
            monotonic_reads,
            "later reads of a session see at least what earlier reads saw",
        ),
        ModelDef::new(
            "ReadYourWrites",
            read_your_writes,
            "a session's writes are visible to its later reads",
        ),
    ]
}

pub fn find_model(name: &str) -> Option<ModelDef> {
    builtin_models().into_iter().find(|m| m.name == name)
}

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("line {0}: expected `model NAME := <formula>`")]
    BadHeader(usize),
    #[error("model `{0}`: {1}")]
    BadFormula(String, ParseError),
    #[error("model `{0}` is not closed")]
    NotClosed(String),
}

/// Parses a user model file: one `model NAME := <formula>` per definition,
/// where the formula runs until the next `model` header. `#` starts a
/// comment line.
pub fn parse_model_file(text: &str) -> Result<Vec<ModelDef>, ModelFileError> {
    let mut defs: Vec<(usize, String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("model ") {
            let (name, body) = rest
                .split_once(":=")
                .ok_or(ModelFileError::BadHeader(lineno + 1))?;
            defs.push((lineno + 1, name.trim().to_string(), body.trim().to_string()));
        } else if let Some(last) = defs.last_mut() {
            last.2.push(' ');
            last.2.push_str(trimmed);
        } else {
            return Err(ModelFileError::BadHeader(lineno + 1));
        }
    }
    let mut out = Vec::new();
    for (_, name, src) in defs {
        let formula =
            parse_formula(&src).map_err(|e| ModelFileError::BadFormula(name.clone(), e))?;
        if !formula.is_closed() {
            return Err(ModelFileError::NotClosed(name));
        }
        out.push(ModelDef::new(name, formula, "user-supplied"));
    }
    Ok(out)
}

/// Result of checking one model against one trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// `witness` instantiates the outermost universal variables when the
    /// model's formula is universally rooted.
    Violated {
        witness: Option<BTreeMap<String, OpId>>,
    },
}

/// Direct engine: evaluate the model's formula; on violation enumerate the
/// outermost universals for a witness.
pub fn check_direct(model: ModelRef, def: &ModelDef) -> Result<Verdict, EvalError> {
    check_direct_with_cap(model, def, DEFAULT_SO_CAP)
}

pub fn check_direct_with_cap(
    model: ModelRef,
    def: &ModelDef,
    so_cap: usize,
) -> Result<Verdict, EvalError> {
    match falsify_outer_universals(model, &def.formula, so_cap)? {
        None => Ok(Verdict::Holds),
        Some(witness) if witness.is_empty() => Ok(Verdict::Violated { witness: None }),
        Some(witness) => Ok(Verdict::Violated {
            witness: Some(witness),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::check_model;
    use crate::history::{AbstractExecution, History, MetaParams, OpType};
    use crate::testutil::op;
    use std::collections::BTreeSet;

    /// w(x,v1); r(x)=v1; r(x)=v1 run sequentially on one process with
    /// vis = ar = the start order.
    fn sequential_register(read1: usize, read2: usize) -> AbstractExecution {
        let meta = MetaParams::canonical(1, 1, 2);
        let ops = vec![
            op("w", 0, 1, 2, OpType::Write, 0, Some(0), None),
            op("r1", 0, 3, 4, OpType::Read, 0, None, Some(read1)),
            op("r2", 0, 5, 6, OpType::Read, 0, None, Some(read2)),
        ];
        let h = History::new(meta, ops).unwrap();
        let mut rel = BTreeSet::new();
        for i in 0..3 {
            for j in i + 1..3 {
                rel.insert((i, j));
            }
        }
        AbstractExecution::new(h, rel.clone(), rel).unwrap()
    }

    #[test]
    fn builtins_are_closed_and_tagged() {
        for m in builtin_models() {
            assert!(m.formula.is_closed(), "{} is open", m.name);
            assert_eq!(m.requires_exec, m.formula.uses_exec_relations());
        }
        for name in ["RVal", "RealTime", "SingleOrder", "Linearizability"] {
            assert!(find_model(name).unwrap().requires_exec);
        }
    }

    #[test]
    fn rval_on_sequential_register() {
        let rval = find_model("RVal").unwrap();
        let good = sequential_register(0, 0);
        assert_eq!(check_direct((&good).into(), &rval).unwrap(), Verdict::Holds);
        let bad = sequential_register(1, 0);
        assert!(matches!(
            check_direct((&bad).into(), &rval).unwrap(),
            Verdict::Violated { .. }
        ));
    }

    #[test]
    fn linearizability_on_sequential_register() {
        let lin = find_model("Linearizability").unwrap();
        let x = sequential_register(0, 0);
        assert_eq!(check_direct((&x).into(), &lin).unwrap(), Verdict::Holds);
    }

    #[test]
    fn empty_execution_satisfies_universal_models() {
        let h = History::new(MetaParams::canonical(1, 1, 1), vec![]).unwrap();
        let x = AbstractExecution::new(h, BTreeSet::new(), BTreeSet::new()).unwrap();
        for name in ["RVal", "RealTime", "MonotonicReads", "ReadYourWrites"] {
            let m = find_model(name).unwrap();
            assert_eq!(
                check_direct((&x).into(), &m).unwrap(),
                Verdict::Holds,
                "{name} should hold vacuously"
            );
        }
    }

    /// p1 writes v1 then v2; p2 reads v2 then v1. The first read saw both
    /// writes, the second only the first write.
    fn monotonic_reads_counterexample() -> AbstractExecution {
        let meta = MetaParams::canonical(2, 1, 2);
        let ops = vec![
            op("w1", 0, 1, 2, OpType::Write, 0, Some(0), None),
            op("w2", 0, 3, 4, OpType::Write, 0, Some(1), None),
            op("r1", 1, 5, 6, OpType::Read, 0, None, Some(1)),
            op("r2", 1, 7, 8, OpType::Read, 0, None, Some(0)),
        ];
        let h = History::new(meta, ops).unwrap();
        let mut ar = BTreeSet::new();
        for i in 0..4 {
            for j in i + 1..4 {
                ar.insert((i, j));
            }
        }
        let vis: BTreeSet<(usize, usize)> =
            [(0, 2), (1, 2), (0, 3)].into_iter().collect();
        AbstractExecution::new(h, vis, ar).unwrap()
    }

    #[test]
    fn monotonic_reads_violation_names_the_reads() {
        let x = monotonic_reads_counterexample();
        let mr = find_model("MonotonicReads").unwrap();
        match check_direct((&x).into(), &mr).unwrap() {
            Verdict::Violated {
                witness: Some(witness),
            } => {
                let ids: Vec<&str> = witness.values().map(|o| o.as_str()).collect();
                assert!(ids.contains(&"r1") && ids.contains(&"r2"), "witness {ids:?}");
            }
            other => panic!("expected a violation with witness, got {other:?}"),
        }
        // The same execution satisfies ReadYourWrites vacuously.
        let ryw = find_model("ReadYourWrites").unwrap();
        assert_eq!(check_direct((&x).into(), &ryw).unwrap(), Verdict::Holds);
    }

    #[test]
    fn linearizability_is_the_conjunction_extensionally() {
        use crate::trace::gen::{gen_exec, GeneratorConfig};
        let lin = find_model("Linearizability").unwrap();
        let parts: Vec<Formula> = ["SingleOrder", "RealTime", "RVal"]
            .iter()
            .map(|n| find_model(n).unwrap().formula)
            .collect();
        for seed in 0..30 {
            let cfg = GeneratorConfig {
                seed,
                num_procs: 2,
                num_ops: 5,
                num_objs: 1,
                num_vals: 2,
                ..Default::default()
            };
            let x = gen_exec(&cfg).unwrap();
            let whole = check_model((&x).into(), &lin.formula).unwrap();
            let each = parts
                .iter()
                .map(|f| check_model((&x).into(), f).unwrap())
                .all(|b| b);
            assert_eq!(whole, each);
        }
    }

    #[test]
    fn quiescent_consistency_reduces_to_its_conclusion_on_finite_traces() {
        use crate::trace::gen::{gen_exec, GeneratorConfig};
        let qc = find_model("QuiescentConsistency").unwrap();
        let conclusion =
            p("exists1 a. a.type = read & finite{b | !lastwrite(b, a)}");
        for seed in 100..130 {
            let cfg = GeneratorConfig {
                seed,
                num_procs: 2,
                num_ops: 4,
                num_objs: 1,
                num_vals: 2,
                ..Default::default()
            };
            let x = gen_exec(&cfg).unwrap();
            assert_eq!(
                check_model((&x).into(), &qc.formula).unwrap(),
                check_model((&x).into(), &conclusion).unwrap()
            );
        }
    }

    #[test]
    fn model_file_parsing() {
        let text = "# demo\nmodel AlwaysReads := forall1 a. a.type = read\n\
                    model Wide :=\n forall1 a.\n a.stime < a.rtime\n";
        let defs = parse_model_file(text).unwrap();
        assert_eq!(defs.len(), 2);
        assert_eq!(defs[0].name, "AlwaysReads");
        assert!(!defs[1].requires_exec);
        assert!(parse_model_file("model Bad := a.stime < a.rtime").is_err());
    }
}
