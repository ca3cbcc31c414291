//! Shared fixtures for tests across the workspace.

use crate::history::{
    AbstractExecution, History, MetaParams, ObjId, OpId, OpType, OpVal, Operation, ProcId, Time,
    ValId,
};
use std::collections::BTreeSet;

/// Integer-timestamped operation, for compact fixture construction.
pub fn op(
    id: &str,
    proc: usize,
    stime: i64,
    rtime: i64,
    kind: OpType,
    obj: usize,
    ival: Option<usize>,
    oval: Option<usize>,
) -> Operation {
    Operation {
        id: OpId::new(id),
        proc: ProcId(proc),
        stime: Time::int(stime),
        rtime: Time::int(rtime),
        kind,
        obj: ObjId(obj),
        ival: ival.map(ValId).map(OpVal::Val).unwrap_or(OpVal::Empty),
        oval: oval.map(ValId).map(OpVal::Val).unwrap_or(OpVal::Empty),
    }
}

/// The six-operation, three-process reference history used throughout the
/// test suites: `a=[2,5]`, `b=[10,14]`, `c=[31/2,18]` on p1; `d=[3,7]`,
/// `e=[12,17]` on p2; `f=[8,11]` on p3.
pub fn fig1() -> History {
    let meta = MetaParams::new(
        vec!["p1".into(), "p2".into(), "p3".into()],
        vec!["x".into(), "y".into()],
        vec!["v1".into(), "v2".into()],
    )
    .unwrap();
    let mut c = op("c", 0, 0, 18, OpType::Read, 0, None, Some(1));
    c.stime = Time::new(31, 2);
    let ops = vec![
        op("a", 0, 2, 5, OpType::Write, 0, Some(0), None),
        op("b", 0, 10, 14, OpType::Read, 0, None, Some(0)),
        c,
        op("d", 1, 3, 7, OpType::Write, 0, Some(1), None),
        op("e", 1, 12, 17, OpType::Read, 0, None, Some(1)),
        op("f", 2, 8, 11, OpType::Write, 1, Some(0), None),
    ];
    History::new(meta, ops).unwrap()
}

/// An execution over a history with `ar` the start-time order and `vis`
/// empty: the cheapest real-time, 0-transient execution.
pub fn exec_with_stime_ar(h: History) -> AbstractExecution {
    let ord = h.ord();
    let mut ar = BTreeSet::new();
    for i in 0..ord.len() {
        for j in i + 1..ord.len() {
            ar.insert((ord[i], ord[j]));
        }
    }
    AbstractExecution::new(h, BTreeSet::new(), ar).unwrap()
}
