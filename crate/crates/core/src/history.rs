//! Histories and abstract executions.
//!
//! A history is a finite set of operations, each running on one process over
//! a real-time interval `[stime, rtime]`. Intervals of different processes may
//! overlap; intervals on the same process never do. An abstract execution
//! enriches a history with a visibility relation (which operations an
//! operation can observe) and an arbitration relation (a strict total order
//! resolving conflicting writes).

use num_rational::Ratio;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use thiserror::Error;

/// Exact timestamp. Comparisons are order-theoretic, so exact rational
/// arithmetic avoids any tie ambiguity that floats would introduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Time(Ratio<i64>);

impl Time {
    pub fn new(num: i64, den: i64) -> Self {
        Time(Ratio::new(num, den))
    }

    pub fn int(n: i64) -> Self {
        Time(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_positive(&self) -> bool {
        self.0 > Ratio::zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0 < Ratio::zero()
    }

    /// Parses `5`, `31/2` or `15.5`.
    pub fn parse(s: &str) -> Result<Self, TimeParseError> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n: i64 = num.trim().parse().map_err(|_| TimeParseError(s.into()))?;
            let d: i64 = den.trim().parse().map_err(|_| TimeParseError(s.into()))?;
            if d == 0 {
                return Err(TimeParseError(s.into()));
            }
            return Ok(Time(Ratio::new(n, d)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.trim_start().starts_with('-');
            let i: i64 = int.parse().map_err(|_| TimeParseError(s.into()))?;
            if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(TimeParseError(s.into()));
            }
            let f: i64 = frac.parse().map_err(|_| TimeParseError(s.into()))?;
            let scale = 10i64.pow(frac.len() as u32);
            let frac_part = Ratio::new(f, scale);
            let whole = Ratio::from_integer(i);
            let v = if neg { whole - frac_part } else { whole + frac_part };
            return Ok(Time(v));
        }
        let n: i64 = s.parse().map_err(|_| TimeParseError(s.into()))?;
        Ok(Time(Ratio::from_integer(n)))
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid timestamp `{0}`")]
pub struct TimeParseError(pub String);

/// Index of a process in [`MetaParams::processes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcId(pub usize);

/// Index of an object in [`MetaParams::objects`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjId(pub usize);

/// Index of a value in [`MetaParams::values`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValId(pub usize);

/// Stable, user-chosen operation identifier, independent of timestamps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpId(pub String);

impl OpId {
    pub fn new(s: impl Into<String>) -> Self {
        OpId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for OpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpType {
    Read,
    Write,
}

impl fmt::Display for OpType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpType::Read => f.write_str("read"),
            OpType::Write => f.write_str("write"),
        }
    }
}

/// An input or output value slot: a concrete value, the empty value, or the
/// undefined value marking an operation whose result never materialised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpVal {
    Empty,
    Undef,
    Val(ValId),
}

/// The meta parameters of a history: the process, object and value universes.
/// Operation types are fixed to read/write.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaParams {
    pub processes: Vec<String>,
    pub objects: Vec<String>,
    pub values: Vec<String>,
}

impl MetaParams {
    pub fn new(
        processes: Vec<String>,
        objects: Vec<String>,
        values: Vec<String>,
    ) -> Result<Self, MetaError> {
        let meta = MetaParams {
            processes,
            objects,
            values,
        };
        meta.check()?;
        Ok(meta)
    }

    /// Canonical universe `p1..pm`, `o1..`, `v1..` used by generators and the
    /// satisfiability search.
    pub fn canonical(procs: usize, objects: usize, values: usize) -> Self {
        MetaParams {
            processes: (1..=procs).map(|i| format!("p{i}")).collect(),
            objects: (1..=objects).map(|i| format!("o{i}")).collect(),
            values: (1..=values).map(|i| format!("v{i}")).collect(),
        }
    }

    pub fn check(&self) -> Result<(), MetaError> {
        for (kind, list) in [
            ("processes", &self.processes),
            ("objects", &self.objects),
            ("values", &self.values),
        ] {
            if list.is_empty() {
                return Err(MetaError::Empty(kind));
            }
            let mut seen = HashSet::new();
            for name in list {
                if name.is_empty() || name.contains(char::is_whitespace) || name.contains('.') {
                    return Err(MetaError::BadName(name.clone()));
                }
                // `_` and `undef` are the concrete syntax of the two
                // distinguished values and must stay distinct from them.
                if name == "_" || name == "undef" {
                    return Err(MetaError::BadName(name.clone()));
                }
                if !seen.insert(name) {
                    return Err(MetaError::Duplicate(kind, name.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn num_procs(&self) -> usize {
        self.processes.len()
    }

    pub fn proc_id(&self, name: &str) -> Option<ProcId> {
        self.processes.iter().position(|p| p == name).map(ProcId)
    }

    pub fn obj_id(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == name).map(ObjId)
    }

    pub fn val_id(&self, name: &str) -> Option<ValId> {
        self.values.iter().position(|v| v == name).map(ValId)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetaError {
    #[error("meta parameter list `{0}` is empty")]
    Empty(&'static str),
    #[error("invalid name `{0}` (names must be non-empty, without whitespace or dots, and not `_`/`undef`)")]
    BadName(String),
    #[error("duplicate {0} name `{1}`")]
    Duplicate(&'static str, String),
}

/// One timestamped, attributed operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operation {
    pub id: OpId,
    pub proc: ProcId,
    pub stime: Time,
    pub rtime: Time,
    pub kind: OpType,
    pub obj: ObjId,
    pub ival: OpVal,
    pub oval: OpVal,
}

/// A finite history: meta parameters plus a set of operations.
///
/// Operations are kept in insertion order (the trace file order); use
/// [`History::ord`] for the start-time order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    meta: MetaParams,
    ops: Vec<Operation>,
    by_id: HashMap<OpId, usize>,
}

/// A violation of a history invariant, naming the offending operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub invariant: &'static str,
    pub ops: Vec<OpId>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.invariant)?;
        if !self.ops.is_empty() {
            let ids: Vec<&str> = self.ops.iter().map(|o| o.as_str()).collect();
            write!(f, " [{}]", ids.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HistoryError {
    #[error("duplicate operation id `{0}`")]
    DuplicateOpId(OpId),
    #[error("operation `{0}` references an out-of-range {1} index")]
    BadIndex(OpId, &'static str),
    #[error(transparent)]
    Meta(#[from] MetaError),
}

impl History {
    pub fn new(meta: MetaParams, ops: Vec<Operation>) -> Result<Self, HistoryError> {
        meta.check()?;
        let mut by_id = HashMap::new();
        for (ix, op) in ops.iter().enumerate() {
            if by_id.insert(op.id.clone(), ix).is_some() {
                return Err(HistoryError::DuplicateOpId(op.id.clone()));
            }
            if op.proc.0 >= meta.processes.len() {
                return Err(HistoryError::BadIndex(op.id.clone(), "process"));
            }
            if op.obj.0 >= meta.objects.len() {
                return Err(HistoryError::BadIndex(op.id.clone(), "object"));
            }
            for v in [op.ival, op.oval] {
                if let OpVal::Val(ValId(i)) = v {
                    if i >= meta.values.len() {
                        return Err(HistoryError::BadIndex(op.id.clone(), "value"));
                    }
                }
            }
        }
        Ok(History { meta, ops, by_id })
    }

    pub fn meta(&self) -> &MetaParams {
        &self.meta
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn op(&self, ix: usize) -> &Operation {
        &self.ops[ix]
    }

    pub fn index_of(&self, id: &OpId) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn by_id(&self, id: &OpId) -> Option<&Operation> {
        self.index_of(id).map(|ix| &self.ops[ix])
    }

    /// Operation indices sorted by start time.
    pub fn ord(&self) -> Vec<usize> {
        let mut ixs: Vec<usize> = (0..self.ops.len()).collect();
        ixs.sort_by_key(|&i| self.ops[i].stime);
        ixs
    }

    /// Checks every history invariant and reports all violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for op in &self.ops {
            if op.stime >= op.rtime {
                out.push(Violation {
                    invariant: "stime < rtime",
                    ops: vec![op.id.clone()],
                });
            }
            if !op.stime.is_positive() {
                out.push(Violation {
                    invariant: "stime > 0",
                    ops: vec![op.id.clone()],
                });
            }
            match op.kind {
                OpType::Read => {
                    if op.ival != OpVal::Empty {
                        out.push(Violation {
                            invariant: "read has no input value",
                            ops: vec![op.id.clone()],
                        });
                    }
                }
                OpType::Write => {
                    if !matches!(op.ival, OpVal::Val(_)) {
                        out.push(Violation {
                            invariant: "write input is a concrete value",
                            ops: vec![op.id.clone()],
                        });
                    }
                    if matches!(op.oval, OpVal::Val(_)) {
                        out.push(Violation {
                            invariant: "write output is empty or undef",
                            ops: vec![op.id.clone()],
                        });
                    }
                }
            }
        }
        // All 2n extremities pairwise distinct.
        let mut stamps: BTreeMap<Time, Vec<OpId>> = BTreeMap::new();
        for op in &self.ops {
            stamps.entry(op.stime).or_default().push(op.id.clone());
            stamps.entry(op.rtime).or_default().push(op.id.clone());
        }
        for (_, owners) in stamps {
            if owners.len() > 1 {
                out.push(Violation {
                    invariant: "distinct timestamps",
                    ops: owners,
                });
            }
        }
        // Per-process intervals pairwise disjoint.
        for p in 0..self.meta.processes.len() {
            let mut on_p: Vec<&Operation> =
                self.ops.iter().filter(|o| o.proc.0 == p).collect();
            on_p.sort_by_key(|o| o.stime);
            for w in on_p.windows(2) {
                if w[0].rtime > w[1].stime {
                    out.push(Violation {
                        invariant: "per-process intervals disjoint",
                        ops: vec![w[0].id.clone(), w[1].id.clone()],
                    });
                }
            }
        }
        out
    }

    /// Returns-before: `a` returns before `b` starts.
    pub fn rb(&self, a: usize, b: usize) -> bool {
        self.ops[a].rtime < self.ops[b].stime
    }

    /// Same-session: both operations run on the same process.
    pub fn same_session(&self, a: usize, b: usize) -> bool {
        self.ops[a].proc == self.ops[b].proc
    }

    /// Session order: per-process returns-before order.
    pub fn session_order(&self, a: usize, b: usize) -> bool {
        self.same_session(a, b) && self.rb(a, b)
    }

    /// The first operation on process `p` that starts after `a` returns.
    pub fn direct_successor_on(&self, a: usize, p: ProcId) -> Option<usize> {
        let rtime = self.ops[a].rtime;
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, o)| o.proc == p && o.stime > rtime)
            .min_by_key(|(_, o)| o.stime)
            .map(|(ix, _)| ix)
    }

    /// Direct successors of `a` across all processes; at most one per process.
    pub fn succs(&self, a: usize) -> BTreeSet<usize> {
        (0..self.meta.processes.len())
            .filter_map(|p| self.direct_successor_on(a, ProcId(p)))
            .collect()
    }

    /// The operations on process `p` starting after `a` returns, in start
    /// order: the chain `b0, b1, ...` whose visibility from `a` the
    /// transience bound constrains.
    pub fn successors_chain_on(&self, a: usize, p: ProcId) -> Vec<usize> {
        let rtime = self.ops[a].rtime;
        let mut chain: Vec<usize> = (0..self.ops.len())
            .filter(|&i| self.ops[i].proc == p && self.ops[i].stime > rtime)
            .collect();
        chain.sort_by_key(|&i| self.ops[i].stime);
        chain
    }

    /// Structural equality up to an order-preserving renaming of timestamps
    /// (and of operation ids): op attributes and the returns-before relation
    /// must agree once both sides are listed in start order.
    pub fn equiv_modulo_time(&self, other: &History) -> bool {
        if self.meta != other.meta || self.len() != other.len() {
            return false;
        }
        let a = self.ord();
        let b = other.ord();
        for (&i, &j) in a.iter().zip(&b) {
            let x = &self.ops[i];
            let y = &other.ops[j];
            if (x.proc, x.kind, x.obj, x.ival, x.oval) != (y.proc, y.kind, y.obj, y.ival, y.oval) {
                return false;
            }
        }
        for (ai, &i) in a.iter().enumerate() {
            for (aj, &j) in a.iter().enumerate() {
                if self.rb(i, j) != other.rb(b[ai], b[aj]) {
                    return false;
                }
            }
        }
        true
    }
}

/// A history together with visibility and arbitration, both over operation
/// indices of the underlying history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractExecution {
    pub history: History,
    pub vis: BTreeSet<(usize, usize)>,
    pub ar: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExecError {
    #[error("relation references operation index {0} out of range")]
    BadIndex(usize),
    #[error("arbitration is not a strict total order: {0}")]
    ArNotTotalOrder(String),
    #[error("visibility is cyclic")]
    VisCyclic,
}

impl AbstractExecution {
    pub fn new(
        history: History,
        vis: BTreeSet<(usize, usize)>,
        ar: BTreeSet<(usize, usize)>,
    ) -> Result<Self, ExecError> {
        let n = history.len();
        for &(a, b) in vis.iter().chain(ar.iter()) {
            if a >= n || b >= n {
                return Err(ExecError::BadIndex(a.max(b)));
            }
        }
        let x = AbstractExecution { history, vis, ar };
        x.check_ar_total_order()?;
        if has_cycle(n, &x.vis) {
            return Err(ExecError::VisCyclic);
        }
        Ok(x)
    }

    fn check_ar_total_order(&self) -> Result<(), ExecError> {
        let n = self.history.len();
        for i in 0..n {
            if self.ar.contains(&(i, i)) {
                return Err(ExecError::ArNotTotalOrder(format!(
                    "reflexive at `{}`",
                    self.history.op(i).id
                )));
            }
            for j in i + 1..n {
                let fwd = self.ar.contains(&(i, j));
                let bwd = self.ar.contains(&(j, i));
                if fwd == bwd {
                    return Err(ExecError::ArNotTotalOrder(format!(
                        "`{}` and `{}` are {}",
                        self.history.op(i).id,
                        self.history.op(j).id,
                        if fwd { "mutually ordered" } else { "unordered" }
                    )));
                }
            }
        }
        for &(a, b) in &self.ar {
            for &(c, d) in &self.ar {
                if b == c && !self.ar.contains(&(a, d)) {
                    return Err(ExecError::ArNotTotalOrder(format!(
                        "not transitive at `{}` -> `{}` -> `{}`",
                        self.history.op(a).id,
                        self.history.op(b).id,
                        self.history.op(d).id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Real-time discipline: arbitration contains returns-before, and nothing
    /// is visible against returns-before.
    pub fn is_real_time(&self) -> bool {
        let n = self.history.len();
        for a in 0..n {
            for b in 0..n {
                if self.history.rb(a, b) {
                    if !self.ar.contains(&(a, b)) {
                        return false;
                    }
                    if self.vis.contains(&(b, a)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Like [`History::equiv_modulo_time`], additionally requiring that the
    /// visibility and arbitration relations agree under the start-order
    /// bijection.
    pub fn equiv_modulo_time(&self, other: &AbstractExecution) -> bool {
        if !self.history.equiv_modulo_time(&other.history) {
            return false;
        }
        let a = self.history.ord();
        let b = other.history.ord();
        let remap = |rel: &BTreeSet<(usize, usize)>, ord: &[usize]| -> BTreeSet<(usize, usize)> {
            let mut pos = vec![0usize; ord.len()];
            for (p, &ix) in ord.iter().enumerate() {
                pos[ix] = p;
            }
            rel.iter().map(|&(x, y)| (pos[x], pos[y])).collect()
        };
        remap(&self.vis, &a) == remap(&other.vis, &b) && remap(&self.ar, &a) == remap(&other.ar, &b)
    }

    /// Definitional check of the transience bound: for every operation `a`
    /// and process `p` with successor chain `b0, b1, ...`, visibility of `a`
    /// beyond index `k-1` equals visibility at `k-1` (and is absent for
    /// `k = 0`).
    pub fn is_k_transient(&self, k: usize) -> bool {
        let n = self.history.len();
        for a in 0..n {
            for p in 0..self.history.meta().num_procs() {
                let chain = self.history.successors_chain_on(a, ProcId(p));
                let frozen = if k == 0 {
                    false
                } else {
                    match chain.get(k - 1) {
                        Some(&b) => self.vis.contains(&(a, b)),
                        None => false,
                    }
                };
                for &b in chain.iter().skip(k) {
                    if self.vis.contains(&(a, b)) != frozen {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Cycle check for a relation over `0..n`.
pub fn has_cycle(n: usize, edges: &BTreeSet<(usize, usize)>) -> bool {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    fn dfs(v: usize, adj: &[Vec<usize>], state: &mut [u8]) -> bool {
        state[v] = 1;
        for &w in &adj[v] {
            match state[w] {
                1 => return true,
                0 => {
                    if dfs(w, adj, state) {
                        return true;
                    }
                }
                _ => {}
            }
        }
        state[v] = 2;
        false
    }
    (0..n).any(|v| state[v] == 0 && dfs(v, &adj, &mut state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{fig1, op};

    #[test]
    fn time_parsing() {
        assert_eq!(Time::parse("5").unwrap(), Time::int(5));
        assert_eq!(Time::parse("31/2").unwrap(), Time::new(31, 2));
        assert_eq!(Time::parse("15.5").unwrap(), Time::new(31, 2));
        assert_eq!(Time::parse("15.5").unwrap().to_string(), "31/2");
        assert_eq!(Time::parse("0.25").unwrap(), Time::new(1, 4));
        assert!(Time::parse("x").is_err());
        assert!(Time::parse("1/0").is_err());
    }

    #[test]
    fn fig1_is_valid() {
        let h = fig1();
        assert_eq!(h.validate(), vec![]);
    }

    #[test]
    fn degenerate_interval_is_flagged() {
        let meta = MetaParams::canonical(1, 1, 1);
        let mut o = op("a", 0, 5, 5, OpType::Write, 0, Some(0), None);
        o.oval = OpVal::Empty;
        let h = History::new(meta, vec![o]).unwrap();
        let v = h.validate();
        assert!(v.iter().any(|v| v.invariant == "stime < rtime"));
    }

    #[test]
    fn shared_timestamp_is_flagged() {
        let meta = MetaParams::canonical(2, 1, 1);
        let a = op("a", 0, 5, 7, OpType::Write, 0, Some(0), None);
        let b = op("b", 1, 5, 8, OpType::Write, 0, Some(0), None);
        let h = History::new(meta, vec![a, b]).unwrap();
        let v = h.validate();
        assert!(v.iter().any(|v| v.invariant == "distinct timestamps"));
    }

    #[test]
    fn rb_on_fig1() {
        let h = fig1();
        let ix = |s: &str| h.index_of(&OpId::new(s)).unwrap();
        assert!(h.rb(ix("a"), ix("f")));
        assert!(!h.rb(ix("a"), ix("a")));
        assert!(h.rb(ix("d"), ix("f")));
        assert!(!h.rb(ix("b"), ix("e")));
    }

    #[test]
    fn sessions_on_fig1() {
        let h = fig1();
        let ix = |s: &str| h.index_of(&OpId::new(s)).unwrap();
        assert!(h.same_session(ix("a"), ix("b")));
        assert!(h.same_session(ix("a"), ix("a")));
        assert!(!h.same_session(ix("a"), ix("d")));
        assert!(h.session_order(ix("a"), ix("b")));
        assert!(!h.session_order(ix("a"), ix("a")));
        assert!(!h.session_order(ix("a"), ix("d")));
    }

    #[test]
    fn direct_successors_on_fig1() {
        let h = fig1();
        let ix = |s: &str| h.index_of(&OpId::new(s)).unwrap();
        assert_eq!(h.direct_successor_on(ix("a"), ProcId(2)), Some(ix("f")));
        assert_eq!(h.direct_successor_on(ix("c"), ProcId(0)), None);
        assert_eq!(h.direct_successor_on(ix("a"), ProcId(1)), Some(ix("e")));
        let succs_a: BTreeSet<usize> = [ix("b"), ix("e"), ix("f")].into_iter().collect();
        assert_eq!(h.succs(ix("a")), succs_a);
    }

    #[test]
    fn succs_of_chain() {
        let meta = MetaParams::canonical(1, 1, 1);
        let ops = vec![
            op("a", 0, 1, 2, OpType::Read, 0, None, None),
            op("b", 0, 3, 4, OpType::Read, 0, None, None),
            op("c", 0, 5, 6, OpType::Read, 0, None, None),
        ];
        let h = History::new(meta, ops).unwrap();
        assert_eq!(h.succs(0), [1usize].into_iter().collect());
        assert_eq!(h.succs(2), BTreeSet::new());
    }

    #[test]
    fn ar_total_order_enforced() {
        let h = fig1();
        let n = h.len();
        // Missing pairs.
        assert!(matches!(
            AbstractExecution::new(h.clone(), BTreeSet::new(), BTreeSet::new()),
            Err(ExecError::ArNotTotalOrder(_)) if n > 1
        ));
        // A linear order on start times works.
        let ord = h.ord();
        let mut ar = BTreeSet::new();
        for i in 0..ord.len() {
            for j in i + 1..ord.len() {
                ar.insert((ord[i], ord[j]));
            }
        }
        let x = AbstractExecution::new(h, BTreeSet::new(), ar).unwrap();
        assert!(x.is_real_time());
        assert!(x.is_k_transient(0));
    }
}
