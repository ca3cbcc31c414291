//! Hash-consed multi-terminal binary decision diagrams.
//!
//! Transition functions of the automata are total maps from bit-vector
//! letters to successor states. Explicit tables over `{0,1}^n` are infeasible
//! for the lane counts this engine sees, so transitions branch on one tracked
//! variable at a time and share structure: a node tests a variable (variables
//! strictly increase along every path) and a terminal carries an arbitrary
//! `u32` payload, here a state id or a set-table index.

use std::collections::HashMap;

pub type NodeId = u32;
pub type Var = u32;

const TERM_FLAG: u32 = 1 << 31;

/// Encodes a terminal carrying `value`.
pub fn terminal(value: u32) -> NodeId {
    debug_assert!(value & TERM_FLAG == 0);
    TERM_FLAG | value
}

pub fn is_terminal(n: NodeId) -> bool {
    n & TERM_FLAG != 0
}

pub fn terminal_value(n: NodeId) -> u32 {
    debug_assert!(is_terminal(n));
    n & !TERM_FLAG
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: Var,
    lo: NodeId,
    hi: NodeId,
}

/// A node store. Nodes are immutable and deduplicated; equal ids mean equal
/// functions within one manager.
#[derive(Debug, Clone, Default)]
pub struct Mtbdd {
    nodes: Vec<Node>,
    unique: HashMap<(Var, NodeId, NodeId), NodeId>,
}

impl Mtbdd {
    pub fn new() -> Self {
        Mtbdd::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&mut self, var: Var, lo: NodeId, hi: NodeId) -> NodeId {
        if lo == hi {
            return lo;
        }
        debug_assert!(self.var_of(lo) > var && self.var_of(hi) > var);
        if let Some(&id) = self.unique.get(&(var, lo, hi)) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        assert!(id & TERM_FLAG == 0, "node store overflow");
        self.nodes.push(Node { var, lo, hi });
        self.unique.insert((var, lo, hi), id);
        id
    }

    /// Branch variable; terminals sort after every variable.
    pub fn var_of(&self, n: NodeId) -> Var {
        if is_terminal(n) {
            Var::MAX
        } else {
            self.nodes[n as usize].var
        }
    }

    pub fn lo(&self, n: NodeId) -> NodeId {
        self.nodes[n as usize].lo
    }

    pub fn hi(&self, n: NodeId) -> NodeId {
        self.nodes[n as usize].hi
    }

    /// Child of `n` under `var := bit`, assuming `var <= var_of(n)`.
    pub fn cofactor(&self, n: NodeId, var: Var, bit: bool) -> NodeId {
        if is_terminal(n) || self.var_of(n) > var {
            n
        } else {
            debug_assert_eq!(self.var_of(n), var);
            if bit {
                self.hi(n)
            } else {
                self.lo(n)
            }
        }
    }

    /// Evaluates the function at a full letter.
    pub fn eval(&self, mut n: NodeId, letter: &impl Fn(Var) -> bool) -> u32 {
        while !is_terminal(n) {
            let node = self.nodes[n as usize];
            n = if letter(node.var) { node.hi } else { node.lo };
        }
        terminal_value(n)
    }

    /// Rebuilds `n` with its terminal values remapped.
    pub fn map_terminals(
        &mut self,
        n: NodeId,
        f: &mut impl FnMut(u32) -> u32,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> NodeId {
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let r = if is_terminal(n) {
            terminal(f(terminal_value(n)))
        } else {
            let node = self.nodes[n as usize];
            let lo = self.map_terminals(node.lo, f, memo);
            let hi = self.map_terminals(node.hi, f, memo);
            self.node(node.var, lo, hi)
        };
        memo.insert(n, r);
        r
    }

    /// Every terminal value reachable from `n`.
    pub fn terminals_of(&self, n: NodeId, out: &mut Vec<u32>) {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if !seen.insert(m) {
                continue;
            }
            if is_terminal(m) {
                out.push(terminal_value(m));
            } else {
                stack.push(self.lo(m));
                stack.push(self.hi(m));
            }
        }
        out.sort_unstable();
        out.dedup();
    }

    /// All (cube, terminal) paths, low edges first. Cubes list the tested
    /// variables in ascending order.
    pub fn paths(&self, n: NodeId) -> Vec<(Vec<(Var, bool)>, u32)> {
        let mut out = Vec::new();
        let mut cube = Vec::new();
        self.paths_rec(n, &mut cube, &mut out);
        out
    }

    fn paths_rec(
        &self,
        n: NodeId,
        cube: &mut Vec<(Var, bool)>,
        out: &mut Vec<(Vec<(Var, bool)>, u32)>,
    ) {
        if is_terminal(n) {
            out.push((cube.clone(), terminal_value(n)));
            return;
        }
        let node = self.nodes[n as usize];
        cube.push((node.var, false));
        self.paths_rec(node.lo, cube, out);
        cube.pop();
        cube.push((node.var, true));
        self.paths_rec(node.hi, cube, out);
        cube.pop();
    }

    /// Variables tested anywhere under `n`.
    pub fn support(&self, n: NodeId, out: &mut Vec<Var>) {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if is_terminal(m) || !seen.insert(m) {
                continue;
            }
            let node = self.nodes[m as usize];
            out.push(node.var);
            stack.push(node.lo);
            stack.push(node.hi);
        }
        out.sort_unstable();
        out.dedup();
    }
}

/// Combines a function from `ma` with one from `mb` into `out`, merging
/// terminals with `f`. The cache must be keyed per `(ma, mb, f)` use.
pub fn combine(
    ma: &Mtbdd,
    na: NodeId,
    mb: &Mtbdd,
    nb: NodeId,
    out: &mut Mtbdd,
    f: &mut impl FnMut(u32, u32) -> u32,
    cache: &mut HashMap<(NodeId, NodeId), NodeId>,
) -> NodeId {
    if let Some(&r) = cache.get(&(na, nb)) {
        return r;
    }
    let r = if is_terminal(na) && is_terminal(nb) {
        terminal(f(terminal_value(na), terminal_value(nb)))
    } else {
        let va = ma.var_of(na);
        let vb = mb.var_of(nb);
        let v = va.min(vb);
        let (la, ha) = if va == v {
            (ma.lo(na), ma.hi(na))
        } else {
            (na, na)
        };
        let (lb, hb) = if vb == v {
            (mb.lo(nb), mb.hi(nb))
        } else {
            (nb, nb)
        };
        let lo = combine(ma, la, mb, lb, out, f, cache);
        let hi = combine(ma, ha, mb, hb, out, f, cache);
        out.node(v, lo, hi)
    };
    cache.insert((na, nb), r);
    r
}

/// Copies a function from `src` into `dst` (terminals unchanged).
pub fn import(
    src: &Mtbdd,
    n: NodeId,
    dst: &mut Mtbdd,
    memo: &mut HashMap<NodeId, NodeId>,
) -> NodeId {
    if let Some(&r) = memo.get(&n) {
        return r;
    }
    let r = if is_terminal(n) {
        n
    } else {
        let lo = import(src, src.lo(n), dst, memo);
        let hi = import(src, src.hi(n), dst, memo);
        dst.node(src.var_of(n), lo, hi)
    };
    memo.insert(n, r);
    r
}

/// Builds a function over one variable.
pub fn table1(mgr: &mut Mtbdd, v: Var, f0: u32, f1: u32) -> NodeId {
    mgr.node(v, terminal(f0), terminal(f1))
}

/// Builds a function over two distinct variables from its truth table.
pub fn table2(mgr: &mut Mtbdd, u: Var, v: Var, f: impl Fn(bool, bool) -> u32) -> NodeId {
    assert_ne!(u, v);
    let (a, b, g): (Var, Var, Box<dyn Fn(bool, bool) -> u32>) = if u < v {
        (u, v, Box::new(move |x, y| f(x, y)))
    } else {
        (v, u, Box::new(move |y, x| f(x, y)))
    };
    let lo = table1(mgr, b, g(false, false), g(false, true));
    let hi = table1(mgr, b, g(true, false), g(true, true));
    mgr.node(a, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_consing_dedupes() {
        let mut m = Mtbdd::new();
        let a = table1(&mut m, 3, 0, 1);
        let b = table1(&mut m, 3, 0, 1);
        assert_eq!(a, b);
        let c = m.node(1, a, a);
        assert_eq!(c, a, "equal children collapse");
    }

    #[test]
    fn eval_and_cofactor() {
        let mut m = Mtbdd::new();
        let n = table2(&mut m, 0, 1, |x, y| u32::from(x && y));
        assert_eq!(m.eval(n, &|_| true), 1);
        assert_eq!(m.eval(n, &|v| v == 0), 0);
        let on_x = m.cofactor(n, 0, true);
        assert_eq!(m.eval(on_x, &|v| v == 1), 1);
    }

    #[test]
    fn combine_across_managers() {
        let mut a = Mtbdd::new();
        let mut b = Mtbdd::new();
        let fa = table1(&mut a, 0, 0, 1);
        let fb = table1(&mut b, 1, 0, 1);
        let mut out = Mtbdd::new();
        let mut cache = HashMap::new();
        let and = combine(&a, fa, &b, fb, &mut out, &mut |x, y| x & y, &mut cache);
        assert_eq!(out.eval(and, &|_| true), 1);
        assert_eq!(out.eval(and, &|v| v == 0), 0);
        assert_eq!(out.eval(and, &|v| v == 1), 0);
    }

    #[test]
    fn paths_are_ordered_lo_first() {
        let mut m = Mtbdd::new();
        let n = table2(&mut m, 0, 2, |x, y| u32::from(x) * 2 + u32::from(y));
        let paths = m.paths(n);
        let terms: Vec<u32> = paths.iter().map(|(_, t)| *t).collect();
        assert_eq!(terms, vec![0, 1, 2, 3]);
    }
}
