//! Generator graph of the returns-before order.
//!
//! The returns-before relation of a history is an interval order and is far
//! too dense to work with directly. The builder walks the start-time order
//! backwards and only keeps an edge to a direct successor when no path to it
//! exists yet; the transitive closure of the result is exactly returns-before,
//! every vertex has in- and out-degree at most the process count, and the
//! start-time layout cuts at most `2m^2` edges.

use crate::history::{History, ProcId};
use std::collections::BTreeSet;
use thiserror::Error;

/// An edge of the generator graph. The target's process is kept alongside so
/// the one-in-edge-per-process property is directly checkable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub dst_proc: ProcId,
}

/// Sparse generator of the returns-before order of one history.
#[derive(Debug, Clone)]
pub struct GenGraph {
    history: History,
    ord: Vec<usize>,
    edges: Vec<Edge>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("cut index {0} out of range 1..={1}")]
    CutOutOfRange(usize, usize),
    #[error("exact cutwidth supports at most {cap} operations, got {got}")]
    TooLargeForExact { got: usize, cap: usize },
}

/// One vertical cut of the start-time layout.
#[derive(Debug, Clone)]
pub struct CutReport {
    pub ell: usize,
    pub left: BTreeSet<usize>,
    pub right: BTreeSet<usize>,
    /// Per process, the last operation of the left side to start.
    pub gamma: BTreeSet<usize>,
    /// Per process, the first operation of the right side to start.
    pub lambda: BTreeSet<usize>,
    pub crossing: usize,
}

/// Runs the reverse-traversal construction. With `literal_last` the body
/// replays the published pseudocode verbatim (which tests and links only the
/// last successor of each operation) instead of the prose reading that
/// processes the successors one by one.
pub fn build_generator(h: &History, literal_last: bool) -> GenGraph {
    let ord = h.ord();
    let n = ord.len();
    let mut pos_in_ord = vec![0usize; n.max(1)];
    let mut pos = vec![0usize; h.len()];
    for (p, &ix) in ord.iter().enumerate() {
        pos[ix] = p;
        if n > 0 {
            pos_in_ord[p] = ix;
        }
    }
    let mut edges: Vec<Edge> = Vec::new();
    if n >= 2 {
        for i in (0..n - 1).rev() {
            let src = ord[i];
            let mut succs: Vec<usize> = h.succs(src).into_iter().collect();
            succs.sort_by_key(|&s| pos[s]);
            for j in 0..succs.len() {
                let dst = if literal_last {
                    succs[succs.len() - 1]
                } else {
                    succs[j]
                };
                if !path_exists(&edges, src, dst) {
                    edges.push(Edge {
                        src,
                        dst,
                        dst_proc: h.op(dst).proc,
                    });
                }
            }
        }
    }
    edges.sort();
    edges.dedup();
    GenGraph {
        history: h.clone(),
        ord,
        edges,
    }
}

fn path_exists(edges: &[Edge], from: usize, to: usize) -> bool {
    let mut stack = vec![from];
    let mut seen = BTreeSet::new();
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        if !seen.insert(v) {
            continue;
        }
        for e in edges {
            if e.src == v {
                stack.push(e.dst);
            }
        }
    }
    false
}

impl GenGraph {
    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn ord(&self) -> &[usize] {
        &self.ord
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.src == v).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.dst == v).count()
    }

    /// Reachability over the edge set.
    pub fn transitive_closure(&self) -> BTreeSet<(usize, usize)> {
        let n = self.history.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.src].push(e.dst);
        }
        let mut closure = BTreeSet::new();
        for start in 0..n {
            let mut stack: Vec<usize> = adj[start].clone();
            let mut seen = BTreeSet::new();
            while let Some(v) = stack.pop() {
                if !seen.insert(v) {
                    continue;
                }
                closure.insert((start, v));
                stack.extend(adj[v].iter().copied());
            }
        }
        closure
    }

    /// The cut after the first `ell` operations of the start-time layout,
    /// `1 <= ell <= n`.
    pub fn cut(&self, ell: usize) -> Result<CutReport, GraphError> {
        let n = self.ord.len();
        if ell == 0 || ell > n {
            return Err(GraphError::CutOutOfRange(ell, n));
        }
        let left: BTreeSet<usize> = self.ord[..ell].iter().copied().collect();
        let right: BTreeSet<usize> = self.ord[ell..].iter().copied().collect();
        let h = &self.history;
        let mut gamma = BTreeSet::new();
        let mut lambda = BTreeSet::new();
        for p in 0..h.meta().num_procs() {
            if let Some(&g) = left
                .iter()
                .filter(|&&v| h.op(v).proc == ProcId(p))
                .max_by_key(|&&v| h.op(v).stime)
            {
                gamma.insert(g);
            }
            if let Some(&l) = right
                .iter()
                .filter(|&&v| h.op(v).proc == ProcId(p))
                .min_by_key(|&&v| h.op(v).stime)
            {
                lambda.insert(l);
            }
        }
        let crossing = self
            .edges
            .iter()
            .filter(|e| left.contains(&e.src) != left.contains(&e.dst))
            .count();
        Ok(CutReport {
            ell,
            left,
            right,
            gamma,
            lambda,
            crossing,
        })
    }

    /// Maximum crossing count along the start-time layout; an upper bound on
    /// the true cutwidth.
    pub fn cutwidth_along_ord(&self) -> usize {
        (1..=self.ord.len())
            .map(|ell| self.cut(ell).expect("within range").crossing)
            .max()
            .unwrap_or(0)
    }

    /// Exact cutwidth by branch-and-bound over all layouts; small graphs only.
    pub fn exact_cutwidth(&self) -> Result<usize, GraphError> {
        const CAP: usize = 10;
        let n = self.history.len();
        if n > CAP {
            return Err(GraphError::TooLargeForExact { got: n, cap: CAP });
        }
        if n == 0 {
            return Ok(0);
        }
        let mut best = self.cutwidth_along_ord();
        let mut placed = vec![false; n];
        let mut prefix = Vec::with_capacity(n);
        search(&self.edges, n, &mut placed, &mut prefix, 0, &mut best);
        Ok(best)
    }

    /// Textual digraph export (DOT).
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph rb_generator {\n");
        for &ix in &self.ord {
            out.push_str(&format!("  \"{}\";\n", self.history.op(ix).id));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\";\n",
                self.history.op(e.src).id,
                self.history.op(e.dst).id
            ));
        }
        out.push_str("}\n");
        out
    }

    /// `ell,crossing` profile for plotting.
    pub fn cut_profile_csv(&self) -> String {
        let mut out = String::from("ell,crossing\n");
        for ell in 1..=self.ord.len() {
            out.push_str(&format!("{},{}\n", ell, self.cut(ell).unwrap().crossing));
        }
        out
    }
}

fn search(
    edges: &[Edge],
    n: usize,
    placed: &mut Vec<bool>,
    prefix: &mut Vec<usize>,
    running_max: usize,
    best: &mut usize,
) {
    if running_max >= *best {
        return;
    }
    if prefix.len() == n {
        *best = running_max;
        return;
    }
    for v in 0..n {
        if placed[v] {
            continue;
        }
        placed[v] = true;
        prefix.push(v);
        let cut = edges
            .iter()
            .filter(|e| placed[e.src] != placed[e.dst])
            .count();
        search(edges, n, placed, prefix, running_max.max(cut), best);
        prefix.pop();
        placed[v] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::{MetaParams, OpId, OpType};
    use crate::testutil::{fig1, op};
    use crate::History;

    fn edge_ids(g: &GenGraph) -> BTreeSet<(String, String)> {
        g.edges()
            .iter()
            .map(|e| {
                (
                    g.history().op(e.src).id.0.clone(),
                    g.history().op(e.dst).id.0.clone(),
                )
            })
            .collect()
    }

    #[test]
    fn fig1_generator_edges() {
        let h = fig1();
        let g = build_generator(&h, false);
        let expected: BTreeSet<(String, String)> = [
            ("a", "f"),
            ("a", "b"),
            ("d", "f"),
            ("d", "b"),
            ("f", "e"),
            ("f", "c"),
            ("b", "c"),
        ]
        .into_iter()
        .map(|(x, y)| (x.to_string(), y.to_string()))
        .collect();
        assert_eq!(edge_ids(&g), expected);

        // Closure equals returns-before.
        let closure = g.transitive_closure();
        for a in 0..h.len() {
            for b in 0..h.len() {
                assert_eq!(h.rb(a, b), closure.contains(&(a, b)));
            }
        }
        let ix = |s: &str| h.index_of(&OpId::new(s)).unwrap();
        assert!(closure.contains(&(ix("a"), ix("f"))));
        assert!(closure.contains(&(ix("d"), ix("f"))));
        assert!(!closure.contains(&(ix("b"), ix("e"))));

        // Degree bounds.
        let m = h.meta().num_procs();
        for v in 0..h.len() {
            assert!(g.out_degree(v) <= m);
            assert!(g.in_degree(v) <= m);
        }
    }

    #[test]
    fn chain_suppresses_transitive_edge() {
        let meta = MetaParams::canonical(1, 1, 1);
        let ops = vec![
            op("a", 0, 1, 2, OpType::Read, 0, None, None),
            op("b", 0, 3, 4, OpType::Read, 0, None, None),
            op("c", 0, 5, 6, OpType::Read, 0, None, None),
        ];
        let h = History::new(meta, ops).unwrap();
        let g = build_generator(&h, false);
        let expected: BTreeSet<(String, String)> = [("a", "b"), ("b", "c")]
            .into_iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect();
        assert_eq!(edge_ids(&g), expected);
        assert_eq!(g.cutwidth_along_ord(), 1);
        assert_eq!(g.exact_cutwidth().unwrap(), 1);
    }

    #[test]
    fn concurrent_ops_have_no_edges() {
        let meta = MetaParams::canonical(3, 1, 1);
        let ops = vec![
            op("a", 0, 1, 10, OpType::Read, 0, None, None),
            op("b", 1, 2, 11, OpType::Read, 0, None, None),
            op("c", 2, 3, 12, OpType::Read, 0, None, None),
        ];
        let h = History::new(meta, ops).unwrap();
        let g = build_generator(&h, false);
        assert!(g.edges().is_empty());
        assert_eq!(g.cutwidth_along_ord(), 0);
    }

    #[test]
    fn empty_history_graph() {
        let h = History::new(MetaParams::canonical(1, 1, 1), vec![]).unwrap();
        let g = build_generator(&h, false);
        assert!(g.edges().is_empty());
        assert!(g.transitive_closure().is_empty());
        assert_eq!(g.cutwidth_along_ord(), 0);
        assert_eq!(g.exact_cutwidth().unwrap(), 0);
    }

    #[test]
    fn last_cut_crosses_nothing() {
        let h = fig1();
        let g = build_generator(&h, false);
        let report = g.cut(h.len()).unwrap();
        assert_eq!(report.crossing, 0);
        assert!(g.cut(0).is_err());
        assert!(g.cut(h.len() + 1).is_err());
    }

    #[test]
    fn fig1_cut_bounds_and_lemmas() {
        let h = fig1();
        let g = build_generator(&h, false);
        let m = h.meta().num_procs();
        for ell in 1..=h.len() {
            let r = g.cut(ell).unwrap();
            assert!(r.gamma.len() <= m);
            assert!(r.lambda.len() <= m);
            assert!(r.crossing <= 2 * m * m);
            for e in g.edges() {
                // No edge from the right side back to the left.
                assert!(!(r.right.contains(&e.src) && r.left.contains(&e.dst)));
                // Crossing edges start in gamma or land in lambda.
                if r.left.contains(&e.src) && r.right.contains(&e.dst) {
                    assert!(r.gamma.contains(&e.src) || r.lambda.contains(&e.dst));
                }
            }
        }
    }

    #[test]
    fn removing_any_edge_breaks_the_closure() {
        let h = fig1();
        let g = build_generator(&h, false);
        let full = g.transitive_closure();
        for skip in 0..g.edges().len() {
            let mut pruned = g.clone();
            pruned.edges.remove(skip);
            assert_ne!(pruned.transitive_closure(), full);
        }
    }

    #[test]
    fn literal_variant_differs_on_fig1() {
        let h = fig1();
        let g = build_generator(&h, true);
        // The verbatim pseudocode only ever links the last successor, so the
        // closure misses returns-before pairs.
        let closure = g.transitive_closure();
        let mut rb = BTreeSet::new();
        for a in 0..h.len() {
            for b in 0..h.len() {
                if h.rb(a, b) {
                    rb.insert((a, b));
                }
            }
        }
        assert_ne!(closure, rb);
    }

    #[test]
    fn exact_cutwidth_on_single_edge() {
        let meta = MetaParams::canonical(2, 1, 1);
        let ops = vec![
            op("a", 0, 1, 2, OpType::Read, 0, None, None),
            op("b", 1, 3, 4, OpType::Read, 0, None, None),
        ];
        let h = History::new(meta, ops).unwrap();
        let g = build_generator(&h, false);
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.exact_cutwidth().unwrap(), 1);
    }
}
