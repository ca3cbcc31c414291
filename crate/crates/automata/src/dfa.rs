//! Deterministic, complete automata over bit-vector alphabets with shared
//! decision-diagram transitions.
//!
//! The alphabet is implicit: a letter assigns a bit to every track id, and a
//! state's transition diagram only tests the tracks it depends on. Product,
//! complement, projection (with subset construction) and Moore minimization
//! with a canonical breadth-first renumbering are the toolbox the formula
//! compiler builds on.

use crate::bdd::{self, combine, import, is_terminal, terminal, Mtbdd, NodeId, Var};
use std::collections::{BTreeSet, HashMap, VecDeque};
use thiserror::Error;

/// A letter: the set of tracks carrying a 1.
pub type Letter = BTreeSet<Var>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("automaton construction exceeded the state cap ({0} states)")]
pub struct CapExceeded(pub usize);

#[derive(Debug, Clone)]
pub struct Dfa {
    mgr: Mtbdd,
    roots: Vec<NodeId>,
    accepting: Vec<bool>,
    initial: u32,
}

impl Dfa {
    pub fn num_states(&self) -> usize {
        self.roots.len()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn is_accepting(&self, s: u32) -> bool {
        self.accepting[s as usize]
    }

    /// Builds an automaton from explicit parts; `build` receives the manager
    /// and must return one transition root per state.
    pub fn from_parts(
        accepting: Vec<bool>,
        initial: u32,
        build: impl FnOnce(&mut Mtbdd) -> Vec<NodeId>,
    ) -> Self {
        let mut mgr = Mtbdd::new();
        let roots = build(&mut mgr);
        assert_eq!(roots.len(), accepting.len());
        Dfa {
            mgr,
            roots,
            accepting,
            initial,
        }
    }

    /// Single-state automaton accepting everything or nothing.
    pub fn constant(accept: bool) -> Self {
        Dfa::from_parts(vec![accept], 0, |_| vec![terminal(0)])
    }

    pub fn step(&self, state: u32, letter: &Letter) -> u32 {
        self.mgr
            .eval(self.roots[state as usize], &|v| letter.contains(&v))
    }

    pub fn accepts_word(&self, word: &[Letter]) -> bool {
        let mut s = self.initial;
        for letter in word {
            s = self.step(s, letter);
        }
        self.accepting[s as usize]
    }

    /// Language complement; sound because the automaton is deterministic and
    /// complete by construction.
    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for a in &mut out.accepting {
            *a = !*a;
        }
        out
    }

    /// Synchronous product; acceptance combined with `f`.
    pub fn product(
        a: &Dfa,
        b: &Dfa,
        f: impl Fn(bool, bool) -> bool,
        cap: usize,
    ) -> Result<Self, CapExceeded> {
        let mut mgr = Mtbdd::new();
        let mut pair_ids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        let mut intern = |p: (u32, u32), pairs: &mut Vec<(u32, u32)>| -> u32 {
            *pair_ids.entry(p).or_insert_with(|| {
                pairs.push(p);
                (pairs.len() - 1) as u32
            })
        };
        let init = intern((a.initial, b.initial), &mut pairs);
        let mut cache: HashMap<(NodeId, NodeId), NodeId> = HashMap::new();
        let mut roots = Vec::new();
        let mut done = 0usize;
        while done < pairs.len() {
            if pairs.len() > cap {
                return Err(CapExceeded(pairs.len()));
            }
            let (sa, sb) = pairs[done];
            let root = combine(
                &a.mgr,
                a.roots[sa as usize],
                &b.mgr,
                b.roots[sb as usize],
                &mut mgr,
                &mut |ta, tb| intern((ta, tb), &mut pairs),
                &mut cache,
            );
            roots.push(root);
            done += 1;
        }
        let accepting = pairs
            .iter()
            .map(|&(sa, sb)| f(a.accepting[sa as usize], b.accepting[sb as usize]))
            .collect();
        Ok(Dfa {
            mgr,
            roots,
            accepting,
            initial: init,
        })
    }

    /// Existential projection of one track: subset construction over the
    /// nondeterministic automaton that may read either bit on `var`.
    pub fn project(&self, var: Var, cap: usize) -> Result<Self, CapExceeded> {
        let mut work = self.mgr.clone();
        // Per original state: transition with set-valued terminals, joining
        // the two cofactors on `var`.
        let mut sets = SetTable::default();
        let mut cache_states: HashMap<(NodeId, NodeId), NodeId> = HashMap::new();
        let mut proj: Vec<NodeId> = Vec::with_capacity(self.roots.len());
        for &r in &self.roots {
            let r0 = restrict(&mut work, r, var, false);
            let r1 = restrict(&mut work, r, var, true);
            let joined = combine_same(
                &mut work,
                r0,
                r1,
                &mut |t0, t1| {
                    let s0 = sets.singleton(t0);
                    let s1 = sets.singleton(t1);
                    sets.union(s0, s1)
                },
                &mut cache_states,
            );
            proj.push(joined);
        }
        // Subset construction.
        let mut subset_ids: HashMap<u32, u32> = HashMap::new(); // set id -> state id
        let mut subsets: Vec<u32> = Vec::new(); // state id -> set id
        let mut intern = |set: u32, subsets: &mut Vec<u32>| -> u32 {
            *subset_ids.entry(set).or_insert_with(|| {
                subsets.push(set);
                (subsets.len() - 1) as u32
            })
        };
        let mut cache_union: HashMap<(NodeId, NodeId), NodeId> = HashMap::new();
        let init_set = sets.singleton(self.initial);
        let init = intern(init_set, &mut subsets);
        let mut roots: Vec<NodeId> = Vec::new();
        let mut done = 0usize;
        while done < subsets.len() {
            if subsets.len() > cap {
                return Err(CapExceeded(subsets.len()));
            }
            let members: Vec<u32> = sets.get(subsets[done]).to_vec();
            let mut acc = proj[members[0] as usize];
            for &s in &members[1..] {
                acc = combine_same(
                    &mut work,
                    acc,
                    proj[s as usize],
                    &mut |u, v| sets.union(u, v),
                    &mut cache_union,
                );
            }
            // Terminals are set ids; map them to subset-state ids.
            let mut memo = HashMap::new();
            let root = work.map_terminals(acc, &mut |t| intern(t, &mut subsets), &mut memo);
            roots.push(root);
            done += 1;
        }
        let accepting = subsets
            .iter()
            .map(|&set| sets.get(set).iter().any(|&s| self.accepting[s as usize]))
            .collect();
        Ok(Dfa {
            mgr: work,
            roots,
            accepting,
            initial: init,
        })
    }

    /// Drops unreachable states.
    fn prune(&self) -> Self {
        let mut map: HashMap<u32, u32> = HashMap::new();
        let mut order: Vec<u32> = Vec::new();
        let mut queue = VecDeque::new();
        map.insert(self.initial, 0);
        order.push(self.initial);
        queue.push_back(self.initial);
        while let Some(s) = queue.pop_front() {
            let mut terms = Vec::new();
            self.mgr.terminals_of(self.roots[s as usize], &mut terms);
            for t in terms {
                if !map.contains_key(&t) {
                    map.insert(t, order.len() as u32);
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        let mut mgr = Mtbdd::new();
        let mut memo = HashMap::new();
        let roots = order
            .iter()
            .map(|&old| {
                rebuild(
                    &self.mgr,
                    self.roots[old as usize],
                    &mut mgr,
                    &mut |t| map[&t],
                    &mut memo,
                )
            })
            .collect();
        let accepting = order
            .iter()
            .map(|&old| self.accepting[old as usize])
            .collect();
        Dfa {
            mgr,
            roots,
            accepting,
            initial: 0,
        }
    }

    /// Moore partition refinement followed by a canonical breadth-first
    /// renumbering; the result is the unique minimal automaton.
    pub fn minimize(&self) -> Self {
        let pruned = self.prune();
        let n = pruned.roots.len();
        // Initial partition by acceptance, classes numbered by first use.
        let mut class: Vec<u32> = Vec::with_capacity(n);
        {
            let mut ids: HashMap<bool, u32> = HashMap::new();
            for &a in &pruned.accepting {
                let next = ids.len() as u32;
                class.push(*ids.entry(a).or_insert(next));
            }
        }
        let mut count = class.iter().collect::<BTreeSet<_>>().len();
        let mut mgr = pruned.mgr.clone();
        loop {
            let mut memo = HashMap::new();
            let sigs: Vec<NodeId> = pruned
                .roots
                .iter()
                .map(|&r| mgr.map_terminals(r, &mut |t| class[t as usize], &mut memo))
                .collect();
            let mut ids: HashMap<(u32, NodeId), u32> = HashMap::new();
            let mut next_class: Vec<u32> = Vec::with_capacity(n);
            for s in 0..n {
                let key = (class[s], sigs[s]);
                let next = ids.len() as u32;
                next_class.push(*ids.entry(key).or_insert(next));
            }
            let next_count = ids.len();
            if next_count == count {
                // Stable: the renumbering is the identity, so the signature
                // terminals already name the final classes.
                debug_assert_eq!(class, next_class);
                return build_quotient(&pruned, &mgr, &class, &sigs);
            }
            class = next_class;
            count = next_count;
        }
    }

    /// Structural isomorphism of two minimized automata.
    pub fn isomorphic(a: &Dfa, b: &Dfa) -> bool {
        if a.roots.len() != b.roots.len() || a.initial != b.initial {
            return false;
        }
        if a.accepting != b.accepting {
            return false;
        }
        let mut memo = HashMap::new();
        (0..a.roots.len()).all(|s| eq_nodes(&a.mgr, a.roots[s], &b.mgr, b.roots[s], &mut memo))
    }

    /// Enumerates (cube, successor) transitions of a state, low edges first.
    pub fn edges(&self, state: u32) -> Vec<(Vec<(Var, bool)>, u32)> {
        self.mgr.paths(self.roots[state as usize])
    }

    /// Tracks the automaton actually tests.
    pub fn support(&self) -> Vec<Var> {
        let mut vars = Vec::new();
        for &r in &self.roots {
            self.mgr.support(r, &mut vars);
        }
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Deterministic textual dump with don't-care patterns over the support
    /// tracks.
    pub fn dump(&self, track_name: &impl Fn(Var) -> String) -> String {
        let support = self.support();
        let mut out = String::new();
        out.push_str(&format!(
            "tracks: {}\n",
            support
                .iter()
                .map(|&v| track_name(v))
                .collect::<Vec<_>>()
                .join(" ")
        ));
        out.push_str(&format!("states: {}\n", self.roots.len()));
        out.push_str(&format!("initial: {}\n", self.initial));
        let acc: Vec<String> = (0..self.roots.len() as u32)
            .filter(|&s| self.accepting[s as usize])
            .map(|s| s.to_string())
            .collect();
        out.push_str(&format!("accepting: {}\n", acc.join(" ")));
        for s in 0..self.roots.len() as u32 {
            out.push_str(&format!("state {s}:\n"));
            for (cube, target) in self.edges(s) {
                let pattern: String = support
                    .iter()
                    .map(|v| match cube.iter().find(|(cv, _)| cv == v) {
                        Some((_, true)) => '1',
                        Some((_, false)) => '0',
                        None => 'X',
                    })
                    .collect();
                let pattern = if pattern.is_empty() {
                    "-".to_string()
                } else {
                    pattern
                };
                out.push_str(&format!("  {pattern} -> {target}\n"));
            }
        }
        out
    }
}

/// Imports a function into another manager while remapping its terminals.
fn rebuild(
    src: &Mtbdd,
    n: NodeId,
    dst: &mut Mtbdd,
    tmap: &mut impl FnMut(u32) -> u32,
    memo: &mut HashMap<NodeId, NodeId>,
) -> NodeId {
    if let Some(&r) = memo.get(&n) {
        return r;
    }
    let r = if is_terminal(n) {
        terminal(tmap(bdd::terminal_value(n)))
    } else {
        let lo = rebuild(src, src.lo(n), dst, tmap, memo);
        let hi = rebuild(src, src.hi(n), dst, tmap, memo);
        dst.node(src.var_of(n), lo, hi)
    };
    memo.insert(n, r);
    r
}

/// Deep restriction `var := bit` (the manager may gain nodes).
fn restrict(mgr: &mut Mtbdd, n: NodeId, var: Var, bit: bool) -> NodeId {
    fn rec(
        mgr: &mut Mtbdd,
        n: NodeId,
        var: Var,
        bit: bool,
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> NodeId {
        if is_terminal(n) || mgr.var_of(n) > var {
            return n;
        }
        if let Some(&r) = memo.get(&n) {
            return r;
        }
        let v = mgr.var_of(n);
        let r = if v == var {
            if bit {
                mgr.hi(n)
            } else {
                mgr.lo(n)
            }
        } else {
            let lo = rec(mgr, mgr.lo(n), var, bit, memo);
            let hi = rec(mgr, mgr.hi(n), var, bit, memo);
            mgr.node(v, lo, hi)
        };
        memo.insert(n, r);
        r
    }
    let mut memo = HashMap::new();
    rec(mgr, n, var, bit, &mut memo)
}

/// `combine` specialised to one manager (nodes are only appended, so data is
/// copied out before recursing).
fn combine_same(
    mgr: &mut Mtbdd,
    na: NodeId,
    nb: NodeId,
    f: &mut impl FnMut(u32, u32) -> u32,
    cache: &mut HashMap<(NodeId, NodeId), NodeId>,
) -> NodeId {
    if let Some(&r) = cache.get(&(na, nb)) {
        return r;
    }
    let r = if is_terminal(na) && is_terminal(nb) {
        terminal(f(bdd::terminal_value(na), bdd::terminal_value(nb)))
    } else {
        let va = mgr.var_of(na);
        let vb = mgr.var_of(nb);
        let v = va.min(vb);
        let (la, ha) = if va == v {
            (mgr.lo(na), mgr.hi(na))
        } else {
            (na, na)
        };
        let (lb, hb) = if vb == v {
            (mgr.lo(nb), mgr.hi(nb))
        } else {
            (nb, nb)
        };
        let lo = combine_same(mgr, la, lb, f, cache);
        let hi = combine_same(mgr, ha, hb, f, cache);
        mgr.node(v, lo, hi)
    };
    cache.insert((na, nb), r);
    r
}

#[derive(Default)]
struct SetTable {
    sets: Vec<Vec<u32>>,
    ids: HashMap<Vec<u32>, u32>,
    union_memo: HashMap<(u32, u32), u32>,
    singleton_memo: HashMap<u32, u32>,
}

impl SetTable {
    fn intern(&mut self, set: Vec<u32>) -> u32 {
        if let Some(&id) = self.ids.get(&set) {
            return id;
        }
        let id = self.sets.len() as u32;
        self.sets.push(set.clone());
        self.ids.insert(set, id);
        id
    }

    fn singleton(&mut self, s: u32) -> u32 {
        if let Some(&id) = self.singleton_memo.get(&s) {
            return id;
        }
        let id = self.intern(vec![s]);
        self.singleton_memo.insert(s, id);
        id
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        if a == b {
            return a;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&id) = self.union_memo.get(&key) {
            return id;
        }
        let mut merged: Vec<u32> = self.sets[a as usize]
            .iter()
            .chain(self.sets[b as usize].iter())
            .copied()
            .collect();
        merged.sort_unstable();
        merged.dedup();
        let id = self.intern(merged);
        self.union_memo.insert(key, id);
        id
    }

    fn get(&self, id: u32) -> &[u32] {
        &self.sets[id as usize]
    }
}

fn build_quotient(pruned: &Dfa, sig_mgr: &Mtbdd, class: &[u32], sigs: &[NodeId]) -> Dfa {
    let num_classes = class.iter().collect::<BTreeSet<_>>().len();
    // Representative root per class: the signature of any member (they agree).
    let mut class_root: Vec<Option<NodeId>> = vec![None; num_classes];
    let mut class_accepting = vec![false; num_classes];
    for s in 0..pruned.roots.len() {
        let c = class[s] as usize;
        if class_root[c].is_none() {
            class_root[c] = Some(sigs[s]);
            class_accepting[c] = pruned.accepting[s];
        }
    }
    let class_root: Vec<NodeId> = class_root.into_iter().map(Option::unwrap).collect();
    // Canonical breadth-first order over classes, edges in diagram order.
    let init_class = class[pruned.initial as usize];
    let mut order: Vec<u32> = vec![init_class];
    let mut new_id: HashMap<u32, u32> = HashMap::from([(init_class, 0)]);
    let mut qi = 0usize;
    while qi < order.len() {
        let c = order[qi];
        qi += 1;
        for (_, t) in sig_mgr.paths(class_root[c as usize]) {
            if !new_id.contains_key(&t) {
                new_id.insert(t, order.len() as u32);
                order.push(t);
            }
        }
    }
    let mut mgr = Mtbdd::new();
    let mut memo = HashMap::new();
    let mut roots = Vec::with_capacity(order.len());
    for &c in &order {
        roots.push(rebuild(
            sig_mgr,
            class_root[c as usize],
            &mut mgr,
            &mut |t| new_id[&t],
            &mut memo,
        ));
    }
    let accepting = order
        .iter()
        .map(|&c| class_accepting[c as usize])
        .collect();
    Dfa {
        mgr,
        roots,
        accepting,
        initial: 0,
    }
}

fn eq_nodes(
    ma: &Mtbdd,
    na: NodeId,
    mb: &Mtbdd,
    nb: NodeId,
    memo: &mut HashMap<(NodeId, NodeId), bool>,
) -> bool {
    if let Some(&r) = memo.get(&(na, nb)) {
        return r;
    }
    let r = match (is_terminal(na), is_terminal(nb)) {
        (true, true) => na == nb,
        (false, false) => {
            ma.var_of(na) == mb.var_of(nb)
                && eq_nodes(ma, ma.lo(na), mb, mb.lo(nb), memo)
                && eq_nodes(ma, ma.hi(na), mb, mb.hi(nb), memo)
        }
        _ => false,
    };
    memo.insert((na, nb), r);
    r
}

/// Compares two letters as bit strings with the lowest track most
/// significant and 0 < 1.
pub fn cmp_letters(a: &Letter, b: &Letter) -> std::cmp::Ordering {
    let mut ia = a.iter();
    let mut ib = b.iter();
    loop {
        match (ia.clone().next(), ib.clone().next()) {
            (None, None) => return std::cmp::Ordering::Equal,
            (None, Some(_)) => return std::cmp::Ordering::Less,
            (Some(_), None) => return std::cmp::Ordering::Greater,
            (Some(&va), Some(&vb)) => {
                if va == vb {
                    ia.next();
                    ib.next();
                } else if va < vb {
                    // `a` has a 1 where `b` has a 0 at track va.
                    return std::cmp::Ordering::Greater;
                } else {
                    return std::cmp::Ordering::Less;
                }
            }
        }
    }
}

/// The lexicographically smallest shortest word accepted by every automaton,
/// or `None` when the intersection is empty. On-the-fly product breadth-first
/// search; never materializes the product automaton.
pub fn intersection_witness(
    dfas: &[&Dfa],
    cap: usize,
) -> Result<Option<Vec<Letter>>, CapExceeded> {
    assert!(!dfas.is_empty());
    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut tuples: Vec<Vec<u32>> = Vec::new();
    let mut parent: Vec<Option<(u32, Letter)>> = Vec::new();
    let start: Vec<u32> = dfas.iter().map(|d| d.initial).collect();
    ids.insert(start.clone(), 0);
    tuples.push(start);
    parent.push(None);
    let mut queue: VecDeque<u32> = VecDeque::from([0]);
    let accepting =
        |tuple: &[u32]| tuple.iter().zip(dfas).all(|(&s, d)| d.is_accepting(s));
    if accepting(&tuples[0]) {
        return Ok(Some(Vec::new()));
    }
    while let Some(cur) = queue.pop_front() {
        // Merge the per-component transition cubes into joint letters.
        let tuple = tuples[cur as usize].clone();
        let mut joint: Vec<(Letter, Vec<(Var, bool)>, Vec<u32>)> =
            vec![(Letter::new(), Vec::new(), Vec::new())];
        for (d, &s) in dfas.iter().zip(&tuple) {
            let mut next_joint = Vec::new();
            for (cube, target) in d.edges(s) {
                'outer: for (letter, constraints, targets) in &joint {
                    // Check cube compatibility with accumulated constraints.
                    for &(v, b) in &cube {
                        if constraints.iter().any(|&(cv, cb)| cv == v && cb != b) {
                            continue 'outer;
                        }
                    }
                    let mut letter = letter.clone();
                    let mut constraints = constraints.clone();
                    for &(v, b) in &cube {
                        if !constraints.iter().any(|&(cv, _)| cv == v) {
                            constraints.push((v, b));
                        }
                        if b {
                            letter.insert(v);
                        }
                    }
                    let mut targets = targets.clone();
                    targets.push(target);
                    next_joint.push((letter, constraints, targets));
                }
            }
            joint = next_joint;
        }
        joint.sort_by(|a, b| cmp_letters(&a.0, &b.0));
        for (letter, _, targets) in joint {
            if !ids.contains_key(&targets) {
                if tuples.len() >= cap {
                    return Err(CapExceeded(tuples.len()));
                }
                let id = tuples.len() as u32;
                ids.insert(targets.clone(), id);
                tuples.push(targets.clone());
                parent.push(Some((cur, letter)));
                if accepting(&targets) {
                    // Reconstruct.
                    let mut word = Vec::new();
                    let mut at = id;
                    while let Some((prev, letter)) = &parent[at as usize] {
                        word.push(letter.clone());
                        at = *prev;
                    }
                    word.reverse();
                    return Ok(Some(word));
                }
                queue.push_back(id);
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdd::{table1, table2};

    /// Accepts words over track 0 with an odd number of 1s.
    fn odd_ones() -> Dfa {
        Dfa::from_parts(vec![false, true], 0, |mgr| {
            vec![table1(mgr, 0, 0, 1), table1(mgr, 0, 1, 0)]
        })
    }

    /// Accepts words whose track-1 bits are all zero.
    fn track1_clear() -> Dfa {
        Dfa::from_parts(vec![true, false], 0, |mgr| {
            vec![table1(mgr, 1, 0, 1), terminal(1)]
        })
    }

    fn letter(bits: &[Var]) -> Letter {
        bits.iter().copied().collect()
    }

    #[test]
    fn run_and_complement() {
        let a = odd_ones();
        assert!(!a.accepts_word(&[]));
        assert!(a.accepts_word(&[letter(&[0])]));
        assert!(!a.accepts_word(&[letter(&[0]), letter(&[0])]));
        let c = a.complement();
        assert!(c.accepts_word(&[]));
        assert!(!c.accepts_word(&[letter(&[0])]));
    }

    #[test]
    fn product_intersects_languages() {
        let p = Dfa::product(&odd_ones(), &track1_clear(), |x, y| x && y, 1 << 20).unwrap();
        assert!(p.accepts_word(&[letter(&[0])]));
        assert!(!p.accepts_word(&[letter(&[0, 1])]));
        assert!(!p.accepts_word(&[letter(&[1]), letter(&[0])]));
        assert!(p.accepts_word(&[letter(&[0]), letter(&[]), letter(&[0]), letter(&[0])]));
    }

    #[test]
    fn projection_is_existential() {
        // odd number of 1s on track 1; projecting track 1 leaves everything
        // reachable: any word length >= 1 has an extension with odd count...
        // including length 0? No: the empty word has no extension choices, it
        // stays empty with zero 1s. So the projection accepts exactly
        // non-empty words... of any content, and rejects the empty word.
        let odd_on_1 = Dfa::from_parts(vec![false, true], 0, |mgr| {
            vec![table1(mgr, 1, 0, 1), table1(mgr, 1, 1, 0)]
        });
        let proj = odd_on_1.project(1, 1 << 20).unwrap().minimize();
        assert!(!proj.accepts_word(&[]));
        assert!(proj.accepts_word(&[letter(&[])]));
        assert!(proj.accepts_word(&[letter(&[0]), letter(&[])]));
        assert_eq!(proj.num_states(), 2);
    }

    #[test]
    fn minimize_collapses_equivalent_states() {
        // Two states both accepting with identical behavior.
        let redundant = Dfa::from_parts(vec![false, true, true], 0, |mgr| {
            let to1or2 = table1(mgr, 0, 1, 2);
            vec![to1or2, to1or2, to1or2]
        });
        let min = redundant.minimize();
        assert_eq!(min.num_states(), 2);
        assert!(min.accepts_word(&[letter(&[])]));
        // Idempotent.
        let again = min.minimize();
        assert!(Dfa::isomorphic(&min, &again));
    }

    #[test]
    fn minimized_equivalent_automata_are_isomorphic() {
        // "odd ones" built with different state layouts.
        let variant = Dfa::from_parts(vec![true, false, true], 1, |mgr| {
            let a = table1(mgr, 0, 1, 0);
            let b = table1(mgr, 0, 0, 2);
            let c = table1(mgr, 0, 2, 1);
            vec![a, b, c]
        });
        // variant: state1 --1--> state0(acc) --1--> state1 ; state2 behaves
        // like state0.
        let m1 = odd_ones().minimize();
        let m2 = variant.minimize();
        assert!(Dfa::isomorphic(&m1, &m2));
        assert!(!Dfa::isomorphic(&m1, &m1.complement().minimize()));
    }

    #[test]
    fn witness_is_shortest_and_lex_smallest() {
        // Intersection: odd ones on track 0, track 1 clear.
        let a = odd_ones();
        let b = track1_clear();
        let w = intersection_witness(&[&a, &b], 1 << 20).unwrap().unwrap();
        assert_eq!(w, vec![letter(&[0])]);
        // Empty intersection: odd ones and its complement.
        let c = a.complement();
        assert_eq!(intersection_witness(&[&a, &c], 1 << 20).unwrap(), None);
    }

    #[test]
    fn dump_is_deterministic() {
        let a = odd_ones().minimize();
        let d1 = a.dump(&|v| format!("t{v}"));
        let d2 = a.dump(&|v| format!("t{v}"));
        assert_eq!(d1, d2);
        assert!(d1.contains("tracks: t0"));
    }

    #[test]
    fn cap_is_enforced() {
        let a = odd_ones();
        let b = track1_clear();
        assert!(matches!(
            Dfa::product(&a, &b, |x, y| x && y, 1),
            Err(CapExceeded(_))
        ));
    }

    #[test]
    fn letter_ordering() {
        use std::cmp::Ordering;
        // 00 < 01 < 10 < 11 over tracks {0,1}.
        let l00 = letter(&[]);
        let l01 = letter(&[1]);
        let l10 = letter(&[0]);
        let l11 = letter(&[0, 1]);
        assert_eq!(cmp_letters(&l00, &l01), Ordering::Less);
        assert_eq!(cmp_letters(&l01, &l10), Ordering::Less);
        assert_eq!(cmp_letters(&l10, &l11), Ordering::Less);
        assert_eq!(cmp_letters(&l11, &l11), Ordering::Equal);
    }
}
