//! Seeded random history and execution generators: the fuzzing substrate for
//! every property suite. Outputs are valid by construction.

use crate::history::{
    AbstractExecution, History, MetaParams, ObjId, OpId, OpType, OpVal, Operation, ProcId, Time,
    ValId,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub num_procs: usize,
    pub num_ops: usize,
    pub num_objs: usize,
    pub num_vals: usize,
    /// Probability of starting a new operation while others run.
    pub overlap: f64,
    /// Probability of drawing each candidate visibility edge.
    pub vis_density: f64,
    /// Transience bound used by [`gen_exec`].
    pub k: usize,
    /// Draw arbitration as a linear extension of returns-before and restrict
    /// visibility accordingly. Disable to get arbitrary executions for the
    /// evaluator-only paths.
    pub real_time: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            num_procs: 2,
            num_ops: 6,
            num_objs: 1,
            num_vals: 2,
            overlap: 0.5,
            vis_density: 0.5,
            k: 1,
            real_time: true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("generator config requires at least one {0}")]
    ZeroSize(&'static str),
}

fn check_cfg(cfg: &GeneratorConfig) -> Result<(), GenError> {
    if cfg.num_procs == 0 {
        return Err(GenError::ZeroSize("process"));
    }
    if cfg.num_objs == 0 {
        return Err(GenError::ZeroSize("object"));
    }
    if cfg.num_vals == 0 {
        return Err(GenError::ZeroSize("value"));
    }
    Ok(())
}

/// Generates a valid history: distinct integer timestamps `1..=2n`, disjoint
/// per-process intervals, writes carrying a value and an empty output, reads
/// carrying a value, the empty value, or undef.
pub fn gen_history(cfg: &GeneratorConfig) -> Result<History, GenError> {
    check_cfg(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    gen_history_with(&mut rng, cfg)
}

pub(crate) fn gen_history_with<R: Rng>(rng: &mut R, cfg: &GeneratorConfig) -> Result<History, GenError> {
    check_cfg(cfg)?;
    let meta = MetaParams::canonical(cfg.num_procs, cfg.num_objs, cfg.num_vals);
    let n = cfg.num_ops;
    // Walk the 2n integer instants, at each either starting an operation on
    // an idle process or returning a running one.
    let mut running: Vec<Option<usize>> = vec![None; cfg.num_procs];
    let mut intervals: Vec<(usize, i64, i64)> = Vec::new(); // (proc, stime, rtime)
    let mut started = 0usize;
    for t in 1..=(2 * n as i64) {
        let idle: Vec<usize> = (0..cfg.num_procs).filter(|&p| running[p].is_none()).collect();
        let active: Vec<usize> = (0..cfg.num_procs).filter(|&p| running[p].is_some()).collect();
        let can_start = started < n && !idle.is_empty();
        let can_close = !active.is_empty();
        let start = if can_start && can_close {
            rng.gen_bool(cfg.overlap.clamp(0.0, 1.0))
        } else {
            can_start
        };
        if start {
            let p = idle[rng.gen_range(0..idle.len())];
            running[p] = Some(intervals.len());
            intervals.push((p, t, 0));
            started += 1;
        } else {
            let p = active[rng.gen_range(0..active.len())];
            let ix = running[p].take().unwrap();
            intervals[ix].2 = t;
        }
    }
    let ops = intervals
        .into_iter()
        .enumerate()
        .map(|(i, (p, s, r))| {
            let kind = if rng.gen_bool(0.5) {
                OpType::Write
            } else {
                OpType::Read
            };
            let obj = ObjId(rng.gen_range(0..cfg.num_objs));
            let (ival, oval) = match kind {
                OpType::Write => (OpVal::Val(ValId(rng.gen_range(0..cfg.num_vals))), OpVal::Empty),
                OpType::Read => {
                    let roll: f64 = rng.gen();
                    let oval = if roll < 0.70 {
                        OpVal::Val(ValId(rng.gen_range(0..cfg.num_vals)))
                    } else if roll < 0.85 {
                        OpVal::Empty
                    } else {
                        OpVal::Undef
                    };
                    (OpVal::Empty, oval)
                }
            };
            Operation {
                id: OpId::new(format!("e{}", i + 1)),
                proc: ProcId(p),
                stime: Time::int(s),
                rtime: Time::int(r),
                kind,
                obj,
                ival,
                oval,
            }
        })
        .collect();
    Ok(History::new(meta, ops).expect("generated history is well-formed"))
}

/// Generates an abstract execution. In real-time mode arbitration is a random
/// linear extension of returns-before and visibility is drawn from the
/// word-encodable fragment (forward along returns-before, transience-frozen
/// beyond index `k-1`, plus at most one edge per operation to its most
/// recently started concurrent predecessor), then cycles are broken.
pub fn gen_exec(cfg: &GeneratorConfig) -> Result<AbstractExecution, GenError> {
    check_cfg(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let h = gen_history_with(&mut rng, cfg)?;
    let n = h.len();

    let ar = if cfg.real_time {
        random_linear_extension(&mut rng, &h)
    } else {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        order_pairs(&perm)
    };

    let mut vis: BTreeSet<(usize, usize)> = BTreeSet::new();
    if cfg.real_time {
        let density = cfg.vis_density.clamp(0.0, 1.0);
        for a in 0..n {
            // Returns-before targets: explicit up to k, frozen beyond.
            for p in 0..h.meta().num_procs() {
                let chain = h.successors_chain_on(a, ProcId(p));
                let mut frozen = false;
                for (i, &b) in chain.iter().enumerate() {
                    if i < cfg.k {
                        let on = rng.gen_bool(density);
                        if on {
                            vis.insert((a, b));
                        }
                        if i == cfg.k.saturating_sub(1) {
                            frozen = on;
                        }
                    } else if cfg.k > 0 && frozen {
                        vis.insert((a, b));
                    }
                }
            }
            // Concurrent target: the most recently started operation still
            // active when `a` starts.
            if let Some(u) = last_active_predecessor(&h, a) {
                if rng.gen_bool(density) {
                    vis.insert((a, u));
                }
            }
        }
        break_cycles(n, &mut vis, &h);
    } else {
        for a in 0..n {
            for b in 0..n {
                if a != b && !h.rb(b, a) && rng.gen_bool(cfg.vis_density.clamp(0.0, 1.0)) {
                    vis.insert((a, b));
                }
            }
        }
        break_cycles(n, &mut vis, &h);
    }
    Ok(AbstractExecution::new(h, vis, ar).expect("generated execution is well-formed"))
}

/// The operation with the largest start time among those still running when
/// `a` starts.
pub fn last_active_predecessor(h: &History, a: usize) -> Option<usize> {
    let s = h.op(a).stime;
    (0..h.len())
        .filter(|&u| u != a && h.op(u).stime < s && h.op(u).rtime > s)
        .max_by_key(|&u| h.op(u).stime)
}

fn order_pairs(perm: &[usize]) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            out.insert((perm[i], perm[j]));
        }
    }
    out
}

fn random_linear_extension<R: Rng>(rng: &mut R, h: &History) -> BTreeSet<(usize, usize)> {
    let n = h.len();
    let mut remaining: BTreeSet<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    while !remaining.is_empty() {
        let minimal: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&b| !remaining.iter().any(|&a| a != b && h.rb(a, b)))
            .collect();
        let pick = minimal[rng.gen_range(0..minimal.len())];
        remaining.remove(&pick);
        order.push(pick);
    }
    order_pairs(&order)
}

/// Removes visibility edges until acyclic, dropping the smallest edge found
/// on a cycle first; edges along returns-before can never cycle on their own.
fn break_cycles(n: usize, vis: &mut BTreeSet<(usize, usize)>, h: &History) {
    loop {
        match find_cycle_edge(n, vis) {
            None => return,
            Some(edge) => {
                // Prefer removing a non-rb edge from the cycle.
                let victim = if h.rb(edge.0, edge.1) {
                    vis.iter()
                        .copied()
                        .find(|&(a, b)| !h.rb(a, b))
                        .unwrap_or(edge)
                } else {
                    edge
                };
                vis.remove(&victim);
            }
        }
    }
}

fn find_cycle_edge(n: usize, edges: &BTreeSet<(usize, usize)>) -> Option<(usize, usize)> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
    }
    let mut state = vec![0u8; n];
    fn dfs(
        v: usize,
        adj: &[Vec<usize>],
        state: &mut [u8],
    ) -> Option<(usize, usize)> {
        state[v] = 1;
        for &w in &adj[v] {
            if state[w] == 1 {
                return Some((v, w));
            }
            if state[w] == 0 {
                if let Some(e) = dfs(w, adj, state) {
                    return Some(e);
                }
            }
        }
        state[v] = 2;
        None
    }
    (0..n).find_map(|v| {
        if state[v] == 0 {
            dfs(v, &adj, &mut state)
        } else {
            None
        }
    })
}
