//! Layered low-rank move sequences.
//!
//! Layer `V_k` has `N_k = N_1 * 3^(k-1)` nodes. The sequence is `L` blocks;
//! block `i` moves `v_{k, i mod N_k}` for `k = 1..d` in order. `V_1` is joined
//! to every other layer and there are no other edges. Every arc of a node in
//! `V_k`, `k >= 2`, contains each `V_1` node `3^(k-1)` times, so all arcs of
//! that node share one improvement vector and substrings have low rank.

use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::arcs::{default_vectors, find_arcs, Arc, MoveSequence};
use crate::ensure_invariant;
use crate::error::{Error, Result};
use crate::instance::{Graph, NodeId};
use crate::rank::{RankBasis, SparseVec};

/// Longest sequence accepted by a full substring scan.
pub const FULL_SCAN_LIMIT: usize = 2000;

#[derive(Clone, Debug)]
pub struct HardInstance {
    pub d: usize,
    pub n1: usize,
    pub blocks: usize,
    /// `N_k` for `k = 1..=d` at index `k - 1`.
    pub sizes: Vec<usize>,
    pub graph: Graph,
    pub seq: MoveSequence,
}

impl HardInstance {
    /// Node id of `v_{k,j}` (`k` 1-based, `j` 0-based).
    pub fn node(&self, k: usize, j: usize) -> NodeId {
        1 + self.sizes[..k - 1].iter().sum::<usize>() + j
    }

    /// Layer of a node id.
    pub fn layer_of(&self, v: NodeId) -> usize {
        let mut acc = 0;
        for (i, &nk) in self.sizes.iter().enumerate() {
            acc += nk;
            if v <= acc {
                return i + 1;
            }
        }
        panic!("node {v} outside the instance")
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// The counting bound on the rank of any `t`-block substring:
    /// `sum_{k=2}^{k*} N_k + N_1 * ceil(t / N_1)` with `k*` the largest `k`
    /// such that `N_k + 1 <= t`.
    pub fn counting_bound(&self, t: usize) -> usize {
        let mid: usize = self.sizes.iter().skip(1).filter(|&&nk| nk < t).sum();
        mid + self.n1 * t.div_ceil(self.n1)
    }
}

pub fn build_hard(d: usize, n1: usize, blocks: usize) -> Result<HardInstance> {
    if d == 0 || n1 == 0 || blocks == 0 {
        return Err(Error::validation(format!("need d, N1, L >= 1, got d={d}, N1={n1}, L={blocks}")));
    }
    let mut sizes = Vec::with_capacity(d);
    let mut nk = n1;
    for _ in 0..d {
        sizes.push(nk);
        nk = nk.checked_mul(3).ok_or_else(|| Error::validation("layer sizes overflow"))?;
    }
    let n: usize = sizes.iter().sum();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let mut edges = Vec::new();
    for u in 1..=n1 {
        for v in n1 + 1..=n {
            edges.push((u, v));
        }
    }
    let graph = Graph::new(n, edges)?;
    let mut moves = Vec::with_capacity(blocks * d);
    for i in 0..blocks {
        for k in 0..d {
            moves.push(1 + offsets[k] + i % sizes[k]);
        }
    }
    let seq = MoveSequence::new(n, moves)?;
    Ok(HardInstance { d, n1, blocks, sizes, graph, seq })
}

/// Large-`n` parameters: `d = floor(0.1 log3 n)`, `N1 = ceil(n^0.1)`, `L = ceil(5n/d)`.
pub fn preset_params(n: usize) -> Result<(usize, usize, usize)> {
    let d = (0.1 * (n as f64).ln() / 3f64.ln()).floor() as usize;
    if d == 0 {
        return Err(Error::Precondition(format!("n = {n} too small for d = floor(0.1 log3 n) >= 1 (need n >= 3^10)")));
    }
    let n1 = (n as f64).powf(0.1).ceil() as usize;
    Ok((d, n1, (5 * n).div_ceil(d)))
}

pub fn preset(n: usize) -> Result<HardInstance> {
    let (d, n1, l) = preset_params(n)?;
    build_hard(d, n1, l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScanMode {
    Full,
    BlockAligned,
}

impl FromStr for ScanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ScanMode::Full),
            "block" | "block-aligned" => Ok(ScanMode::BlockAligned),
            _ => Err(Error::validation(format!("unknown scan mode {s:?} (full|block)"))),
        }
    }
}

/// One scanned substring `[start, start + len - 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub start: usize,
    pub len: usize,
    pub rank: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    pub mode: ScanMode,
    pub max_ratio: f64,
    pub argmax: Option<ScanRow>,
    /// Block-aligned substrings whose rank was checked against the counting bound.
    pub bound_checks: usize,
    pub rows: Vec<ScanRow>,
}

/// Exact rank of every scanned substring, with the counting bound asserted on
/// block-aligned ones. `threads = 0` uses the global pool.
pub fn scan(inst: &HardInstance, mode: ScanMode, threads: usize) -> Result<ScanResult> {
    let m = inst.len();
    if mode == ScanMode::Full && m > FULL_SCAN_LIMIT {
        return Err(Error::Refused(format!("full scan of length {m} exceeds the limit {FULL_SCAN_LIMIT}")));
    }
    let arcs = find_arcs(&inst.seq);
    let vecs = default_vectors(&inst.seq, &arcs, &inst.graph);
    // arc ending at each position, if any
    let mut ending: Vec<Option<(usize, usize)>> = vec![None; m + 1];
    for (i, a) in arcs.iter().enumerate() {
        ending[a.right] = Some((a.left, i));
    }
    let d = inst.d;
    let starts: Vec<usize> = match mode {
        ScanMode::Full => (1..=m).collect(),
        ScanMode::BlockAligned => (0..inst.blocks).map(|b| b * d + 1).collect(),
    };
    let run = |start: usize| -> Result<(Vec<ScanRow>, usize)> {
        let mut basis = RankBasis::new();
        let mut rows = Vec::new();
        let mut checks = 0;
        for end in start..=m {
            if let Some((left, i)) = ending[end] {
                if left >= start {
                    basis.insert(&vecs[i]);
                }
            }
            let len = end - start + 1;
            let aligned = len.is_multiple_of(d) && (start - 1).is_multiple_of(d);
            if mode == ScanMode::BlockAligned && !aligned {
                continue;
            }
            let rank = basis.rank();
            if aligned {
                let t = len / d;
                let bound = inst.counting_bound(t);
                ensure_invariant!(rank <= bound, "substring at {start} of {t} blocks has rank {rank} > bound {bound}");
                checks += 1;
            }
            rows.push(ScanRow { start, len, rank, ratio: rank as f64 / len as f64 });
        }
        Ok((rows, checks))
    };
    let per_start: Vec<Result<(Vec<ScanRow>, usize)>> = if threads == 0 {
        starts.par_iter().map(|&s| run(s)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::validation(format!("thread pool: {e}")))?;
        pool.install(|| starts.par_iter().map(|&s| run(s)).collect())
    };
    let mut rows = Vec::new();
    let mut bound_checks = 0;
    for r in per_start {
        let (rs, c) = r?;
        rows.extend(rs);
        bound_checks += c;
    }
    let argmax = rows.iter().copied().fold(None, |best: Option<ScanRow>, r| match best {
        Some(b) if b.ratio >= r.ratio => Some(b),
        _ => Some(r),
    });
    Ok(ScanResult { mode, max_ratio: argmax.map_or(0.0, |r| r.ratio), argmax, bound_checks, rows })
}

pub fn max_rank_ratio(inst: &HardInstance, mode: ScanMode) -> Result<f64> {
    scan(inst, mode, 0).map(|r| r.max_ratio)
}

/// Structural facts behind the bound: every arc of a `V_k` node (`k >= 2`)
/// contains each `V_1` node exactly `3^(k-1)` times, and all arcs of one such
/// node have equal improvement vectors.
pub fn check_structure(inst: &HardInstance) -> Result<()> {
    let arcs = find_arcs(&inst.seq);
    let vecs = default_vectors(&inst.seq, &arcs, &inst.graph);
    let mut first: std::collections::HashMap<NodeId, &SparseVec> = std::collections::HashMap::new();
    for (a, v) in arcs.iter().zip(&vecs) {
        let k = inst.layer_of(a.node);
        if k < 2 {
            continue;
        }
        let reps = 3usize.pow(k as u32 - 1);
        for j in 0..inst.n1 {
            let u = inst.node(1, j);
            let c = inst.seq.count_in(u, a.left + 1, a.right - 1);
            ensure_invariant!(
                c == reps,
                "arc ({}, {}) of layer {k} holds node {u} {c} times, expected {reps}",
                a.left,
                a.right
            );
        }
        ensure_invariant!(v.len() == inst.n1, "arc ({}, {}) does not have full V_1 support", a.left, a.right);
        let f = first.entry(a.node).or_insert(v);
        ensure_invariant!(*f == v, "arcs of node {} have different vectors", a.node);
    }
    Ok(())
}

/// Arcs of the substring `[start, end]`.
pub fn substring_arcs(inst: &HardInstance, start: usize, end: usize) -> Vec<Arc> {
    find_arcs(&inst.seq).into_iter().filter(|a| a.left >= start && a.right <= end).collect()
}
