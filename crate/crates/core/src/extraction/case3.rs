//! Short-arc cases: overlap quantiles and deletion of non-overlapping pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::{cases, CaseTag, Certificate, Context};
use crate::arcs::{find_arcs, find_dense_interval, interior, Arc, Interval, MoveSequence, Radius};
use crate::ensure_invariant;
use crate::error::{Error, Result};
use crate::flip::replay;
use crate::instance::{Graph, NodeId};

/// Arcs of `H_I` endpoint-disjoint from `C`, split by whether they overlap
/// some arc of `C`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct OverlapReport {
    /// Each arc paired with its witness: the first arc of `C` (by left endpoint) it overlaps.
    pub overlap: Vec<(Arc, Arc)>,
    pub nonoverlap: Vec<Arc>,
}

impl OverlapReport {
    pub fn nonoverlap_set(&self) -> HashSet<(usize, usize)> {
        self.nonoverlap.iter().map(|a| (a.left, a.right)).collect()
    }

    pub fn overlap_nodes(&self) -> HashMap<NodeId, usize> {
        let mut out = HashMap::new();
        for (b, _) in &self.overlap {
            *out.entry(b.node).or_default() += 1;
        }
        out
    }
}

/// Distinct adjacent nodes with interleaving endpoints.
pub fn overlaps(x: &Arc, y: &Arc, graph: &Graph) -> bool {
    if x.node == y.node || !graph.adjacent(x.node, y.node) {
        return false;
    }
    let (i, j, k, l) = (x.left, x.right, y.left, y.right);
    (i < k && k < j && j < l) || (k < i && i < l && l < j)
}

/// Classify the arcs of `seq` contained in `iv` and endpoint-disjoint from `c`.
pub fn compute_overlap(seq: &MoveSequence, iv: Interval, c: &[Arc], graph: &Graph) -> OverlapReport {
    let endpoints: HashSet<usize> = c.iter().flat_map(|a| a.endpoints()).collect();
    let mut c_sorted = c.to_vec();
    c_sorted.sort();
    let mut report = OverlapReport::default();
    for a in find_arcs(seq) {
        if !iv.contains_arc(&a) || endpoints.contains(&a.left) || endpoints.contains(&a.right) {
            continue;
        }
        match c_sorted.iter().find(|c| overlaps(&a, c, graph)) {
            Some(wit) => report.overlap.push((a, *wit)),
            None => report.nonoverlap.push(a),
        }
    }
    report
}

/// State shared by the short-arc cases: densest chunk, interval and overlap split.
#[derive(Clone, Debug)]
pub struct ShortArcSetup {
    pub istar: usize,
    pub jstar: usize,
    pub ell: usize,
    pub iv: Interval,
    /// Good short arcs of the chosen chunk contained in `iv`.
    pub c: Vec<Arc>,
    /// Sorted endpoints of the three groups around `istar`.
    pub p: Vec<usize>,
    d3: HashSet<(usize, usize)>,
    d3_in_i: usize,
    pub report: OverlapReport,
}

impl ShortArcSetup {
    /// `|Overlap| >= |D3 ∩ I| + len(I)/sqrt(log2 n)`.
    pub fn overlap_heavy(&self, n: usize) -> bool {
        let sqrt_log = (n as f64).log2().max(1.0).sqrt();
        let lhs = self.report.overlap.len() as f64 * sqrt_log;
        let rhs = self.d3_in_i as f64 * sqrt_log + self.iv.len() as f64;
        lhs >= rhs
    }
}

pub(super) fn case3(ctx: &mut Context, istar: usize) -> Result<Certificate> {
    match short_arc_setup(ctx, istar)? {
        None => {
            ctx.info.last_chunk_fallback = true;
            cases::case30_last_chunks(ctx)
        }
        Some(st) if st.overlap_heavy(ctx.cls.params.n) => case31_quantiles(ctx, &st),
        Some(st) => case32_delete(ctx, &st),
    }
}

/// Pick the chunk `j* <= s-2` of `D_i*` with the most good short arcs, its
/// dense interval and the overlap split. `None` when no such chunk has any.
pub fn short_arc_setup(ctx: &mut Context, istar: usize) -> Result<Option<ShortArcSetup>> {
    let s = ctx.cls.params.s;
    let mut best: Option<(usize, usize)> = None;
    for j in ctx.cls.params.chunks_of_group(istar) {
        if j + 2 > s {
            continue;
        }
        let cnt = ctx.cls.in_chunk(j).filter(|a| a.group == istar && a.good && !a.long).count();
        if cnt > 0 && best.is_none_or(|(b, _)| cnt > b) {
            best = Some((cnt, j));
        }
    }
    let Some((_, jstar)) = best else {
        return Ok(None);
    };
    ctx.info.chunk = Some(jstar);

    let m = ctx.m();
    let cstar: Vec<Arc> =
        ctx.cls.in_chunk(jstar).filter(|a| a.group == istar && a.good && !a.long).map(|a| a.arc).collect();
    let ell = cstar.iter().map(Arc::len).max().unwrap_or(0);
    ensure_invariant!(2 * ell <= m, "chunk {jstar} arc of length {ell} exceeds m/2");
    let d3_infos: Vec<Arc> =
        ctx.cls.arcs.iter().filter(|a| a.group + 1 >= istar && a.group <= istar + 1).map(|a| a.arc).collect();
    let p: Vec<usize> = d3_infos.iter().flat_map(|a| a.endpoints()).collect::<BTreeSet<_>>().into_iter().collect();
    let iv = find_dense_interval(m, &cstar, &p, ell)?;
    let c: Vec<Arc> = cstar.into_iter().filter(|a| iv.contains_arc(a)).collect();
    ensure_invariant!(!c.is_empty(), "dense interval holds no arc of chunk {jstar}");
    let report = compute_overlap(ctx.seq, iv, &c, ctx.graph);
    let d3: HashSet<(usize, usize)> = d3_infos.iter().map(|a| (a.left, a.right)).collect();
    let d3_in_i = d3_infos.iter().filter(|a| iv.contains_arc(a)).count();

    ctx.info.ell = Some(ell);
    ctx.info.interval = Some(iv);
    ctx.info.core_size = c.len();
    ctx.info.overlap = Some(report.overlap.len());
    ctx.info.nonoverlap = Some(report.nonoverlap.len());

    Ok(Some(ShortArcSetup { istar, jstar, ell, iv, c, p, d3, d3_in_i, report }))
}

pub fn case31_quantiles(ctx: &mut Context, st: &ShortArcSetup) -> Result<Certificate> {
    if !st.overlap_heavy(ctx.cls.params.n) {
        return Err(Error::Refused("overlap-quantile case needs a large Overlap".into()));
    }
    // (arc of F, its witness in C)
    let f: Vec<(Arc, Arc)> =
        st.report.overlap.iter().copied().filter(|(a, _)| !st.d3.contains(&(a.left, a.right))).collect();
    ensure_invariant!(!f.is_empty(), "overlap-heavy interval with no overlap arc outside D3");
    ctx.info.f_size = Some(f.len());
    let len = st.iv.len();
    if 4 * len.div_ceil(5) >= len {
        return ctx.contiguous_cert(CaseTag::Degenerate, st.iv, &st.c[..1]);
    }
    let (left, right): (Vec<_>, Vec<_>) = f.iter().partition(|(a, wit)| wit.left < a.left);
    let left_side = left.len() >= right.len();
    let side: Vec<(Arc, Arc)> = if left_side { left } else { right };

    let bound = |i: usize| st.iv.start + i * len / 5;
    let quantile = |p: usize| (1..=5).find(|&i| bound(i - 1) <= p && p < bound(i)).unwrap_or(5);
    let mut classes: BTreeMap<usize, Vec<(Arc, Arc)>> = BTreeMap::new();
    for &(a, wit) in &side {
        let key = if left_side { wit.right } else { wit.left };
        let q = quantile(key);
        if left_side {
            ensure_invariant!(q != 1, "left witness arc ends in the first quantile");
        } else {
            ensure_invariant!(q != 5, "right witness arc starts in the last quantile");
        }
        classes.entry(q).or_default().push((a, wit));
    }
    let mut chosen: Vec<(Arc, Arc)> = Vec::new();
    for (_, v) in classes {
        if v.len() > chosen.len() {
            chosen = v;
        }
    }
    ensure_invariant!(8 * chosen.len() >= f.len(), "largest quantile class {} below |F|/8 = {}", chosen.len(), f.len());
    if left_side {
        chosen.sort_by_key(|(_, wit)| wit.right);
    } else {
        chosen.sort_by_key(|(_, wit)| std::cmp::Reverse(wit.left));
    }
    let arcs: Vec<Arc> = chosen.iter().map(|(a, _)| *a).collect();
    let edges: Vec<(NodeId, NodeId)> = chosen.iter().map(|(a, wit)| (a.node, wit.node)).collect();
    ctx.check_triangular(&arcs, &edges, "overlap-quantile")?;
    let mut q = arcs;
    q.sort();
    let cert = ctx.contiguous_cert(CaseTag::OverlapQuantiles, st.iv, &q)?;
    ensure_invariant!(cert.rank == q.len(), "quantile arcs have rank {} < {}", cert.rank, q.len());
    Ok(cert)
}

pub fn case32_delete(ctx: &mut Context, st: &ShortArcSetup) -> Result<Certificate> {
    if st.overlap_heavy(ctx.cls.params.n) {
        return Err(Error::Refused("deletion case needs a small Overlap".into()));
    }
    let seq = ctx.seq;
    let graph = ctx.graph;
    let iv = st.iv;
    let maxlen_group = ctx.cls.group_maxlen[st.istar];
    let nonoverlap = st.report.nonoverlap_set();
    let overlap_nodes = st.report.overlap_nodes();
    let c_nodes: HashSet<NodeId> = st.c.iter().map(|a| a.node).collect();
    let c_endpoints: BTreeSet<usize> = st.c.iter().flat_map(|a| a.endpoints()).collect();
    let p_set: HashSet<usize> = st.p.iter().copied().collect();
    // interior position -> arc of C containing it
    let mut interior_of: HashMap<usize, Arc> = HashMap::new();
    for a in &st.c {
        for k in interior(seq, a, graph) {
            interior_of.entry(k).or_insert(*a);
        }
    }

    let mut deleted = vec![false; seq.len() + 1];
    let mut tails = 0usize;
    let alive_count = |del: &[bool], u: NodeId, lo: usize, hi: usize| -> usize {
        if lo > hi {
            return 0;
        }
        let occ = seq.occurrences(u);
        let a = occ.partition_point(|&k| k < lo);
        let b = occ.partition_point(|&k| k <= hi);
        occ[a..b].iter().filter(|&&k| !del[k]).count()
    };
    let in_p = |k: usize, what: &str| -> Result<()> {
        ensure_invariant!(p_set.contains(&k), "{what} index {k} is not an endpoint of D3");
        Ok(())
    };
    let delete_pairs = |del: &mut Vec<bool>, ks: &[usize], require: bool| -> Result<()> {
        for pair in ks.chunks(2) {
            if let [a, b] = *pair {
                let nono = nonoverlap.contains(&(a, b));
                if require {
                    ensure_invariant!(nono, "deleted pair ({a}, {b}) is not a non-overlapping arc");
                }
                if nono {
                    del[a] = true;
                    del[b] = true;
                }
            }
        }
        Ok(())
    };

    let nodes: BTreeSet<NodeId> = iv.positions().map(|k| seq.at(k)).collect();
    for &u in &nodes {
        let occ = seq.occurrences(u);
        let ks: Vec<usize> =
            occ[occ.partition_point(|&k| k < iv.start)..occ.partition_point(|&k| k <= iv.end)].to_vec();
        let q = ks.len();
        if q == 1 {
            let k = ks[0];
            if seq.radius(k).exceeds(2 * maxlen_group) {
                deleted[k] = true;
            } else {
                in_p(k, "kept single occurrence")?;
            }
        } else if q.is_multiple_of(2) {
            delete_pairs(&mut deleted, &ks, false)?;
        } else if overlap_nodes.contains_key(&u) || c_nodes.contains(&u) {
            delete_pairs(&mut deleted, &ks[..q - 1], false)?;
            tails += 1;
        } else if ks.iter().all(|k| !interior_of.contains_key(k)) {
            for &k in &ks {
                deleted[k] = true;
            }
        } else {
            let alpha = ks.iter().find_map(|k| interior_of.get(k)).copied().unwrap();
            ensure_invariant!(
                ks.iter().all(|&k| alpha.left < k && k < alpha.right),
                "node {u} has occurrences in I outside the arc ({}, {})",
                alpha.left,
                alpha.right
            );
            let half = |k: usize| match seq.radius(k) {
                Radius::Infinite => true,
                Radius::Finite(r) => 2 * r >= st.ell,
            };
            let (keep, rest) = if half(ks[0]) { (ks[0], &ks[1..]) } else { (ks[q - 1], &ks[..q - 1]) };
            ensure_invariant!(half(keep), "neither end occurrence of node {u} has radius at least l/2");
            delete_pairs(&mut deleted, rest, true)?;
            in_p(keep, "kept odd-count")?;
        }
        check_parity(graph, &st.c, u, &deleted, &alive_count)?;
        ctx.info.parity_batches += 1;
    }
    for &k in &c_endpoints {
        ensure_invariant!(!deleted[k], "endpoint {k} of a core arc was deleted");
    }

    let kept: Vec<usize> = iv.positions().filter(|&k| !deleted[k]).collect();
    let p_in_i = st.p.iter().filter(|&&k| iv.contains(k)).count();
    let bound = p_in_i + 2 * st.report.overlap.len() + 2 * c_endpoints.len() + tails;
    ctx.info.size_bound = Some((kept.len(), bound));
    ensure_invariant!(kept.len() <= bound, "len(B) = {} exceeds the size bound {bound}", kept.len());

    let gamma_prime = replay(ctx.gamma, seq.moves(), iv.start - 1);
    let mut q = st.c.clone();
    q.sort();
    let cert = ctx.build_cert(CaseTag::Deletion, kept, &gamma_prime, &q)?;
    let distinct: BTreeSet<NodeId> = q.iter().map(|a| a.node).collect();
    ensure_invariant!(
        2 * cert.rank >= distinct.len(),
        "core arcs have rank {} below half of {} distinct nodes",
        cert.rank,
        distinct.len()
    );
    Ok(cert)
}

/// After deleting occurrences of `u`, every core arc keeps the parity of `u`
/// inside it and, where it matters, the parity of `u` and of the arc's node on
/// the prefix `[start(I), left(α))`.
fn check_parity(
    graph: &Graph,
    c: &[Arc],
    u: NodeId,
    deleted: &[bool],
    alive_count: &dyn Fn(&[bool], NodeId, usize, usize) -> usize,
) -> Result<()> {
    let none = vec![false; deleted.len()];
    for a in c {
        let adjacent = graph.adjacent(a.node, u);
        if !adjacent && a.node != u {
            continue;
        }
        let inside_now = alive_count(deleted, u, a.left + 1, a.right - 1);
        let inside_before = alive_count(&none, u, a.left + 1, a.right - 1);
        if adjacent {
            ensure_invariant!(
                inside_now % 2 == inside_before % 2,
                "deleting node {u} changed its parity inside arc ({}, {})",
                a.left,
                a.right
            );
        }
        let matters = a.node == u || inside_before % 2 == 1;
        if matters {
            let pre_now = alive_count(deleted, u, 1, a.left - 1);
            let pre_before = alive_count(&none, u, 1, a.left - 1);
            ensure_invariant!(
                pre_now % 2 == pre_before % 2,
                "deleting node {u} changed its prefix parity before arc ({}, {})",
                a.left,
                a.right
            );
        }
    }
    Ok(())
}
