//! Dual-bad, long-radius and last-chunk cases, plus group selection.

use std::collections::BTreeMap;

use super::{CaseTag, Certificate, Context};
use crate::arcs::{find_dense_interval, Arc, ArcInfo, Interval};
use crate::ensure_invariant;
use crate::error::{Error, Result};

fn max_len<'a>(arcs: impl IntoIterator<Item = &'a Arc>) -> usize {
    arcs.into_iter().map(Arc::len).max().unwrap_or(0)
}

/// `|bad(A)| >= |A|/100`.
pub fn case1_triggered(ctx: &Context) -> bool {
    100 * ctx.cls.num_bad() >= ctx.cls.arcs.len()
}

pub fn case1_dual_bad(ctx: &mut Context) -> Result<Certificate> {
    if !case1_triggered(ctx) {
        return Err(Error::Refused("fewer than 1% of the arcs are bad".into()));
    }
    let t = ctx.cls.params.t;
    let m = ctx.m();
    let dual_bad_in = |i: usize| -> Vec<Arc> { ctx.cls.in_group(i).filter(|a| a.dual_bad).map(|a| a.arc).collect() };
    let mut best: Vec<Arc> = Vec::new();
    let mut k = 0;
    for i in 1..=t {
        let d = dual_bad_in(i);
        if d.len() > best.len() {
            best = d;
            k = i;
        }
    }
    ensure_invariant!(!best.is_empty(), "bad arcs present but no dual-bad arc");
    let ell = max_len(&best);
    ensure_invariant!(2 * ell <= m, "dual-bad arc of length {ell} exceeds m/2 = {}", m / 2);
    let p: Vec<usize> = (1..=m).collect();
    let iv = find_dense_interval(m, &best, &p, ell)?;
    let c: Vec<Arc> = best.iter().copied().filter(|a| iv.contains_arc(a)).collect();
    ensure_invariant!(!c.is_empty(), "dense interval holds no dual-bad arc");

    let mut per_node: BTreeMap<usize, usize> = BTreeMap::new();
    for a in &c {
        *per_node.entry(a.node).or_default() += 1;
    }
    let mult = per_node.values().copied().max().unwrap_or(0);
    ensure_invariant!(mult <= 4, "a node has {mult} dual-bad arcs inside the interval (bound 4)");

    let mut seen = std::collections::HashSet::new();
    let q: Vec<Arc> = c.iter().copied().filter(|a| seen.insert(a.node)).collect();

    ctx.info.group = Some(k);
    ctx.info.ell = Some(ell);
    ctx.info.interval = Some(iv);
    ctx.info.core_size = c.len();
    ctx.info.max_node_multiplicity = Some(mult);

    let cert = ctx.contiguous_cert(CaseTag::DualBad, iv, &q)?;
    ensure_invariant!(
        2 * cert.rank >= q.len(),
        "rank {} of {} node-distinct dual-bad arcs is below half",
        cert.rank,
        q.len()
    );
    Ok(cert)
}

/// Group with the most good arcs among those satisfying both
/// `|good(D_i)| >= |A|/(2t)` and `|good(D_i)| >= |D_{i-1} ∪ D_i ∪ D_{i+1}|/7`.
pub fn select_group(ctx: &mut Context) -> Result<usize> {
    let t = ctx.cls.params.t;
    let a = ctx.cls.arcs.len();
    let mut best: Option<(usize, usize)> = None;
    for i in 1..=t {
        let good = ctx.cls.num_good_in_group(i);
        let d3 = ctx.cls.group_size(i - 1) + ctx.cls.group_size(i) + ctx.cls.group_size(i + 1);
        if 2 * t * good >= a && 7 * good >= d3 && best.is_none_or(|(g, _)| good > g) {
            best = Some((good, i));
        }
    }
    let (_, i) = best.ok_or_else(|| Error::invariant("no group satisfies the density conditions"))?;
    ctx.info.group = Some(i);
    Ok(i)
}

/// `|good(L)| >= |good(D_i*)|/2` with `L` the long arcs of `D_i*`.
pub fn case2_triggered(ctx: &Context, istar: usize) -> bool {
    let good: Vec<&ArcInfo> = ctx.cls.in_group(istar).filter(|a| a.good).collect();
    let good_long = good.iter().filter(|a| a.long).count();
    2 * good_long >= good.len()
}

pub fn case2_long_radius(ctx: &mut Context, istar: usize) -> Result<Certificate> {
    if !case2_triggered(ctx, istar) {
        return Err(Error::Refused("long arcs hold under half of the good arcs".into()));
    }
    let m = ctx.m();
    let long: Vec<Arc> = ctx.cls.in_group(istar).filter(|a| a.long).map(|a| a.arc).collect();
    ensure_invariant!(!long.is_empty(), "long-radius case with no long arcs");
    let ell = max_len(&long);
    let iv = if 2 * ell <= m {
        let p: Vec<usize> = (1..=m).collect();
        find_dense_interval(m, &long, &p, ell)?
    } else {
        // chunk s-1 also holds lengths above m/2, so this is not limited to the last group
        Interval::new(1, m)
    };
    let c: Vec<Arc> = long.iter().copied().filter(|a| iv.contains_arc(a)).collect();
    ensure_invariant!(!c.is_empty(), "interval holds no long arc");
    let li = iv.len();
    let maxlen_group = ctx.cls.group_maxlen[istar];

    // witness index k: first interior position whose radius exceeds len(I)
    let mut left_side = Vec::new();
    let mut right_side = Vec::new();
    for a in &c {
        let inner = crate::arcs::interior(ctx.seq, a, ctx.graph);
        let k = inner.into_iter().find(|&k| ctx.seq.radius(k).exceeds(li)).ok_or_else(|| {
            Error::invariant(format!(
                "long arc ({}, {}) has no interior radius above len(I)={li} (2*maxlen={})",
                a.left,
                a.right,
                2 * maxlen_group
            ))
        })?;
        if ctx.seq.left_radius(k).exceeds(li) {
            left_side.push((*a, k));
        } else {
            ensure_invariant!(ctx.seq.right_radius(k).exceeds(li), "radius above len(I) on neither side");
            right_side.push((*a, k));
        }
    }
    let mut chosen = if left_side.len() >= right_side.len() {
        left_side.sort_by_key(|(a, _)| (a.right, a.left));
        left_side
    } else {
        right_side.sort_by_key(|(a, _)| (std::cmp::Reverse(a.left), std::cmp::Reverse(a.right)));
        right_side
    };
    chosen.dedup();
    let arcs: Vec<Arc> = chosen.iter().map(|(a, _)| *a).collect();
    let edges: Vec<(usize, usize)> = chosen.iter().map(|(a, k)| (a.node, ctx.seq.at(*k))).collect();
    ctx.check_triangular(&arcs, &edges, "long-radius")?;

    ctx.info.ell = Some(ell);
    ctx.info.interval = Some(iv);
    ctx.info.core_size = c.len();

    let mut q = arcs.clone();
    q.sort();
    let cert = ctx.contiguous_cert(CaseTag::LongRadius, iv, &q)?;
    ensure_invariant!(cert.rank == q.len(), "long-radius arcs have rank {} < {}", cert.rank, q.len());
    Ok(cert)
}

fn short_good_in<'a>(ctx: &'a Context, istar: usize) -> impl Iterator<Item = &'a ArcInfo> {
    ctx.cls.in_group(istar).filter(|a| a.good && !a.long)
}

/// `i* = t` and the last two chunks hold half of the good short arcs of `D_t`.
pub fn case30_triggered(ctx: &Context, istar: usize) -> bool {
    let s = ctx.cls.params.s;
    if istar != ctx.cls.params.t {
        return false;
    }
    let total = short_good_in(ctx, istar).count();
    let last = short_good_in(ctx, istar).filter(|a| a.chunk + 1 >= s).count();
    2 * last >= total
}

pub fn case30_last_chunks(ctx: &mut Context) -> Result<Certificate> {
    let s = ctx.cls.params.s;
    let q: Vec<Arc> = ctx.cls.arcs.iter().filter(|a| a.chunk + 1 >= s).map(|a| a.arc).collect();
    ensure_invariant!(!q.is_empty(), "last two chunks hold no arcs");
    let nodes: std::collections::BTreeSet<usize> = q.iter().map(|a| a.node).collect();
    let iv = Interval::new(1, ctx.m());
    ctx.info.interval = Some(iv);
    ctx.info.core_size = q.len();
    let cert = ctx.contiguous_cert(CaseTag::LastChunks, iv, &q)?;
    ensure_invariant!(
        2 * cert.rank >= nodes.len(),
        "last-chunk arcs have rank {} below half of {} distinct nodes",
        cert.rank,
        nodes.len()
    );
    Ok(cert)
}
