use serde::{Deserialize, Serialize};

use super::Arc;
use crate::error::{Error, Result};

/// Closed 1-based interval `[start, end]` of sequence positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start >= 1 && start <= end);
        Interval { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn contains(&self, k: usize) -> bool {
        self.start <= k && k <= self.end
    }

    pub fn contains_arc(&self, a: &Arc) -> bool {
        self.start <= a.left && a.right <= self.end
    }

    pub fn positions(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

/// Intervals of length `2ℓ` covering `[1, m]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalCover {
    pub m: usize,
    pub ell: usize,
    pub even: Vec<Interval>,
    pub odd: Vec<Interval>,
    pub boundary: Interval,
}

impl IntervalCover {
    /// All intervals: even family, odd family, then the boundary interval.
    pub fn intervals(&self) -> impl Iterator<Item = Interval> + '_ {
        self.even.iter().chain(&self.odd).copied().chain(std::iter::once(self.boundary))
    }

    /// Number of intervals containing index `k`.
    pub fn multiplicity(&self, k: usize) -> usize {
        self.intervals().filter(|i| i.contains(k)).count()
    }
}

pub fn build_cover(m: usize, ell: usize) -> Result<IntervalCover> {
    if ell == 0 || 2 * ell > m {
        return Err(Error::Precondition(format!("cover needs 1 <= l <= m/2, got l={ell}, m={m}")));
    }
    let even = (1..=m / (2 * ell)).map(|i| Interval::new((2 * i - 2) * ell + 1, 2 * i * ell)).collect();
    let odd = (1..=(m - ell) / (2 * ell)).map(|i| Interval::new((2 * i - 1) * ell + 1, (2 * i + 1) * ell)).collect();
    Ok(IntervalCover { m, ell, even, odd, boundary: Interval::new(m - 2 * ell + 1, m) })
}

/// Cover interval holding the most arcs of `arcs` among those satisfying
/// `|C_I|/|C| >= max(2ℓ/(16m), |P∩I|/(4|P|))`; earliest on ties.
///
/// `p` must be sorted ascending.
pub fn find_dense_interval(m: usize, arcs: &[Arc], p: &[usize], ell: usize) -> Result<Interval> {
    if arcs.is_empty() || p.is_empty() {
        return Err(Error::Precondition("dense interval needs nonempty C and P".into()));
    }
    if let Some(a) = arcs.iter().find(|a| a.len() > ell) {
        return Err(Error::Precondition(format!("arc ({}, {}) longer than l={ell}", a.left, a.right)));
    }
    debug_assert!(p.windows(2).all(|w| w[0] < w[1]));
    let cover = build_cover(m, ell)?;
    let (c, np) = (arcs.len(), p.len());
    let mut best: Option<(usize, Interval)> = None;
    for iv in cover.intervals() {
        let ci = arcs.iter().filter(|a| iv.contains_arc(a)).count();
        let pi = p.partition_point(|&k| k <= iv.end) - p.partition_point(|&k| k < iv.start);
        let dense = 16 * m * ci >= 2 * ell * c && 4 * np * ci >= pi * c;
        if dense && best.is_none_or(|(b, _)| ci > b) {
            best = Some((ci, iv));
        }
    }
    best.map(|(_, iv)| iv)
        .ok_or_else(|| Error::invariant(format!("no dense cover interval for m={m}, l={ell}, |C|={c}, |P|={np}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cover_m10_l2() {
        let c = build_cover(10, 2).unwrap();
        assert_eq!(c.even, vec![Interval::new(1, 4), Interval::new(5, 8)]);
        assert_eq!(c.odd, vec![Interval::new(3, 6), Interval::new(7, 10)]);
        assert_eq!(c.boundary, Interval::new(7, 10));
        assert!((1..=10).all(|k| c.multiplicity(k) <= 3));
        assert!(build_cover(10, 6).is_err());
    }

    #[test]
    fn singleton_arc_is_found() {
        let a = Arc { left: 4, right: 6, node: 1 };
        let iv = find_dense_interval(20, &[a], &(1..=20).collect::<Vec<_>>(), 3).unwrap();
        assert!(iv.contains_arc(&a));
        assert_eq!(iv.len(), 6);
    }

    proptest! {
        #[test]
        fn dense_interval_inequality(
            m in 8usize..80,
            ell_raw in any::<usize>(),
            raw in prop::collection::vec((any::<usize>(), any::<usize>()), 1..20),
                ) {
            let ell = 2 + ell_raw % (m / 2 - 1);
            let arcs: Vec<Arc> = raw.iter().map(|&(a, b)| {
                let len = 2 + b % (ell - 1);
                let left = 1 + a % (m - len + 1);
                Arc { left, right: left + len - 1, node: 1 }
            }).collect();
            let p: Vec<usize> = (1..=m).collect();
            let iv = find_dense_interval(m, &arcs, &p, ell).unwrap();
            let ci = arcs.iter().filter(|a| iv.contains_arc(a)).count();
            prop_assert!(16 * m * ci >= 2 * ell * arcs.len());
            prop_assert!(4 * p.len() * ci >= iv.len() * arcs.len());
        }
    }
}
