use serde::Serialize;

use super::{arc_radius, find_arcs, Arc, MoveSequence, Radius};
use crate::instance::Graph;

/// Scale parameters: `s` chunks, `t` groups of `w` chunks each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Params {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub w: usize,
    pub t: usize,
}

impl Params {
    pub fn new(n: usize, m: usize) -> Self {
        let s = ceil_log2(m);
        // smallest w >= 1 with w^2 >= log2(n), i.e. 2^(w^2) >= n
        let mut w = 1;
        while w * w < 64 && (1u64 << (w * w)) < n as u64 {
            w += 1;
        }
        let t = s.div_ceil(w);
        Params { n, m, s, w, t }
    }

    /// Chunk of an arc of length `len >= 2`: the `j` with `2^(j-1) < len <= 2^j`.
    pub fn chunk_of(&self, len: usize) -> usize {
        ceil_log2(len)
    }

    pub fn group_of_chunk(&self, j: usize) -> usize {
        j.div_ceil(self.w)
    }

    /// Chunks `(w(i-1), wi]` belonging to group `i`, clipped to `[1, s]`.
    pub fn chunks_of_group(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        (self.w * (i - 1) + 1)..=(self.w * i).min(self.s)
    }

    pub fn two_pow_w(&self) -> usize {
        1usize << self.w
    }
}

pub fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (usize::BITS - (x - 1).leading_zeros()) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArcInfo {
    pub arc: Arc,
    pub chunk: usize,
    pub group: usize,
    pub good: bool,
    pub dual_bad: bool,
    /// `None` for a trivial arc (empty interior).
    pub radius: Option<Radius>,
    /// Radius above twice the longest arc in its group.
    pub long: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcClassification {
    pub params: Params,
    pub arcs: Vec<ArcInfo>,
    /// Longest arc per group, index `1..=t` (0 for empty groups).
    pub group_maxlen: Vec<usize>,
}

impl ArcClassification {
    pub fn in_group(&self, i: usize) -> impl Iterator<Item = &ArcInfo> {
        self.arcs.iter().filter(move |a| a.group == i)
    }

    pub fn in_chunk(&self, j: usize) -> impl Iterator<Item = &ArcInfo> {
        self.arcs.iter().filter(move |a| a.chunk == j)
    }

    pub fn num_bad(&self) -> usize {
        self.arcs.iter().filter(|a| !a.good).count()
    }

    pub fn num_good_in_group(&self, i: usize) -> usize {
        if i == 0 || i > self.params.t {
            return 0;
        }
        self.in_group(i).filter(|a| a.good).count()
    }

    pub fn group_size(&self, i: usize) -> usize {
        if i == 0 || i > self.params.t {
            return 0;
        }
        self.in_group(i).count()
    }
}

pub fn classify(seq: &MoveSequence, graph: &Graph) -> ArcClassification {
    let params = Params::new(graph.n(), seq.len());
    let tw = params.two_pow_w();
    let arcs = find_arcs(seq);
    let mut group_maxlen = vec![0; params.t + 1];
    let mut infos: Vec<ArcInfo> = arcs
        .iter()
        .map(|&arc| {
            let len = arc.len();
            let chunk = params.chunk_of(len);
            let group = params.group_of_chunk(chunk);
            group_maxlen[group] = group_maxlen[group].max(len);
            // min(lr(left), rr(right)) >= len / 2^w, compared without division
            let lr = seq.left_radius(arc.left);
            let rr = seq.right_radius(arc.right);
            let good = match lr.min(rr) {
                Radius::Infinite => true,
                Radius::Finite(r) => r * tw >= len,
            };
            let dual_bad =
                lr.exceeds(len * tw) && lr != Radius::Infinite || rr.exceeds(len * tw) && rr != Radius::Infinite;
            ArcInfo { arc, chunk, group, good, dual_bad, radius: arc_radius(seq, &arc, graph).ok(), long: false }
        })
        .collect();
    for a in &mut infos {
        a.long = a.radius.is_some_and(|r| r.exceeds(2 * group_maxlen[a.group]));
    }
    ArcClassification { params, arcs: infos, group_maxlen }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::MoveSequence;
    use proptest::prelude::*;

    #[test]
    fn params_small() {
        let p = Params::new(16, 80);
        assert_eq!((p.s, p.w, p.t), (7, 2, 4));
        let p = Params::new(32, 160);
        // log2 32 = 5, w = 3
        assert_eq!((p.s, p.w, p.t), (8, 3, 3));
        let p = Params::new(64, 320);
        assert_eq!((p.s, p.w, p.t), (9, 3, 3));
        assert_eq!(Params::new(2, 10).w, 1);
        assert_eq!(Params::new(1, 10).w, 1);
    }

    #[test]
    fn chunk_membership() {
        let p = Params::new(16, 80);
        assert_eq!(p.chunk_of(5), 3);
        assert_eq!(p.chunk_of(4), 2);
        assert_eq!(p.chunk_of(2), 1);
        assert_eq!(p.chunk_of(3), 2);
    }

    #[test]
    fn length_three_arc_with_far_neighbors_is_good() {
        // arc (1,3) has length 3 and the next arc of node 1 has length 5
        let g = Graph::complete(3);
        let s = MoveSequence::new(3, vec![1, 2, 1, 3, 3, 3, 1]).unwrap();
        let c = classify(&s, &g);
        let a = c.arcs.iter().find(|a| a.arc.left == 1).unwrap();
        assert!(a.good);
        assert!(!a.dual_bad);
    }

    proptest! {
        #[test]
        fn chunk_and_group_invariants((n, moves) in (2usize..20).prop_flat_map(|n| (Just(n), prop::collection::vec(1..=n, 2..120)))) {
            let g = Graph::complete(n);
            let s = MoveSequence::new(n, moves).unwrap();
            let c = classify(&s, &g);
            let p = c.params;
            for a in &c.arcs {
                let len = a.arc.len();
                prop_assert!(len > 1 << (a.chunk - 1) && len <= 1 << a.chunk);
                prop_assert!(a.chunk >= 1 && a.chunk <= p.s);
                prop_assert!(p.chunks_of_group(a.group).contains(&a.chunk));
                prop_assert_eq!(a.long, a.radius.is_some_and(|r| r > Radius::Finite(2 * c.group_maxlen[a.group])));
            }
            for j in 1..=p.s {
                let lens: Vec<usize> = c.in_chunk(j).map(|a| a.arc.len()).collect();
                if let (Some(lo), Some(hi)) = (lens.iter().min(), lens.iter().max()) {
                    prop_assert!(*hi <= 2 * *lo);
                }
            }
            for i in 1..=p.t {
                let lens: Vec<usize> = c.in_group(i).map(|a| a.arc.len()).collect();
                if let (Some(lo), Some(hi)) = (lens.iter().min(), lens.iter().max()) {
                    prop_assert!(*hi <= p.two_pow_w() * *lo);
                }
            }
        }

        #[test]
        fn bad_arcs_have_adjacent_dual_bad((n, moves) in (2usize..12).prop_flat_map(|n| (Just(n), prop::collection::vec(1..=n, 2..150)))) {
            let g = Graph::complete(n);
            let s = MoveSequence::new(n, moves).unwrap();
            let c = classify(&s, &g);
            let by_left: std::collections::HashMap<usize, &ArcInfo> = c.arcs.iter().map(|a| (a.arc.left, a)).collect();
            let by_right: std::collections::HashMap<usize, &ArcInfo> = c.arcs.iter().map(|a| (a.arc.right, a)).collect();
            for a in c.arcs.iter().filter(|a| !a.good) {
                let prev = by_right.get(&a.arc.left).is_some_and(|b| b.dual_bad);
                let next = by_left.get(&a.arc.right).is_some_and(|b| b.dual_bad);
                prop_assert!(prev || next);
            }
        }
    }
}
