//! Move sequences, arcs, interiors, radii and improvement vectors.
//!
//! Positions in a sequence are 1-based. An arc is a pair of consecutive
//! occurrences of one node; its improvement vector has an entry `±2` on each
//! edge to a neighbor that moves an odd number of times strictly inside it.

mod classify;
mod cover;

pub use classify::{classify, ArcClassification, ArcInfo, Params};
pub use cover::{build_cover, find_dense_interval, Interval, IntervalCover};

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Configuration, EdgeId, Graph, NodeId, WeightedInstance};
use crate::rank::{rank_sparse, SparseVec};
use crate::scalar::Scalar;

/// Ordered list of moved nodes over a host graph on `n` nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveSequence {
    n: usize,
    // moves[0] is a placeholder so positions are 1-based
    moves: Vec<NodeId>,
    occ: Vec<Vec<usize>>,
    rank_in_occ: Vec<usize>,
}

impl MoveSequence {
    pub fn new(n: usize, moves: Vec<NodeId>) -> Result<Self> {
        let mut occ = vec![Vec::new(); n + 1];
        let mut rank_in_occ = vec![0; moves.len() + 1];
        for (i, &v) in moves.iter().enumerate() {
            if v == 0 || v > n {
                return Err(Error::validation(format!("move {} is node {v}, outside [1..{n}]", i + 1)));
            }
            rank_in_occ[i + 1] = occ[v].len();
            occ[v].push(i + 1);
        }
        let mut padded = Vec::with_capacity(moves.len() + 1);
        padded.push(0);
        padded.extend(moves);
        Ok(MoveSequence { n, moves: padded, occ, rank_in_occ })
    }

    pub fn len(&self) -> usize {
        self.moves.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Node moved at position `k` (1-based).
    #[inline]
    pub fn at(&self, k: usize) -> NodeId {
        self.moves[k]
    }

    pub fn moves(&self) -> &[NodeId] {
        &self.moves[1..]
    }

    /// Positions where `v` moves, ascending.
    pub fn occurrences(&self, v: NodeId) -> &[usize] {
        &self.occ[v]
    }

    /// Number of occurrences of `v` at positions in `[lo, hi]`.
    pub fn count_in(&self, v: NodeId, lo: usize, hi: usize) -> usize {
        if lo > hi {
            return 0;
        }
        let o = &self.occ[v];
        o.partition_point(|&p| p <= hi) - o.partition_point(|&p| p < lo)
    }

    /// Active nodes: those moved at least once.
    pub fn active_nodes(&self) -> Vec<NodeId> {
        (1..=self.n).filter(|&v| !self.occ[v].is_empty()).collect()
    }

    /// Nodes moved exactly once.
    pub fn once_nodes(&self) -> Vec<NodeId> {
        (1..=self.n).filter(|&v| self.occ[v].len() == 1).collect()
    }

    /// Nodes moved at least twice.
    pub fn repeated_nodes(&self) -> Vec<NodeId> {
        (1..=self.n).filter(|&v| self.occ[v].len() >= 2).collect()
    }

    pub fn pred(&self, k: usize) -> Bound {
        let r = self.rank_in_occ[k];
        if r == 0 {
            Bound::NegInf
        } else {
            Bound::At(self.occ[self.moves[k]][r - 1])
        }
    }

    pub fn succ(&self, k: usize) -> Bound {
        let o = &self.occ[self.moves[k]];
        match o.get(self.rank_in_occ[k] + 1) {
            Some(&j) => Bound::At(j),
            None => Bound::PosInf,
        }
    }

    /// `k - pred(k) + 1`, infinite without a predecessor.
    pub fn left_radius(&self, k: usize) -> Radius {
        match self.pred(k) {
            Bound::At(i) => Radius::Finite(k - i + 1),
            _ => Radius::Infinite,
        }
    }

    /// `succ(k) - k + 1`, infinite without a successor.
    pub fn right_radius(&self, k: usize) -> Radius {
        match self.succ(k) {
            Bound::At(j) => Radius::Finite(j - k + 1),
            _ => Radius::Infinite,
        }
    }

    pub fn radius(&self, k: usize) -> Radius {
        self.left_radius(k).max(self.right_radius(k))
    }

    /// Contiguous substring `[start, end]` as a new sequence.
    pub fn slice(&self, start: usize, end: usize) -> MoveSequence {
        MoveSequence::new(self.n, self.moves[start..=end].to_vec()).expect("valid nodes")
    }

    /// Subsequence keeping the given positions (ascending).
    pub fn select(&self, positions: &[usize]) -> MoveSequence {
        MoveSequence::new(self.n, positions.iter().map(|&k| self.moves[k]).collect()).expect("valid nodes")
    }
}

/// Predecessor/successor index with explicit infinities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInf,
    At(usize),
    PosInf,
}

/// A radius value; `Infinite` is larger than every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Radius {
    Finite(usize),
    Infinite,
}

impl Radius {
    /// `self > x` for a finite threshold.
    pub fn exceeds(self, x: usize) -> bool {
        self > Radius::Finite(x)
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(r) => write!(f, "{r}"),
            Radius::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub left: usize,
    pub right: usize,
    pub node: NodeId,
}

impl Arc {
    pub fn len(&self) -> usize {
        self.right - self.left + 1
    }

    pub fn contains_pos(&self, k: usize) -> bool {
        self.left < k && k < self.right
    }

    pub fn endpoints(&self) -> [usize; 2] {
        [self.left, self.right]
    }
}

impl PartialOrd for Arc {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Arc {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.left, self.right).cmp(&(other.left, other.right))
    }
}

/// All arcs in left-endpoint order.
pub fn find_arcs(seq: &MoveSequence) -> Vec<Arc> {
    let mut arcs = Vec::with_capacity(seq.len());
    for k in 1..=seq.len() {
        if let Bound::At(j) = seq.succ(k) {
            arcs.push(Arc { left: k, right: j, node: seq.at(k) });
        }
    }
    arcs
}

/// Check that `arc` really is a pair of consecutive occurrences in `seq`.
pub fn validate_arc(seq: &MoveSequence, arc: &Arc) -> Result<()> {
    let ok = arc.left >= 1
        && arc.right <= seq.len()
        && arc.left < arc.right
        && seq.at(arc.left) == arc.node
        && seq.succ(arc.left) == Bound::At(arc.right);
    if ok {
        Ok(())
    } else {
        Err(Error::validation(format!("({}, {}, node {}) is not an arc", arc.left, arc.right, arc.node)))
    }
}

/// Positions strictly inside `arc` whose node is adjacent to the arc's node
/// and moves an odd number of times inside the arc.
pub fn interior(seq: &MoveSequence, arc: &Arc, graph: &Graph) -> Vec<usize> {
    let mut out = Vec::new();
    for k in arc.left + 1..arc.right {
        let u = seq.at(k);
        if graph.adjacent(arc.node, u) && seq.count_in(u, arc.left + 1, arc.right - 1) % 2 == 1 {
            out.push(k);
        }
    }
    out
}

/// Neighbors of the arc's node that move an odd number of times inside it.
pub fn odd_neighbors(seq: &MoveSequence, arc: &Arc, graph: &Graph) -> Vec<(NodeId, EdgeId)> {
    graph
        .neighbors(arc.node)
        .iter()
        .copied()
        .filter(|&(u, _)| seq.count_in(u, arc.left + 1, arc.right - 1) % 2 == 1)
        .collect()
}

pub fn is_trivial(seq: &MoveSequence, arc: &Arc, graph: &Graph) -> bool {
    odd_neighbors(seq, arc, graph).is_empty()
}

/// True iff every arc of `seq` has a nonempty interior.
pub fn is_nontrivial(seq: &MoveSequence, graph: &Graph) -> bool {
    find_arcs(seq).iter().all(|a| !is_trivial(seq, a, graph))
}

/// Maximum radius over the interior; errors on a trivial arc.
pub fn arc_radius(seq: &MoveSequence, arc: &Arc, graph: &Graph) -> Result<Radius> {
    interior(seq, arc, graph)
        .into_iter()
        .map(|k| seq.radius(k))
        .max()
        .ok_or_else(|| Error::Precondition(format!("arc ({}, {}) has an empty interior", arc.left, arc.right)))
}

/// Sparse edge-indexed vector with entries in {-2, +2}, sorted by edge id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImprovementVector(pub Vec<(EdgeId, i64)>);

impl ImprovementVector {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, e: EdgeId) -> i64 {
        self.0.iter().find(|x| x.0 == e).map_or(0, |x| x.1)
    }

    pub fn dot<W: Scalar>(&self, weights: &[W]) -> W {
        self.0.iter().fold(W::zero(), |acc, &(e, x)| acc + W::from_i64(x) * weights[e].clone())
    }

    /// Entries divided by 2, for rank computations.
    pub fn halved(&self) -> SparseVec {
        self.0.iter().map(|&(e, x)| (e, x / 2)).collect()
    }
}

/// Sign of `x` just before position `i`, replaying from `init`.
pub fn sign_before(seq: &MoveSequence, init: &Configuration, x: NodeId, i: usize) -> Result<i8> {
    let s = init.get(x)?;
    Ok(if seq.count_in(x, 1, i - 1) % 2 == 1 { -s } else { s })
}

pub fn improvement_vector(
    seq: &MoveSequence,
    arc: &Arc,
    init: &Configuration,
    graph: &Graph,
) -> Result<ImprovementVector> {
    let sv = sign_before(seq, init, arc.node, arc.left)?;
    let mut entries = Vec::new();
    for (u, e) in odd_neighbors(seq, arc, graph) {
        let su = sign_before(seq, init, u, arc.left)?;
        entries.push((e, 2 * (sv * su) as i64));
    }
    entries.sort_unstable_by_key(|x| x.0);
    Ok(ImprovementVector(entries))
}

/// Improvement vectors of `arcs` relative to the all-`-1` configuration, halved.
pub fn default_vectors(seq: &MoveSequence, arcs: &[Arc], graph: &Graph) -> Vec<SparseVec> {
    let init = Configuration::all_minus(seq.n());
    arcs.iter().map(|a| improvement_vector(seq, a, &init, graph).expect("total configuration").halved()).collect()
}

/// Exact rank of the arcs' improvement vectors under the default configuration.
pub fn rank_of_arcs(seq: &MoveSequence, arcs: &[Arc], graph: &Graph) -> usize {
    rank_sparse(&default_vectors(seq, arcs, graph))
}

/// Rank under an explicit starting configuration (equal to the default rank).
pub fn rank_of_arcs_with(seq: &MoveSequence, arcs: &[Arc], graph: &Graph, init: &Configuration) -> Result<usize> {
    let vs =
        arcs.iter().map(|a| improvement_vector(seq, a, init, graph).map(|v| v.halved())).collect::<Result<Vec<_>>>()?;
    Ok(rank_sparse(&vs))
}

/// True iff every arc's gain sum lies in `(0, eps]`.
pub fn is_eps_improving<W: Scalar>(
    seq: &MoveSequence,
    arcs: &[Arc],
    init: &Configuration,
    inst: &WeightedInstance<W>,
    eps: &W,
) -> Result<bool> {
    if !(*eps > W::zero()) {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    for a in arcs {
        let g = improvement_vector(seq, a, init, inst.graph())?.dot(inst.weights());
        if !(g > W::zero() && g <= *eps) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dense edge-by-arc matrix as CSV (rows are edge ids, columns arcs).
pub fn matrix_csv(seq: &MoveSequence, arcs: &[Arc], init: &Configuration, graph: &Graph) -> Result<String> {
    let vecs = arcs.iter().map(|a| improvement_vector(seq, a, init, graph)).collect::<Result<Vec<_>>>()?;
    let mut out = String::from("edge");
    for a in arcs {
        out.push_str(&format!(",{}-{}", a.left, a.right));
    }
    out.push('\n');
    for e in 0..graph.num_edges() {
        out.push_str(&e.to_string());
        for v in &vecs {
            out.push_str(&format!(",{}", v.get(e)));
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flip::FlipSystem;
    use crate::flip::MaxCut;
    use crate::instance::Graph;
    use crate::scalar::{ratio, Exact};
    use proptest::prelude::*;

    // a=1, b=2, c=3
    fn seq(n: usize, m: &[usize]) -> MoveSequence {
        MoveSequence::new(n, m.to_vec()).unwrap()
    }

    #[test]
    fn arcs_of_abacba() {
        let s = seq(3, &[1, 2, 1, 3, 2, 1]);
        let arcs = find_arcs(&s);
        assert_eq!(
            arcs,
            vec![
                Arc { left: 1, right: 3, node: 1 },
                Arc { left: 2, right: 5, node: 2 },
                Arc { left: 3, right: 6, node: 1 },
            ]
        );
        assert!(find_arcs(&seq(3, &[1, 2, 3])).is_empty());
    }

    #[test]
    fn pred_succ_examples() {
        let s = seq(2, &[1, 2, 1]);
        assert_eq!((s.pred(3), s.succ(3)), (Bound::At(1), Bound::PosInf));
        assert_eq!((s.pred(2), s.succ(2)), (Bound::NegInf, Bound::PosInf));
        assert_eq!(s.radius(2), Radius::Infinite);
    }

    #[test]
    fn radius_with_pred_five_back_and_succ_four_ahead() {
        // node 1 at positions 1, 5, 8: k=5 has left radius 5, right radius 4
        let s = seq(3, &[1, 2, 3, 2, 1, 3, 2, 1]);
        assert_eq!(s.left_radius(5), Radius::Finite(5));
        assert_eq!(s.right_radius(5), Radius::Finite(4));
        assert_eq!(s.radius(5), Radius::Finite(5));
    }

    #[test]
    fn interior_examples() {
        let g = Graph::new(2, vec![(1, 2)]).unwrap();
        let a = Arc { left: 1, right: 3, node: 1 };
        assert_eq!(interior(&seq(2, &[1, 2, 1]), &a, &g), vec![2]);
        let a4 = Arc { left: 1, right: 4, node: 1 };
        assert!(interior(&seq(2, &[1, 2, 2, 1]), &a4, &g).is_empty());
        assert!(arc_radius(&seq(2, &[1, 2, 2, 1]), &a4, &g).is_err());

        let g3 = Graph::new(3, vec![(1, 2), (1, 3)]).unwrap();
        let s = seq(3, &[1, 2, 3, 2, 2, 1]);
        let a6 = Arc { left: 1, right: 6, node: 1 };
        // b occurs 3 times (odd), c once (odd)
        assert_eq!(interior(&s, &a6, &g3), vec![2, 3, 4, 5]);
        let s2 = seq(3, &[1, 2, 3, 2, 1]);
        assert_eq!(interior(&s2, &Arc { left: 1, right: 5, node: 1 }, &g3), vec![3]);
    }

    #[test]
    fn improvement_vector_example() {
        let g = Graph::new(3, vec![(1, 2), (1, 3)]).unwrap();
        let s = seq(3, &[1, 2, 1]);
        let v = improvement_vector(&s, &Arc { left: 1, right: 3, node: 1 }, &Configuration::all_minus(3), &g).unwrap();
        assert_eq!(v.get(0), 2);
        assert_eq!(v.get(1), 0);
        let t = seq(2, &[1, 2, 2, 1]);
        let gt = Graph::new(2, vec![(1, 2)]).unwrap();
        let z = improvement_vector(&t, &Arc { left: 1, right: 4, node: 1 }, &Configuration::all_minus(2), &gt).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn star_edge_rank() {
        let g = Graph::new(2, vec![(1, 2)]).unwrap();
        let s = seq(2, &[1, 2, 1, 2, 1]);
        let arcs = find_arcs(&s);
        assert_eq!(arcs.len(), 3);
        let vs = default_vectors(&s, &arcs, &g);
        assert_eq!(vs, vec![vec![(0, 1)], vec![(0, -1)], vec![(0, 1)]]);
        assert_eq!(rank_of_arcs(&s, &arcs, &g), 1);
        assert_eq!(rank_of_arcs(&s, &[], &g), 0);
    }

    #[test]
    fn eps_improving_examples() {
        let g = Graph::new(2, vec![(1, 2)]).unwrap();
        let inst = WeightedInstance::new(g.clone(), vec![0.04]).unwrap();
        let s = seq(2, &[1, 2, 1]);
        let a = Arc { left: 1, right: 3, node: 1 };
        assert!(is_eps_improving(&s, &[a], &Configuration::all_minus(2), &inst, &0.1).unwrap());
        let t = seq(2, &[1, 2, 2, 1]);
        let a4 = Arc { left: 1, right: 4, node: 1 };
        assert!(!is_eps_improving(&t, &[a4], &Configuration::all_minus(2), &inst, &0.1).unwrap());
    }

    fn exact_gain_identity(n: usize, moves: Vec<usize>, wts: Vec<i64>, signs: Vec<bool>) {
        let g = Graph::complete(n);
        let w: Vec<Exact> = wts.iter().map(|&x| ratio(x, 97)).collect();
        let inst = WeightedInstance::new(g.clone(), w).unwrap();
        let init =
            Configuration::from_signs(&signs.iter().map(|&b| if b { 1 } else { -1 }).collect::<Vec<_>>()).unwrap();
        let s = MoveSequence::new(n, moves).unwrap();
        let sys = MaxCut::new(&inst);
        let mut cfg = init.clone();
        let mut gains = vec![Exact::from_i64(0)];
        for k in 1..=s.len() {
            gains.push(sys.gain(&cfg, s.at(k)));
            cfg.flip(s.at(k));
        }
        for a in find_arcs(&s) {
            let v = improvement_vector(&s, &a, &init, &g).unwrap();
            assert_eq!(v.dot(inst.weights()), gains[a.left].clone() + gains[a.right].clone());
        }
    }

    proptest! {
        #[test]
        fn gain_identity_is_exact(
            (n, moves, wts, signs) in (2usize..7).prop_flat_map(|n| (
                Just(n),
                prop::collection::vec(1..=n, 0..30),
                prop::collection::vec(-97i64..=97, n * (n - 1) / 2),
                prop::collection::vec(any::<bool>(), n),
            ))
        ) {
            exact_gain_identity(n, moves, wts, signs);
        }

        #[test]
        fn arc_count_is_sum_of_repeats((n, moves) in (1usize..10).prop_flat_map(|n| (Just(n), prop::collection::vec(1..=n, 0..60)))) {
            let s = MoveSequence::new(n, moves).unwrap();
            let arcs = find_arcs(&s);
            let expect: usize = s.active_nodes().iter().map(|&v| s.occurrences(v).len() - 1).sum();
            prop_assert_eq!(arcs.len(), expect);
            prop_assert!(arcs.len() + n >= s.len());
            for a in &arcs {
                validate_arc(&s, a).unwrap();
            }
        }

        #[test]
        fn pred_succ_match_scan((n, moves) in (1usize..6).prop_flat_map(|n| (Just(n), prop::collection::vec(1..=n, 1..40)))) {
            let s = MoveSequence::new(n, moves.clone()).unwrap();
            for k in 1..=moves.len() {
                let v = moves[k - 1];
                let p = (1..k).rev().find(|&i| moves[i - 1] == v).map_or(Bound::NegInf, Bound::At);
                let q = (k + 1..=moves.len()).find(|&j| moves[j - 1] == v).map_or(Bound::PosInf, Bound::At);
                prop_assert_eq!(s.pred(k), p);
                prop_assert_eq!(s.succ(k), q);
                let lr = match p { Bound::At(i) => Radius::Finite(k - i + 1), _ => Radius::Infinite };
                let rr = match q { Bound::At(j) => Radius::Finite(j - k + 1), _ => Radius::Infinite };
                prop_assert_eq!(s.radius(k), lr.max(rr));
            }
        }

        #[test]
        fn rank_is_independent_of_start(
            (n, moves, signs) in (2usize..8).prop_flat_map(|n| (
                Just(n), prop::collection::vec(1..=n, 0..40), prop::collection::vec(any::<bool>(), n)))
        ) {
            let g = Graph::complete(n);
            let s = MoveSequence::new(n, moves).unwrap();
            let arcs = find_arcs(&s);
            let init = Configuration::from_signs(&signs.iter().map(|&b| if b { 1 } else { -1 }).collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(rank_of_arcs(&s, &arcs, &g), rank_of_arcs_with(&s, &arcs, &g, &init).unwrap());
        }
    }
}
