//! Move-sequence generators: uniform random nontrivial sequences and a few
//! structured families that steer the extraction into specific cases.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::arcs::{find_arcs, is_trivial, MoveSequence};
use crate::error::{Error, Result};
use crate::instance::{Graph, NodeId};
use crate::rng::Rng;

/// Uniform random sequence of length `m` on `[1, n]` without immediate repeats.
pub fn random_sequence(n: usize, m: usize, rng: &mut Rng) -> MoveSequence {
    let mut moves = Vec::with_capacity(m);
    for _ in 0..m {
        let mut v = rng.gen_range(1..=n);
        while n > 1 && moves.last() == Some(&v) {
            v = rng.gen_range(1..=n);
        }
        moves.push(v);
    }
    MoveSequence::new(n, moves).expect("nodes in range")
}

/// Random sequence of length `m` whose every arc has a nonempty interior.
///
/// Starts from a uniform sequence and resamples the right endpoint of the
/// first trivial arc until none remain.
pub fn random_nontrivial(graph: &Graph, m: usize, rng: &mut Rng) -> Result<MoveSequence> {
    let n = graph.n();
    if n < 2 || graph.num_edges() == 0 {
        return Err(Error::Precondition("nontrivial sequences need at least one edge".into()));
    }
    let mut seq = random_sequence(n, m, rng);
    for _ in 0..50 * m.max(1) {
        let Some(bad) = find_arcs(&seq).into_iter().find(|a| is_trivial(&seq, a, graph)) else {
            return Ok(seq);
        };
        let mut moves = seq.moves().to_vec();
        let k = bad.right - 1;
        let mut v = rng.gen_range(1..=n);
        while v == bad.node || (k > 0 && moves[k - 1] == v) {
            v = rng.gen_range(1..=n);
        }
        moves[k] = v;
        seq = MoveSequence::new(n, moves)?;
    }
    Err(Error::Refused("could not repair trivial arcs".into()))
}

/// A fixed random permutation of `period` nodes repeated to length `m`.
/// Every arc has length `period + 1`.
pub fn periodic(n: usize, period: usize, m: usize, rng: &mut Rng) -> Result<MoveSequence> {
    if period < 2 || period > n {
        return Err(Error::validation(format!("period {period} outside [2, {n}]")));
    }
    let mut nodes: Vec<NodeId> = (1..=n).collect();
    nodes.shuffle(rng);
    nodes.truncate(period);
    MoveSequence::new(n, (0..m).map(|i| nodes[i % period]).collect())
}

/// Rounds of `fast` nodes cycling in a fixed order, each round followed by one
/// move of the next `slow` node (cyclically). Fast arcs are short and contain
/// one slow move whose radius is large, so they are long-radius arcs.
pub fn fast_slow(n: usize, fast: usize, m: usize, rng: &mut Rng) -> Result<MoveSequence> {
    if fast < 2 || fast + 2 > n {
        return Err(Error::validation(format!("need 2 <= fast <= n-2, got fast={fast}, n={n}")));
    }
    let mut nodes: Vec<NodeId> = (1..=n).collect();
    nodes.shuffle(rng);
    let (f, s) = nodes.split_at(fast);
    let mut moves = Vec::with_capacity(m);
    let mut round = 0;
    while moves.len() < m {
        for &v in f {
            moves.push(v);
        }
        moves.push(s[round % s.len()]);
        round += 1;
    }
    moves.truncate(m);
    MoveSequence::new(n, moves)
}

/// Slow nodes cycling with period `slow`, with `burst` random moves of `fast`
/// nodes inserted after every slow move.
pub fn layered(n: usize, slow: usize, fast: usize, burst: usize, m: usize, rng: &mut Rng) -> Result<MoveSequence> {
    if slow + fast > n || slow == 0 || (burst > 0 && fast < 2) {
        return Err(Error::validation(format!("bad layer sizes slow={slow}, fast={fast}, n={n}")));
    }
    let mut nodes: Vec<NodeId> = (1..=n).collect();
    nodes.shuffle(rng);
    let (s, rest) = nodes.split_at(slow);
    let f = &rest[..fast];
    let mut moves: Vec<NodeId> = Vec::with_capacity(m);
    let mut i = 0;
    while moves.len() < m {
        moves.push(s[i % slow]);
        i += 1;
        for _ in 0..burst {
            let mut v = f[rng.gen_range(0..fast)];
            while moves.last() == Some(&v) {
                v = f[rng.gen_range(0..fast)];
            }
            moves.push(v);
        }
    }
    moves.truncate(m);
    MoveSequence::new(n, moves)
}

/// Erdős–Rényi graph: each pair joined independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, rng: &mut Rng) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::validation(format!("edge probability {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in u + 1..=n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges)
}

/// Random graph with maximum degree `d`: pairs in random order, kept while
/// both endpoints have spare degree.
pub fn bounded_degree(n: usize, d: usize, rng: &mut Rng) -> Result<Graph> {
    let mut pairs: Vec<(NodeId, NodeId)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
    pairs.shuffle(rng);
    let mut deg = vec![0; n + 1];
    let mut edges = Vec::new();
    for (u, v) in pairs {
        if deg[u] < d && deg[v] < d {
            deg[u] += 1;
            deg[v] += 1;
            edges.push((u, v));
        }
    }
    Graph::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::is_nontrivial;
    use crate::rng::rng_from_seed;

    #[test]
    fn random_nontrivial_on_complete_and_sparse_graphs() {
        let mut rng = rng_from_seed(3);
        for n in [4, 16, 32] {
            let g = Graph::complete(n);
            let s = random_nontrivial(&g, 5 * n, &mut rng).unwrap();
            assert_eq!(s.len(), 5 * n);
            assert!(is_nontrivial(&s, &g));
        }
        let cycle = Graph::new(8, (1..=8).map(|i| (i, i % 8 + 1)).collect()).unwrap();
        let s = random_nontrivial(&cycle, 40, &mut rng).unwrap();
        assert!(is_nontrivial(&s, &cycle));
    }

    #[test]
    fn periodic_arcs_have_fixed_length() {
        let mut rng = rng_from_seed(1);
        let s = periodic(10, 7, 50, &mut rng).unwrap();
        assert!(find_arcs(&s).iter().all(|a| a.len() == 8));
    }

    #[test]
    fn graph_models() {
        let mut rng = rng_from_seed(5);
        let g = bounded_degree(20, 3, &mut rng).unwrap();
        assert!((1..=20).all(|v| g.neighbors(v).len() <= 3));
        assert_eq!(erdos_renyi(10, 1.0, &mut rng).unwrap().num_edges(), 45);
        assert_eq!(erdos_renyi(10, 0.0, &mut rng).unwrap().num_edges(), 0);
        assert!(erdos_renyi(10, 1.5, &mut rng).is_err());
    }

    #[test]
    fn fast_slow_shape() {
        let mut rng = rng_from_seed(1);
        let s = fast_slow(16, 4, 80, &mut rng).unwrap();
        assert_eq!(s.len(), 80);
        assert!(is_nontrivial(&s, &Graph::complete(16)));
    }
}
