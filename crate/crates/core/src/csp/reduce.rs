//! Reductions of Max-2SAT, directed Max-Cut, Hopfield networks and network
//! coordination games to BFOP, with direct objective oracles.

use serde::{Deserialize, Serialize};

use super::{Assignment, BfopInstance, BinaryFn, Table1, Table2, UnaryFn};
use crate::error::{Error, Result};
use crate::instance::{Configuration, Graph};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    /// DIMACS convention: `-3` is the negation of variable 3.
    pub fn from_dimacs(x: i64) -> Result<Self> {
        if x == 0 {
            return Err(Error::validation("literal 0"));
        }
        Ok(Literal { var: x.unsigned_abs() as usize, negated: x < 0 })
    }

    pub fn holds(&self, a: &Assignment) -> bool {
        (a.get(self.var) == 1) != self.negated
    }

    fn truth(&self, value: usize) -> bool {
        (value == 1) != self.negated
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clause<W> {
    pub lits: Vec<Literal>,
    pub weight: W,
}

/// Weight of the satisfied clauses.
pub fn satisfied_weight<W: Scalar>(clauses: &[Clause<W>], a: &Assignment) -> W {
    clauses.iter().filter(|c| c.lits.iter().any(|l| l.holds(a))).fold(W::zero(), |acc, c| acc + c.weight.clone())
}

pub fn reduce_max2sat<W: Scalar>(n: usize, clauses: &[Clause<W>]) -> Result<BfopInstance<W>> {
    let mut binary = Vec::new();
    let mut unary = Vec::new();
    for c in clauses {
        let unit = |l: &Literal| -> Table1 { [i64::from(l.truth(0)), i64::from(l.truth(1))] };
        match c.lits.as_slice() {
            [l] => unary.push(UnaryFn { var: l.var, table: unit(l), weight: c.weight.clone() }),
            [l1, l2] if l1.var == l2.var => {
                if l1.negated != l2.negated {
                    return Err(Error::validation(format!("tautological clause on variable {}", l1.var)));
                }
                unary.push(UnaryFn { var: l1.var, table: unit(l1), weight: c.weight.clone() });
            }
            [l1, l2] => {
                let mut t: Table2 = [[0; 2]; 2];
                for (x, row) in t.iter_mut().enumerate() {
                    for (y, cell) in row.iter_mut().enumerate() {
                        *cell = i64::from(l1.truth(x) || l2.truth(y));
                    }
                }
                binary.push(BinaryFn { vars: [l1.var, l2.var], table: t, weight: c.weight.clone() });
            }
            _ => return Err(Error::validation(format!("clause with {} literals (need 1 or 2)", c.lits.len()))),
        }
    }
    BfopInstance::new(n, binary, unary)
}

/// Total weight of edges `u -> v` with `u = 0` and `v = 1`.
pub fn directed_cut_weight<W: Scalar>(arcs: &[(usize, usize, W)], a: &Assignment) -> W {
    arcs.iter().filter(|(u, v, _)| a.get(*u) == 0 && a.get(*v) == 1).fold(W::zero(), |acc, (_, _, w)| acc + w.clone())
}

pub fn reduce_directed_cut<W: Scalar>(n: usize, arcs: &[(usize, usize, W)]) -> Result<BfopInstance<W>> {
    let binary =
        arcs.iter().map(|(u, v, w)| BinaryFn { vars: [*u, *v], table: [[0, 1], [0, 0]], weight: w.clone() }).collect();
    BfopInstance::new(n, binary, vec![])
}

fn check_lengths(graph: &Graph, edge_values: usize, node_values: Option<usize>) -> Result<()> {
    if edge_values != graph.num_edges() {
        return Err(Error::validation(format!("{edge_values} edge values for {} edges", graph.num_edges())));
    }
    if let Some(k) = node_values {
        if k != graph.n() {
            return Err(Error::validation(format!("{k} thresholds for {} nodes", graph.n())));
        }
    }
    Ok(())
}

/// `p(γ) = Σ_u t_u γ(u) + Σ_(u,v) w_uv γ(u) γ(v)`; `thresholds[u - 1] = t_u`.
pub fn hopfield_potential<W: Scalar>(graph: &Graph, weights: &[W], thresholds: &[W], c: &Configuration) -> Result<W> {
    check_lengths(graph, weights.len(), Some(thresholds.len()))?;
    let mut p = W::zero();
    for u in 1..=graph.n() {
        p = p + W::from_i64(c.get(u)? as i64) * thresholds[u - 1].clone();
    }
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        p = p + W::from_i64((c.get(u)? * c.get(v)?) as i64) * weights[e].clone();
    }
    Ok(p)
}

/// `γ(u) (t_u + Σ_v w_uv γ(v)) >= 0`.
pub fn hopfield_is_stable<W: Scalar>(
    graph: &Graph,
    weights: &[W],
    thresholds: &[W],
    c: &Configuration,
    u: usize,
) -> Result<bool> {
    check_lengths(graph, weights.len(), Some(thresholds.len()))?;
    let mut field = thresholds[u - 1].clone();
    for &(v, e) in graph.neighbors(u) {
        field = field + W::from_i64(c.get(v)? as i64) * weights[e].clone();
    }
    let s = W::from_i64(c.get(u)? as i64) * field;
    Ok(!(s < W::zero()))
}

/// Hopfield potential as a BFOP under the encoding `-1 <-> 0`, `+1 <-> 1`.
pub fn reduce_hopfield<W: Scalar>(graph: &Graph, weights: &[W], thresholds: &[W]) -> Result<BfopInstance<W>> {
    check_lengths(graph, weights.len(), Some(thresholds.len()))?;
    let unary =
        (1..=graph.n()).map(|u| UnaryFn { var: u, table: [-1, 1], weight: thresholds[u - 1].clone() }).collect();
    let binary = graph
        .edges()
        .iter()
        .zip(weights)
        .map(|(&(u, v), w)| BinaryFn { vars: [u, v], table: [[1, -1], [-1, 1]], weight: w.clone() })
        .collect();
    BfopInstance::new(graph.n(), binary, unary)
}

/// Total payoff `Σ_e payoff_e[s_u][s_v]` of a network coordination game.
pub fn coordination_payoff<W: Scalar>(graph: &Graph, payoffs: &[[[W; 2]; 2]], a: &Assignment) -> Result<W> {
    check_lengths(graph, payoffs.len(), None)?;
    Ok(graph
        .edges()
        .iter()
        .zip(payoffs)
        .fold(W::zero(), |acc, (&(u, v), p)| acc + p[a.get(u) as usize][a.get(v) as usize].clone()))
}

/// One indicator function per strategy pair and edge, weighted by its payoff.
pub fn reduce_coordination<W: Scalar>(graph: &Graph, payoffs: &[[[W; 2]; 2]]) -> Result<BfopInstance<W>> {
    check_lengths(graph, payoffs.len(), None)?;
    let mut binary = Vec::with_capacity(4 * payoffs.len());
    for (&(u, v), p) in graph.edges().iter().zip(payoffs) {
        for (x, row) in p.iter().enumerate() {
            for (y, w) in row.iter().enumerate() {
                let mut t: Table2 = [[0; 2]; 2];
                t[x][y] = 1;
                binary.push(BinaryFn { vars: [u, v], table: t, weight: w.clone() });
            }
        }
    }
    BfopInstance::new(graph.n(), binary, vec![])
}

/// Weighted 2-CNF in DIMACS `wcnf` form: `p wcnf <vars> <clauses> [top]`,
/// then `<weight> <lit> [<lit>] 0` per clause. Comment lines start with `c`.
pub fn read_wcnf(text: &str) -> Result<(usize, Vec<Clause<f64>>)> {
    let mut n = None;
    let mut declared = 0;
    let mut clauses = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let bad = |msg: &str| Error::validation(format!("wcnf line {}: {msg}", i + 1));
        if let Some(rest) = line.strip_prefix('p') {
            let f: Vec<&str> = rest.split_whitespace().collect();
            if f.len() < 3 || f[0] != "wcnf" {
                return Err(bad("expected 'p wcnf <vars> <clauses>'"));
            }
            n = Some(f[1].parse::<usize>().map_err(|_| bad("bad variable count"))?);
            declared = f[2].parse::<usize>().map_err(|_| bad("bad clause count"))?;
            continue;
        }
        let nv = n.ok_or_else(|| bad("clause before the header"))?;
        let mut it = line.split_whitespace();
        let weight: f64 = it.next().and_then(|w| w.parse().ok()).ok_or_else(|| bad("bad weight"))?;
        let mut lits = Vec::new();
        let mut closed = false;
        for tok in it {
            let x: i64 = tok.parse().map_err(|_| bad("bad literal"))?;
            if x == 0 {
                closed = true;
                break;
            }
            let l = Literal::from_dimacs(x)?;
            if l.var > nv {
                return Err(bad(&format!("variable {} above {nv}", l.var)));
            }
            lits.push(l);
        }
        if !closed {
            return Err(bad("clause not terminated by 0"));
        }
        if lits.is_empty() || lits.len() > 2 {
            return Err(bad(&format!("{} literals (need 1 or 2)", lits.len())));
        }
        clauses.push(Clause { lits, weight });
    }
    let n = n.ok_or_else(|| Error::validation("missing 'p wcnf' header"))?;
    if clauses.len() != declared {
        return Err(Error::validation(format!("header declares {declared} clauses, found {}", clauses.len())));
    }
    Ok((n, clauses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::Bfop;
    use crate::flip::{run_dynamics, PivotRule};

    fn lit(x: i64) -> Literal {
        Literal::from_dimacs(x).unwrap()
    }

    #[test]
    fn clause_a_or_not_b() {
        let clauses = vec![Clause { lits: vec![lit(1), lit(-2)], weight: 1.0 }];
        let inst = reduce_max2sat(2, &clauses).unwrap();
        let mut sat = 0;
        for mask in 0..4 {
            let a = Assignment::from_mask(2, mask);
            let v = inst.objective(&a).unwrap();
            assert_eq!(v, satisfied_weight(&clauses, &a));
            sat += v as i32;
        }
        assert_eq!(sat, 3);
    }

    #[test]
    fn degenerate_clauses() {
        let taut = vec![Clause { lits: vec![lit(1), lit(-1)], weight: 1.0 }];
        assert!(reduce_max2sat(1, &taut).is_err());
        let dup = vec![Clause { lits: vec![lit(-1), lit(-1)], weight: 2.0 }];
        let inst = reduce_max2sat(1, &dup).unwrap();
        assert_eq!(inst.objective(&Assignment::from_mask(1, 0)).unwrap(), 2.0);
        assert_eq!(inst.objective(&Assignment::from_mask(1, 1)).unwrap(), 0.0);
    }

    #[test]
    fn single_directed_edge() {
        let inst = reduce_directed_cut(2, &[(1, 2, 1.0)]).unwrap();
        for mask in 0..4u64 {
            let a = Assignment::from_mask(2, mask);
            let expect = if a.get(1) == 0 && a.get(2) == 1 { 1.0 } else { 0.0 };
            assert_eq!(inst.objective(&a).unwrap(), expect);
        }
    }

    #[test]
    fn hopfield_single_node() {
        let g = Graph::new(1, vec![]).unwrap();
        let inst = reduce_hopfield(&g, &[], &[1.0]).unwrap();
        let c = Configuration::from_signs(&[-1]).unwrap();
        assert_eq!(hopfield_potential(&g, &[], &[1.0], &c).unwrap(), -1.0);
        assert!(!hopfield_is_stable(&g, &[], &[1.0], &c, 1).unwrap());
        let a = Assignment::from_configuration(&c).unwrap();
        assert_eq!(inst.objective(&a).unwrap(), -1.0);
        assert_eq!(inst.flip_gain(&a, 1).unwrap(), 2.0);
        let t = run_dynamics(&Bfop::new(&inst), a, PivotRule::First, 10, 0);
        assert!(t.terminated);
        assert_eq!(inst.objective(&t.final_state).unwrap(), 1.0);
        assert!(hopfield_is_stable(&g, &[], &[1.0], &t.final_state.to_configuration(), 1).unwrap());
    }

    #[test]
    fn coordination_game_payoff() {
        let g = Graph::new(2, vec![(1, 2)]).unwrap();
        let p = [[[3.0, 0.0], [1.0, 2.0]]];
        let inst = reduce_coordination(&g, &p).unwrap();
        for mask in 0..4 {
            let a = Assignment::from_mask(2, mask);
            assert_eq!(inst.objective(&a).unwrap(), coordination_payoff(&g, &p, &a).unwrap());
        }
    }

    #[test]
    fn wcnf_reader() {
        let text = "c example\np wcnf 3 3 10\n2 1 -2 0\n1.5 3 0\n1 -1 -3 0\n";
        let (n, cl) = read_wcnf(text).unwrap();
        assert_eq!(n, 3);
        assert_eq!(cl.len(), 3);
        assert_eq!(cl[0].lits, vec![lit(1), lit(-2)]);
        assert_eq!(cl[1].weight, 1.5);
        assert!(read_wcnf("p wcnf 2 1\n1 1 2 3 0\n").is_err());
        assert!(read_wcnf("p wcnf 2 2\n1 1 2 0\n").is_err());
        assert!(read_wcnf("1 1 0\n").is_err());
    }

    mod props {
        use super::*;
        use crate::generate::erdos_renyi;
        use crate::rng::rng_from_seed;
        use crate::scalar::Exact;
        use proptest::prelude::*;
        use rand::Rng as _;

        proptest! {
            #[test]
            fn hopfield_unstable_iff_positive_gain(seed in any::<u64>(), n in 2usize..10) {
                let mut rng = rng_from_seed(seed);
                let g = erdos_renyi(n, 0.5, &mut rng).unwrap();
                let int = |rng: &mut crate::rng::Rng| Exact::from_integer(rng.gen_range(-4i64..=4).into());
                let w: Vec<Exact> = (0..g.num_edges()).map(|_| int(&mut rng)).collect();
                let th: Vec<Exact> = (0..n).map(|_| int(&mut rng)).collect();
                let inst = reduce_hopfield(&g, &w, &th).unwrap();
                let a = Assignment::random(n, &mut rng);
                let c = a.to_configuration();
                for u in 1..=n {
                    let gain = inst.flip_gain(&a, u).unwrap();
                    prop_assert_eq!(!hopfield_is_stable(&g, &w, &th, &c, u).unwrap(), gain > Exact::from_integer(0.into()));
                }
            }
        }
    }
}
