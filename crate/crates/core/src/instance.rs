//! Weighted graphs, configurations, the cut objective and smoothed weight specs.
//!
//! Node ids are 1-based throughout the crate. Edge ids are assigned in input
//! order and are the coordinate system for improvement vectors.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::scalar::{exact_from_f64, Exact, Scalar};

pub type NodeId = usize;
pub type EdgeId = usize;

/// Simple undirected graph on nodes `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    // adj[v] = (neighbor, edge id); slot 0 unused
    adj: Vec<Vec<(NodeId, EdgeId)>>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(NodeId, NodeId)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n + 1];
        let mut index = HashMap::with_capacity(edges.len());
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::validation(format!("edge {id} = ({u},{v}) has an endpoint outside [1..{n}]")));
            }
            if u == v {
                return Err(Error::validation(format!("edge {id} is a self-loop on node {u}")));
            }
            let key = (u.min(v), u.max(v));
            if index.insert(key, id).is_some() {
                return Err(Error::validation(format!("edge {id} = ({u},{v}) is a duplicate")));
            }
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        Ok(Graph { n, edges, adj, index })
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 1..=n {
            for v in u + 1..=n {
                edges.push((u, v));
            }
        }
        Graph::new(n, edges).expect("complete graph is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (NodeId, NodeId) {
        self.edges[id]
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        v >= 1 && v <= self.n
    }

    /// `(neighbor, edge id)` pairs incident to `v`.
    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adj[v]
    }

    pub fn edge_id(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.index.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn adjacent(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_id(u, v).is_some()
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if self.contains_node(v) {
            Ok(())
        } else {
            Err(Error::UnknownNode(v))
        }
    }
}

/// Assignment of a side (`-1` or `+1`) to a set of nodes.
///
/// Configurations may be partial; `get` on a node outside the domain is an error.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    // signs[v] in {-1, 0, +1}; 0 means undefined. Index 0 unused.
    signs: Vec<i8>,
}

impl Configuration {
    pub fn empty(n: usize) -> Self {
        Configuration { signs: vec![0; n + 1] }
    }

    pub fn uniform(n: usize, sign: i8) -> Self {
        assert!(sign == 1 || sign == -1);
        let mut signs = vec![sign; n + 1];
        signs[0] = 0;
        Configuration { signs }
    }

    /// The all-`-1` configuration used as the default for rank computations.
    pub fn all_minus(n: usize) -> Self {
        Self::uniform(n, -1)
    }

    /// Total configuration from signs of nodes `1..=signs.len()`.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut cfg = Self::empty(signs.len());
        for (i, &s) in signs.iter().enumerate() {
            cfg.set(i + 1, s)?;
        }
        Ok(cfg)
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut cfg = Self::empty(n);
        for v in 1..=n {
            cfg.signs[v] = if rng.gen::<bool>() { 1 } else { -1 };
        }
        cfg
    }

    /// Number of node slots (the `n` this configuration was built for).
    pub fn n(&self) -> usize {
        self.signs.len() - 1
    }

    pub fn get(&self, v: NodeId) -> Result<i8> {
        match self.signs.get(v) {
            Some(&s) if v > 0 && s != 0 => Ok(s),
            _ => Err(Error::Domain(v)),
        }
    }

    /// Sign of `v`; panics outside the domain. For hot loops on total configurations.
    #[inline]
    pub fn sign(&self, v: NodeId) -> i8 {
        let s = self.signs[v];
        debug_assert!(s != 0, "node {v} outside configuration domain");
        s
    }

    pub fn is_defined(&self, v: NodeId) -> bool {
        v > 0 && v < self.signs.len() && self.signs[v] != 0
    }

    pub fn set(&mut self, v: NodeId, sign: i8) -> Result<()> {
        if v == 0 || v >= self.signs.len() {
            return Err(Error::UnknownNode(v));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::validation(format!("sign of node {v} must be ±1, got {sign}")));
        }
        self.signs[v] = sign;
        Ok(())
    }

    #[inline]
    pub fn flip(&mut self, v: NodeId) {
        self.signs[v] = -self.signs[v];
    }

    pub fn is_total(&self) -> bool {
        self.signs[1..].iter().all(|&s| s != 0)
    }

    pub fn domain(&self) -> impl Iterator<Item = NodeId> + '_ {
        (1..self.signs.len()).filter(move |&v| self.signs[v] != 0)
    }

    pub fn restrict(&self, nodes: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut out = Self::empty(self.n());
        for v in nodes {
            out.set(v, self.get(v)?)?;
        }
        Ok(out)
    }

    /// Signs of nodes `1..=n`; errors if partial.
    pub fn to_signs(&self) -> Result<Vec<i8>> {
        (1..self.signs.len()).map(|v| self.get(v)).collect()
    }

    pub fn negated(&self) -> Self {
        Configuration { signs: self.signs.iter().map(|s| -s).collect() }
    }
}

/// Uniform distribution on `[lo, hi] ⊆ [-1, 1]`; its density is `1/(hi-lo)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub lo: f64,
    pub hi: f64,
}

impl DistributionSpec {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo < -1.0 || hi > 1.0 || lo >= hi {
            return Err(Error::validation(format!("distribution [{lo}, {hi}] must satisfy -1 <= lo < hi <= 1")));
        }
        Ok(DistributionSpec { lo, hi })
    }

    /// Interval of width `1/phi` centred at `center`, shifted inward to stay in `[-1,1]`.
    pub fn with_density(center: f64, phi: f64) -> Result<Self> {
        if !(phi >= 0.5) || !phi.is_finite() {
            return Err(Error::validation(format!("density bound phi={phi} must be finite and >= 1/2")));
        }
        let width = 1.0 / phi;
        let lo = (center - width / 2.0).clamp(-1.0, 1.0 - width);
        Self::uniform(lo, (lo + width).min(1.0))
    }

    pub fn density(&self) -> f64 {
        1.0 / (self.hi - self.lo)
    }

    /// True iff this spec's density is at most `phi`.
    pub fn is_phi_bounded(&self, phi: f64) -> bool {
        self.hi - self.lo >= 1.0 / phi
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        rng.gen_range(self.lo..=self.hi)
    }

    fn validate(&self) -> Result<()> {
        Self::uniform(self.lo, self.hi).map(|_| ())
    }
}

/// Graph with per-edge weights in `[-1, 1]` and optional smoothing specs.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedInstance<W = f64> {
    graph: Graph,
    weights: Vec<W>,
    dists: Option<Vec<DistributionSpec>>,
}

impl<W: Scalar> WeightedInstance<W> {
    pub fn new(graph: Graph, weights: Vec<W>) -> Result<Self> {
        Self::with_dists(graph, weights, None)
    }

    pub fn with_dists(graph: Graph, weights: Vec<W>, dists: Option<Vec<DistributionSpec>>) -> Result<Self> {
        if weights.len() != graph.num_edges() {
            return Err(Error::validation(format!("{} weights for {} edges", weights.len(), graph.num_edges())));
        }
        let (lo, hi) = (W::from_i64(-1), W::from_i64(1));
        for (e, w) in weights.iter().enumerate() {
            if !(*w >= lo && *w <= hi) {
                return Err(Error::validation(format!("weight of edge {e} = {w:?} is outside [-1,1]")));
            }
        }
        if let Some(d) = &dists {
            if d.len() != graph.num_edges() {
                return Err(Error::validation(format!(
                    "{} distribution specs for {} edges",
                    d.len(),
                    graph.num_edges()
                )));
            }
            for spec in d {
                spec.validate()?;
            }
        }
        Ok(WeightedInstance { graph, weights, dists })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    pub fn weight(&self, e: EdgeId) -> &W {
        &self.weights[e]
    }

    pub fn dists(&self) -> Option<&[DistributionSpec]> {
        self.dists.as_deref()
    }

    /// Weight of the cut: sum of weights of edges whose endpoints disagree.
    pub fn cut_weight(&self, cfg: &Configuration) -> Result<W> {
        let mut total = W::zero();
        for v in 1..=self.n() {
            cfg.get(v)?;
        }
        for (e, &(u, v)) in self.graph.edges.iter().enumerate() {
            if cfg.sign(u) != cfg.sign(v) {
                total = total + self.weights[e].clone();
            }
        }
        Ok(total)
    }

    /// Change of the cut weight when `v` switches sides.
    pub fn flip_gain(&self, cfg: &Configuration, v: NodeId) -> Result<W> {
        self.graph.check_node(v)?;
        let sv = cfg.get(v)?;
        let mut gain = W::zero();
        for &(u, e) in self.graph.neighbors(v) {
            let su = cfg.get(u)?;
            gain = signed_add(gain, &self.weights[e], sv * su);
        }
        Ok(gain)
    }

    /// `flip_gain` without validation; `cfg` must be total on this graph.
    #[inline]
    pub fn flip_gain_unchecked(&self, cfg: &Configuration, v: NodeId) -> W {
        let sv = cfg.sign(v);
        let mut gain = W::zero();
        for &(u, e) in self.graph.neighbors(v) {
            gain = signed_add(gain, &self.weights[e], sv * cfg.sign(u));
        }
        gain
    }

    pub fn map_weights<V: Scalar>(&self, f: impl Fn(&W) -> V) -> Result<WeightedInstance<V>> {
        WeightedInstance::with_dists(self.graph.clone(), self.weights.iter().map(f).collect(), self.dists.clone())
    }
}

impl WeightedInstance<f64> {
    /// Structure-only instance: zero weights, no specs.
    pub fn unweighted(graph: Graph) -> Self {
        let m = graph.num_edges();
        WeightedInstance { graph, weights: vec![0.0; m], dists: None }
    }

    /// Fresh weights drawn independently per edge from its spec; a pure function of `seed`.
    pub fn sample_weights(&self, seed: u64) -> Result<Self> {
        let dists =
            self.dists.as_ref().ok_or_else(|| Error::Precondition("instance has no distribution specs".into()))?;
        let mut rng = rng_from_seed(seed);
        let weights = dists.iter().map(|d| d.sample(&mut rng)).collect();
        WeightedInstance::with_dists(self.graph.clone(), weights, self.dists.clone())
    }

    pub fn to_exact(&self) -> WeightedInstance<Exact> {
        WeightedInstance {
            graph: self.graph.clone(),
            weights: self.weights.iter().map(|&w| exact_from_f64(w)).collect(),
            dists: self.dists.clone(),
        }
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            n: self.n(),
            edges: self.graph.edges.iter().map(|&(u, v)| [u, v]).collect(),
            weights: Some(self.weights.clone()),
            dists: self.dists.clone(),
        }
    }
}

#[inline]
fn signed_add<W: Scalar>(acc: W, w: &W, sign: i8) -> W {
    if sign > 0 {
        acc + w.clone()
    } else {
        acc - w.clone()
    }
}

/// On-disk graph format. Node ids are 1-based; edge order defines edge ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dists: Option<Vec<DistributionSpec>>,
}

impl GraphFile {
    pub fn graph(&self) -> Result<Graph> {
        Graph::new(self.n, self.edges.iter().map(|e| (e[0], e[1])).collect())
    }

    /// Build the instance. Missing weights are sampled from `dists` with `seed`,
    /// or default to zero when no specs are given either.
    pub fn into_instance(self, seed: u64) -> Result<WeightedInstance<f64>> {
        let graph = self.graph()?;
        match (self.weights, self.dists) {
            (Some(w), d) => WeightedInstance::with_dists(graph, w, d),
            (None, Some(d)) => {
                let m = graph.num_edges();
                WeightedInstance::with_dists(graph, vec![0.0; m], Some(d))?.sample_weights(seed)
            }
            (None, None) => Ok(WeightedInstance::unweighted(graph)),
        }
    }
}
