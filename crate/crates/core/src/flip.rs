//! Single-flip local search (FLIP) and its generic better-response form.
//!
//! A [`FlipSystem`] is anything with binary units whose flip gain can be
//! evaluated locally: Max-Cut on a [`WeightedInstance`] and the binary function
//! problems in [`crate::csp`] both implement it, so one driver serves both.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Configuration, NodeId, WeightedInstance};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PivotRule {
    /// Lowest unit id with an improving flip.
    First,
    /// Largest gain; ties to the lowest id.
    Best,
    /// Uniform over improving units, drawn from the run's seed.
    Random,
}

impl std::str::FromStr for PivotRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(PivotRule::First),
            "best" => Ok(PivotRule::Best),
            "random" => Ok(PivotRule::Random),
            _ => Err(Error::validation(format!("unknown pivot rule '{s}' (first|best|random)"))),
        }
    }
}

impl std::fmt::Display for PivotRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PivotRule::First => "first",
            PivotRule::Best => "best",
            PivotRule::Random => "random",
        })
    }
}

pub trait FlipSystem {
    type Value: Scalar;
    type State: Clone;

    /// Units are numbered `1..=num_units()`.
    fn num_units(&self) -> usize;
    fn objective(&self, state: &Self::State) -> Self::Value;
    fn gain(&self, state: &Self::State, v: usize) -> Self::Value;
    fn apply_flip(&self, state: &mut Self::State, v: usize);
    /// Units whose gain may change when `v` flips (excluding `v` itself).
    fn dependents(&self, v: usize) -> Vec<usize>;
}

/// Recorded execution. `gains[i]` is the gain of `moves[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace<S, W> {
    pub initial: S,
    pub moves: Vec<usize>,
    pub gains: Vec<W>,
    pub final_state: S,
    pub terminated: bool,
}

impl<S, W> Trace<S, W> {
    pub fn steps(&self) -> usize {
        self.moves.len()
    }
}

pub type FlipTrace<W = f64> = Trace<Configuration, W>;

/// Max-Cut as a flip system. Borrowed so many runs can share one instance.
pub struct MaxCut<'a, W> {
    inst: &'a WeightedInstance<W>,
}

impl<'a, W: Scalar> MaxCut<'a, W> {
    pub fn new(inst: &'a WeightedInstance<W>) -> Self {
        MaxCut { inst }
    }
}

impl<W: Scalar> FlipSystem for MaxCut<'_, W> {
    type Value = W;
    type State = Configuration;

    fn num_units(&self) -> usize {
        self.inst.n()
    }
    fn objective(&self, state: &Configuration) -> W {
        self.inst.cut_weight(state).expect("total configuration")
    }
    fn gain(&self, state: &Configuration, v: usize) -> W {
        self.inst.flip_gain_unchecked(state, v)
    }
    fn dependents(&self, v: usize) -> Vec<usize> {
        self.inst.graph().neighbors(v).iter().map(|&(u, _)| u).collect()
    }
    fn apply_flip(&self, state: &mut Configuration, v: usize) {
        state.flip(v);
    }
}

/// Run improving flips from `init` until no unit improves or `step_cap` moves were made.
pub fn run_dynamics<S: FlipSystem>(
    sys: &S,
    init: S::State,
    rule: PivotRule,
    step_cap: usize,
    seed: u64,
) -> Trace<S::State, S::Value> {
    let n = sys.num_units();
    let mut rng = rng_from_seed(seed);
    let mut state = init.clone();
    let mut gains: Vec<S::Value> =
        std::iter::once(S::Value::zero()).chain((1..=n).map(|v| sys.gain(&state, v))).collect();
    let mut moves = Vec::new();
    let mut step_gains = Vec::new();
    let mut improving = Vec::with_capacity(n);
    let mut terminated = false;

    loop {
        let pick = match rule {
            PivotRule::First => (1..=n).find(|&v| gains[v].is_improving()),
            PivotRule::Best => {
                let mut best: Option<usize> = None;
                for v in 1..=n {
                    if gains[v].is_improving() && best.is_none_or(|b| gains[v] > gains[b]) {
                        best = Some(v);
                    }
                }
                best
            }
            PivotRule::Random => {
                improving.clear();
                improving.extend((1..=n).filter(|&v| gains[v].is_improving()));
                if improving.is_empty() {
                    None
                } else {
                    Some(improving[rng.gen_range(0..improving.len())])
                }
            }
        };
        let Some(v) = pick else {
            terminated = true;
            break;
        };
        if moves.len() >= step_cap {
            break;
        }
        moves.push(v);
        step_gains.push(gains[v].clone());
        sys.apply_flip(&mut state, v);
        gains[v] = sys.gain(&state, v);
        for u in sys.dependents(v) {
            gains[u] = sys.gain(&state, u);
        }
    }

    Trace { initial: init, moves, gains: step_gains, final_state: state, terminated }
}

/// FLIP for Max-Cut.
pub fn run_flip<W: Scalar>(
    inst: &WeightedInstance<W>,
    init: &Configuration,
    rule: PivotRule,
    step_cap: usize,
    seed: u64,
) -> Result<FlipTrace<W>> {
    if init.n() != inst.n() || !init.is_total() {
        return Err(Error::validation("initial configuration must be total on the instance"));
    }
    Ok(run_dynamics(&MaxCut::new(inst), init.clone(), rule, step_cap, seed))
}

pub fn default_step_cap(n: usize) -> usize {
    10usize.saturating_mul(n.saturating_pow(3))
}

/// True iff no single flip is improving (gain above the numeric mode's threshold).
pub fn is_local_optimum<W: Scalar>(inst: &WeightedInstance<W>, cfg: &Configuration) -> Result<bool> {
    for v in 1..=inst.n() {
        if inst.flip_gain(cfg, v)?.is_improving() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimum over arcs (consecutive occurrences of a unit) of the two endpoint gains.
pub fn min_arc_gain<S, W: Scalar>(trace: &Trace<S, W>) -> Option<W> {
    let mut last: std::collections::HashMap<usize, usize> = Default::default();
    let mut best: Option<W> = None;
    for (i, &v) in trace.moves.iter().enumerate() {
        if let Some(j) = last.insert(v, i) {
            let g = trace.gains[j].clone() + trace.gains[i].clone();
            if best.as_ref().is_none_or(|b| g < *b) {
                best = Some(g);
            }
        }
    }
    best
}

/// Replay a trace and check every contract: gains match and are improving,
/// the objective strictly increases, the final state matches, and a
/// terminated trace ends at a local optimum.
pub fn verify_trace<S>(sys: &S, trace: &Trace<S::State, S::Value>) -> Result<()>
where
    S: FlipSystem,
    S::State: PartialEq,
{
    if trace.moves.len() != trace.gains.len() {
        return Err(Error::validation("moves and gains differ in length"));
    }
    let mut state = trace.initial.clone();
    let mut obj = sys.objective(&state);
    for (i, (&v, g)) in trace.moves.iter().zip(&trace.gains).enumerate() {
        if v == 0 || v > sys.num_units() {
            return Err(Error::UnknownNode(v));
        }
        let expect = sys.gain(&state, v);
        if expect != *g {
            return Err(Error::invariant(format!("step {i}: recorded gain {g:?} != replayed {expect:?}")));
        }
        if !g.is_improving() {
            return Err(Error::invariant(format!("step {i}: gain {g:?} is not improving")));
        }
        sys.apply_flip(&mut state, v);
        let next = sys.objective(&state);
        if !(next > obj) {
            return Err(Error::invariant(format!("step {i}: objective did not increase")));
        }
        obj = next;
    }
    if state != trace.final_state {
        return Err(Error::invariant("replayed final state differs from recorded"));
    }
    if trace.terminated && (1..=sys.num_units()).any(|v| sys.gain(&state, v).is_improving()) {
        return Err(Error::invariant("trace marked terminated but final state is not locally optimal"));
    }
    Ok(())
}

/// Configuration after the first `upto` moves of `moves` from `init`.
pub fn replay(init: &Configuration, moves: &[NodeId], upto: usize) -> Configuration {
    let mut cfg = init.clone();
    for &v in &moves[..upto] {
        cfg.flip(v);
    }
    cfg
}

/// On-disk trace format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub initial: Vec<i8>,
    pub moves: Vec<NodeId>,
    pub gains: Vec<f64>,
    pub terminated: bool,
}

impl TraceFile {
    pub fn from_trace(trace: &FlipTrace<f64>) -> Result<Self> {
        Ok(TraceFile {
            initial: trace.initial.to_signs()?,
            moves: trace.moves.clone(),
            gains: trace.gains.clone(),
            terminated: trace.terminated,
        })
    }

    pub fn into_trace(self) -> Result<FlipTrace<f64>> {
        if self.moves.len() != self.gains.len() {
            return Err(Error::validation("trace: 'moves' and 'gains' differ in length"));
        }
        let initial = Configuration::from_signs(&self.initial)?;
        if let Some(&v) = self.moves.iter().find(|&&v| v == 0 || v > initial.n()) {
            return Err(Error::validation(format!("trace: move {v} is not a node of 'initial'")));
        }
        let final_state = replay(&initial, &self.moves, self.moves.len());
        Ok(Trace { initial, moves: self.moves, gains: self.gains, final_state, terminated: self.terminated })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Graph;

    fn k3() -> WeightedInstance<f64> {
        let g = Graph::new(3, vec![(1, 2), (1, 3), (2, 3)]).unwrap();
        WeightedInstance::new(g, vec![0.5, -0.2, 0.3]).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn k3_best_improvement() {
        let inst = k3();
        let t = run_flip(&inst, &Configuration::uniform(3, 1), PivotRule::Best, 100, 0).unwrap();
        assert_eq!(t.moves, vec![2]);
        assert!(t.terminated);
        assert!((inst.cut_weight(&t.final_state).unwrap() - 0.8).abs() < 1e-12);
        assert!(is_local_optimum(&inst, &t.final_state).unwrap());
    }

    #[test]
    fn k3_first_improvement_hand_trace() {
        // all +1: gains (0.3, 0.8, 0.1) -> flip 1
        // (-1,+1,+1): gains (-0.3, -0.2, 0.5) -> flip 3
        // (-1,+1,-1): gains (-0.7, -0.8, -0.5) -> stop, cut 0.8
        let inst = k3();
        let t = run_flip(&inst, &Configuration::uniform(3, 1), PivotRule::First, 100, 0).unwrap();
        assert_eq!(t.moves, vec![1, 3]);
        assert!(close(&t.gains, &[0.3, 0.5]));
        assert!(t.terminated);
        assert!((inst.cut_weight(&t.final_state).unwrap() - 0.8).abs() < 1e-12);
        verify_trace(&MaxCut::new(&inst), &t).unwrap();
    }

    #[test]
    fn already_optimal_is_empty() {
        let inst = k3();
        let init = Configuration::from_signs(&[1, -1, 1]).unwrap();
        let t = run_flip(&inst, &init, PivotRule::Random, 100, 3).unwrap();
        assert!(t.moves.is_empty() && t.terminated);
    }

    #[test]
    fn local_optimum_examples() {
        let inst = k3();
        assert!(is_local_optimum(&inst, &Configuration::from_signs(&[1, -1, 1]).unwrap()).unwrap());
        assert!(!is_local_optimum(&inst, &Configuration::uniform(3, 1)).unwrap());
        let neg = WeightedInstance::new(Graph::complete(3), vec![-0.1, -0.5, -0.9]).unwrap();
        assert!(is_local_optimum(&neg, &Configuration::uniform(3, -1)).unwrap());
    }

    #[test]
    fn step_cap_stops_early() {
        let inst = k3();
        let t = run_flip(&inst, &Configuration::uniform(3, 1), PivotRule::First, 1, 0).unwrap();
        assert_eq!(t.steps(), 1);
        assert!(!t.terminated);
        let t0 = run_flip(&inst, &Configuration::uniform(3, 1), PivotRule::First, 0, 0).unwrap();
        assert_eq!(t0.steps(), 0);
        assert!(!t0.terminated);
    }

    #[test]
    fn min_arc_gain_examples() {
        let t: FlipTrace = Trace {
            initial: Configuration::uniform(2, 1),
            moves: vec![2],
            gains: vec![0.4],
            final_state: Configuration::uniform(2, 1),
            terminated: true,
        };
        assert_eq!(min_arc_gain(&t), None);
        let t2: FlipTrace = Trace { moves: vec![1, 2, 1], gains: vec![0.2, 0.5, 0.1], ..t };
        assert!((min_arc_gain(&t2).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn trace_file_round_trip() {
        let inst = k3();
        let t = run_flip(&inst, &Configuration::uniform(3, 1), PivotRule::First, 100, 0).unwrap();
        let f = TraceFile::from_trace(&t).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        let back: TraceFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_trace().unwrap(), t);
    }

    mod props {
        use super::*;
        use crate::instance::{DistributionSpec, Graph};
        use crate::rng::rng_from_seed;
        use crate::scalar::Exact;
        use proptest::prelude::*;

        fn rule_of(i: u8) -> PivotRule {
            [PivotRule::First, PivotRule::Best, PivotRule::Random][i as usize % 3]
        }

        fn instance(seed: u64, n: usize) -> (WeightedInstance<f64>, Configuration) {
            let mut rng = rng_from_seed(seed);
            let g = Graph::complete(n);
            let d = DistributionSpec::uniform(-1.0, 1.0).unwrap();
            let w = (0..g.num_edges()).map(|_| d.sample(&mut rng)).collect();
            (WeightedInstance::new(g, w).unwrap(), Configuration::random(n, &mut rng))
        }

        proptest! {
            #[test]
            fn traces_are_monotone_and_sound(seed in any::<u64>(), n in 2usize..14, r in 0u8..3) {
                let (inst, init) = instance(seed, n);
                let t = run_flip(&inst, &init, rule_of(r), default_step_cap(n), seed).unwrap();
                prop_assert!(t.terminated);
                prop_assert!(verify_trace(&MaxCut::new(&inst), &t).is_ok());
                prop_assert!(is_local_optimum(&inst, &t.final_state).unwrap());
            }

            #[test]
            fn replay_is_deterministic(seed in any::<u64>(), n in 2usize..14, r in 0u8..3) {
                let (inst, init) = instance(seed, n);
                let a = run_flip(&inst, &init, rule_of(r), 1000, seed).unwrap();
                let b = run_flip(&inst, &init, rule_of(r), 1000, seed).unwrap();
                prop_assert_eq!(a, b);
            }

            #[test]
            fn steps_bounded_by_min_gain(seed in any::<u64>(), n in 2usize..12, r in 0u8..3) {
                let (inst, init) = instance(seed, n);
                let exact = inst.to_exact();
                let t = run_flip(&exact, &init, rule_of(r), default_step_cap(n), seed).unwrap();
                if let Some(delta) = t.gains.iter().min() {
                    prop_assert!(*delta > Exact::zero());
                    let bound = Exact::from_integer((2 * n * n).into()) / delta.clone();
                    prop_assert!(Exact::from_integer(t.steps().into()) <= bound, "{} steps, bound {}", t.steps(), bound);
                }
            }
        }
    }
}
