//! Count windows of a FLIP trace in which every arc improves by at most ε.

use fliplab::flip::{run_flip, PivotRule};
use fliplab::instance::{Configuration, DistributionSpec, Graph, WeightedInstance};
use fliplab::lab::eps_improving_census;
use fliplab::rng::rng_from_seed;

fn main() -> fliplab::error::Result<()> {
    let n = 24;
    let mut rng = rng_from_seed(5);
    let g = Graph::complete(n);
    let d = DistributionSpec::uniform(-1.0, 1.0)?;
    let w = (0..g.num_edges()).map(|_| d.sample(&mut rng)).collect();
    let inst = WeightedInstance::new(g, w)?;
    let t = run_flip(&inst, &Configuration::random(n, &mut rng), PivotRule::Random, 100_000, 5)?;
    println!("trace of {} steps", t.steps());
    for eps in [0.01, 0.1, 1.0] {
        for window in [5, 20] {
            println!("eps={eps:5} window={window:3} windows={}", eps_improving_census(&t, eps, window)?);
        }
    }
    Ok(())
}
