//! Arcs, improvement vectors and rank of a move sequence; the rank does not
//! depend on the start configuration.

use fliplab::arcs::{classify, find_arcs, improvement_vector, rank_of_arcs_with, MoveSequence};
use fliplab::instance::{Configuration, Graph};
use fliplab::rng::rng_from_seed;

fn main() -> fliplab::error::Result<()> {
    let g = Graph::complete(5);
    let seq = MoveSequence::new(5, vec![1, 2, 3, 1, 4, 2, 5, 3, 1, 2])?;
    let arcs = find_arcs(&seq);
    let gamma = Configuration::uniform(5, 1);
    for a in &arcs {
        let v = improvement_vector(&seq, a, &gamma, &g)?;
        println!("arc node {} [{}, {}]: {:?}", a.node, a.left, a.right, v.0);
    }
    let mut rng = rng_from_seed(3);
    let ranks: Vec<usize> = (0..5)
        .map(|_| rank_of_arcs_with(&seq, &arcs, &g, &Configuration::random(5, &mut rng)))
        .collect::<Result<_, _>>()?;
    println!("rank under 5 random starts: {ranks:?}");
    let cls = classify(&seq, &g);
    println!("params {:?}, bad arcs {}", cls.params, cls.num_bad());
    Ok(())
}
