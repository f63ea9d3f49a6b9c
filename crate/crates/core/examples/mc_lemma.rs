//! Monte Carlo estimate of the probability that several linear forms of
//! uniform weights land in a window of width ε at once.

use fliplab::instance::DistributionSpec;
use fliplab::lab::mc_lemma_probability;

fn main() -> fliplab::error::Result<()> {
    let d = DistributionSpec::uniform(-1.0, 1.0)?;
    let cases: [(&str, Vec<Vec<i64>>); 4] = [
        ("k=1", vec![vec![1]]),
        ("k=2 orthogonal", vec![vec![1, 0], vec![0, 1]]),
        ("k=2 skew", vec![vec![1, 0], vec![1, 1]]),
        ("k=3", vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]),
    ];
    for (name, v) in cases {
        let dists = vec![d; v[0].len()];
        let r = mc_lemma_probability(&v, &dists, 0.2, 1_000_000, 1)?;
        println!("{name:15} p={:.6} ± {:.6}  bound={:.6}", r.probability, r.ci_half_width, r.bound);
    }
    Ok(())
}
