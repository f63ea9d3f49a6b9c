//! Run the extractor over generated sequences and tally which case fires.

use std::collections::BTreeMap;

use fliplab::arcs::MoveSequence;
use fliplab::extraction::{extract, ExtractOptions};
use fliplab::generate::{fast_slow, layered, periodic, random_nontrivial};
use fliplab::instance::{Configuration, Graph};
use fliplab::rng::{derive_seed, rng_from_seed};

fn main() {
    let trials: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    for n in [16usize, 32, 64] {
        let g = Graph::complete(n);
        let m = 5 * n;
        let families: Vec<(&str, Box<dyn Fn(u64) -> Option<MoveSequence>>)> = vec![
            ("random", Box::new(|s| random_nontrivial(&g, m, &mut rng_from_seed(s)).ok())),
            ("periodic", Box::new(|s| periodic(n, n / 2 + (s as usize % (n / 2)), m, &mut rng_from_seed(s)).ok())),
            ("fast-slow", Box::new(|s| fast_slow(n, 2 + s as usize % (n / 4), m, &mut rng_from_seed(s)).ok())),
            (
                "layered",
                Box::new(|s| {
                    let slow = 2 + s as usize % (n / 2);
                    let fast = 2 + (s / 7) as usize % (n - slow - 1).max(1);
                    layered(n, slow, fast.min(n - slow), 1 + (s / 3) as usize % 4, m, &mut rng_from_seed(s)).ok()
                }),
            ),
        ];
        for (name, gen) in &families {
            let mut tally: BTreeMap<String, usize> = BTreeMap::new();
            for trial in 0..trials {
                let seed = derive_seed(n as u64, &[trial]);
                let Some(seq) = gen(seed) else {
                    *tally.entry("gen-failed".into()).or_default() += 1;
                    continue;
                };
                let gamma = Configuration::random(n, &mut rng_from_seed(seed ^ 1));
                let key = match extract(&seq, &gamma, &g, ExtractOptions::default()) {
                    Ok(x) => x.certificate.case.label().to_string(),
                    Err(e) => {
                        let s = e.to_string();
                        eprintln!("n={n} {name}: {s}");
                        format!("err:{}", s.split(':').next().unwrap_or(""))
                    }
                };
                *tally.entry(key).or_default() += 1;
            }
            println!("n={n:3} {name:10} {tally:?}");
        }
    }
}
