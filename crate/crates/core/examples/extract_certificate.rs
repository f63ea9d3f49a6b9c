//! Extract a low-length, high-rank certificate from a random sequence and
//! verify it independently.

use fliplab::extraction::{check_certificate, extract, ExtractOptions};
use fliplab::generate::random_nontrivial;
use fliplab::instance::{Configuration, Graph};
use fliplab::rng::rng_from_seed;

fn main() -> fliplab::error::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(32);
    let mut rng = rng_from_seed(9);
    let g = Graph::complete(n);
    let seq = random_nontrivial(&g, 5 * n, &mut rng)?;
    let gamma = Configuration::random(n, &mut rng);
    let ex = extract(&seq, &gamma, &g, ExtractOptions::default())?;
    let c = &ex.certificate;
    println!(
        "case {} |B|={} rank={} ratio={:.4} normalized={:.4}",
        c.case.label(),
        c.b.len(),
        c.rank,
        c.ratio,
        ex.normalized_ratio()
    );
    println!("{}", serde_json::to_string(&ex.info)?);
    println!("check: {}", check_certificate(&seq, &gamma, c, &g));
    Ok(())
}
