//! FLIP on a weighted triangle under each pivot rule.

use fliplab::flip::{is_local_optimum, run_flip, PivotRule};
use fliplab::instance::{Configuration, Graph, WeightedInstance};

fn main() -> fliplab::error::Result<()> {
    let g = Graph::new(3, vec![(1, 2), (1, 3), (2, 3)])?;
    let inst = WeightedInstance::new(g, vec![0.5, -0.2, 0.3])?;
    let start = Configuration::uniform(3, 1);
    for rule in [PivotRule::First, PivotRule::Best, PivotRule::Random] {
        let t = run_flip(&inst, &start, rule, 100, 7)?;
        println!(
            "{rule:6} moves={:?} gains={:?} cut={} local_opt={}",
            t.moves,
            t.gains,
            inst.cut_weight(&t.final_state)?,
            is_local_optimum(&inst, &t.final_state)?
        );
    }
    Ok(())
}
