//! A small smoothed-runtime experiment on complete graphs, printed as CSV.

use fliplab::flip::PivotRule;
use fliplab::lab::{rows_to_csv, run_experiment, ExperimentPlan, Family};

fn main() -> fliplab::error::Result<()> {
    let plan = ExperimentPlan {
        family: Family::Complete,
        sizes: vec![8, 16, 32],
        phis: vec![0.5, 4.0],
        rule: PivotRule::Random,
        trials: 50,
        base_seed: 1,
        step_cap: None,
        cells: None,
    };
    print!("{}", rows_to_csv(&run_experiment(&plan, 0)?)?);
    Ok(())
}
