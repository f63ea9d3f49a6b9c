//! Reduce Max-2SAT, directed cut, Hopfield and coordination games to binary
//! function optimization and run FLIP on each.

use fliplab::csp::{
    hopfield_is_stable, read_wcnf, reduce_coordination, reduce_directed_cut, reduce_hopfield, reduce_max2sat,
    satisfied_weight, Assignment, Bfop, BfopInstance,
};
use fliplab::flip::{run_dynamics, verify_trace, PivotRule};
use fliplab::instance::Graph;

fn flip(name: &str, inst: &BfopInstance<f64>) -> Assignment {
    let sys = Bfop::new(inst);
    let t = run_dynamics(&sys, Assignment::zeros(inst.n()), PivotRule::Best, 1000, 0);
    verify_trace(&sys, &t).expect("valid trace");
    println!("{name:10} steps={} objective={}", t.steps(), inst.objective(&t.final_state).unwrap());
    t.final_state
}

fn main() -> fliplab::error::Result<()> {
    let wcnf = "p wcnf 4 5\n3 1 -2 0\n2 2 3 0\n4 -1 -3 0\n1 -4 2 0\n2 4 0\n";
    let (n, clauses) = read_wcnf(wcnf)?;
    let a = flip("max2sat", &reduce_max2sat(n, &clauses)?);
    println!("           satisfied weight {}", satisfied_weight(&clauses, &a));

    flip("dcut", &reduce_directed_cut(4, &[(1, 2, 1.0), (2, 3, 0.7), (3, 1, 0.4), (3, 4, 0.9)])?);

    let g = Graph::new(4, vec![(1, 2), (2, 3), (3, 4), (4, 1)])?;
    let (w, th) = (vec![0.8, -0.5, 0.3, -0.9], vec![0.1, -0.2, 0.0, 0.05]);
    let a = flip("hopfield", &reduce_hopfield(&g, &w, &th)?);
    let c = a.to_configuration();
    let stable = (1..=4).map(|u| hopfield_is_stable(&g, &w, &th, &c, u)).collect::<Result<Vec<_>, _>>()?;
    println!("           stable {}", stable.iter().all(|&s| s));

    let payoffs = vec![[[1.0, 0.0], [0.0, 2.0]]; 4];
    flip("coordgame", &reduce_coordination(&g, &payoffs)?);
    Ok(())
}
