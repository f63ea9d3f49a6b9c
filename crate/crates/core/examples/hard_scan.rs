//! Build layered low-rank sequences and report the worst substring rank ratio.

use fliplab::hard::{build_hard, check_structure, scan, ScanMode};

fn main() -> fliplab::Result<()> {
    let n1 = 2;
    let blocks = 120;
    for d in 2..=5 {
        let inst = build_hard(d, n1, blocks)?;
        check_structure(&inst)?;
        let r = scan(&inst, ScanMode::BlockAligned, 0)?;
        let a = r.argmax.unwrap();
        println!(
            "d={d} len={} max_ratio={:.5} at start={} len={} rank={} ratio*d={:.4} bound_checks={}",
            inst.len(),
            r.max_ratio,
            a.start,
            a.len,
            a.rank,
            r.max_ratio * d as f64,
            r.bound_checks
        );
    }
    Ok(())
}
