//! Simulates the six-regime reference process and prints regime occupancy.

use msetarx::{make_dgp, simulate_msetarx, Dgp, SimulationConfig};

fn main() -> msetarx::Result<()> {
    let spec = make_dgp(Dgp::Dgp1);
    let out = simulate_msetarx(&spec, &SimulationConfig::new(50_000, 1))?;
    let total: usize = out.regime_times.iter().sum();
    println!("{} rows, {} labelled", out.y.rows(), total);
    for r in spec.partition.regimes() {
        let n = out.regime_times[r.linear];
        println!("regime {} {}: {:6} ({:.4})", r.linear + 1, r.label(), n, n as f64 / total as f64);
    }
    println!("last observation: {:?}", out.y.row(out.y.rows() - 1));
    Ok(())
}
