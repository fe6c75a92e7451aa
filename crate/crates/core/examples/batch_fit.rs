//! Batch least squares on a simulated series, printed as a coefficient table.

use msetarx::cli::coefficient_table;
use msetarx::{batch_lse, make_dgp, simulate_msetarx, Algorithm, Dgp, FitConfig, SimulationConfig};

fn main() -> msetarx::Result<()> {
    let spec = make_dgp(Dgp::Dgp1);
    let sim = simulate_msetarx(&spec, &SimulationConfig::new(50_000, 1))?;
    let cfg = FitConfig::new(spec.partition.clone(), spec.delay, spec.p, spec.q, Algorithm::Batch);
    let res = batch_lse(&sim.y, &sim.f, &cfg)?;
    print!("{}", coefficient_table(&spec, &res));
    println!("max |estimate - truth| {:.4}", res.max_abs_error(&spec.stacked_thetas()?));
    Ok(())
}
