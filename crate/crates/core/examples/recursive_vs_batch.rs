//! Recursive least squares converges to the batch solution as the initial
//! Gram ridge shrinks.

use msetarx::estimate::fit;
use msetarx::{make_dgp, simulate_msetarx, Algorithm, Dgp, FitConfig, SimulationConfig};

fn main() -> msetarx::Result<()> {
    let spec = make_dgp(Dgp::Dgp2);
    let sim = simulate_msetarx(&spec, &SimulationConfig::new(20_000, 3))?;
    let base = FitConfig::new(spec.partition.clone(), spec.delay, spec.p, spec.q, Algorithm::Batch);
    let batch = fit(&sim.y, &sim.f, &base)?;
    for ridge in [1.0, 1e-3, 1e-8, 0.0] {
        let cfg = FitConfig { algorithm: Algorithm::Recursive, ridge, ..base.clone() };
        let rec = fit(&sim.y, &sim.f, &cfg)?;
        let gap = rec
            .regimes
            .iter()
            .zip(&batch.regimes)
            .map(|(a, b)| a.theta.as_ref().unwrap().max_abs_diff(b.theta.as_ref().unwrap()))
            .fold(0.0, f64::max);
        println!("ridge {:<6e}: max |recursive - batch| = {:.3e}", ridge, gap);
    }
    Ok(())
}
