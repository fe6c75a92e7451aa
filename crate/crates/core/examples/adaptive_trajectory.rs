//! Adaptive estimation with an error trajectory, summarised over ten windows.
//! Pass a path to also write the trajectory as CSV.

use msetarx::io::write_trajectory;
use msetarx::{adaptive_fit, make_dgp, simulate_msetarx, Algorithm, Dgp, FitConfig, SimulationConfig};

fn main() -> msetarx::Result<()> {
    let spec = make_dgp(Dgp::Dgp1);
    let sim = simulate_msetarx(&spec, &SimulationConfig::new(50_000, 1))?;
    let truth = spec.stacked_thetas()?;
    let mut cfg = FitConfig::new(spec.partition.clone(), spec.delay, spec.p, spec.q, Algorithm::Adaptive);
    cfg.record_trajectory = true;
    cfg.truth = Some(truth.clone());
    let res = adaptive_fit(&sim.y, &sim.f, &cfg)?;

    let traj = res.trajectory.as_deref().unwrap_or_default();
    let block = traj.len() / 10;
    for (b, chunk) in traj.chunks(block).take(10).enumerate() {
        let mean = chunk.iter().map(|p| p.max_abs_error).sum::<f64>() / chunk.len() as f64;
        println!("window {:2}: mean max |error| {:.4}", b + 1, mean);
    }
    println!("final max |error| {:.4}", res.max_abs_error(&truth));
    if let Some(path) = std::env::args().nth(1) {
        write_trajectory(&path, traj)?;
        println!("trajectory written to {}", path);
    }
    Ok(())
}
