//! A scalar two-regime SETAR(1) built by hand, simulated and re-estimated.

use msetarx::{
    batch_lse, simulate_msetarx, Algorithm, ExogenousSpec, FitConfig, Matrix, ModelSpec,
    RegimeCoefficients, SimulationConfig, ThresholdPartition,
};

fn regime(j: usize, a0: f64, a1: f64) -> (Vec<usize>, RegimeCoefficients) {
    (
        vec![j],
        RegimeCoefficients { a0: vec![a0], a: vec![Matrix::from_diag(&[a1])], lambda: Matrix::zeros(1, 0) },
    )
}

fn main() -> msetarx::Result<()> {
    let spec = ModelSpec {
        dim: 1,
        kappa: 0,
        p: 1,
        q: 0,
        delay: 1,
        partition: ThresholdPartition::new(vec![vec![0.0]])?,
        regimes: vec![regime(1, 0.5, 0.6), regime(2, -0.5, -0.4)],
        exogenous: ExogenousSpec::none(),
        noise_cov_eps: Matrix::from_diag(&[0.25]),
    };
    let sim = simulate_msetarx(&spec, &SimulationConfig::new(10_000, 42))?;
    let cfg = FitConfig::new(spec.partition.clone(), 1, 1, 0, Algorithm::Batch);
    let res = batch_lse(&sim.y, &sim.f, &cfg)?;
    for r in &res.regimes {
        let t = r.theta.as_ref().unwrap();
        println!("regime {}: a0 = {:.4}, a1 = {:.4}, {} obs", r.linear + 1, t[(0, 0)], t[(1, 0)], r.count);
    }
    Ok(())
}
