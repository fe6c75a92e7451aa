//! Cycle condition for a first-order model whose first regime is explosive
//! on its own.

use msetarx::{cycle_spectral_radius, ExogenousSpec, Matrix, ModelSpec, RegimeCoefficients, ThresholdPartition};

fn regime(j: usize, a: Matrix) -> (Vec<usize>, RegimeCoefficients) {
    (vec![j, 1], RegimeCoefficients { a0: vec![0.0; 2], a: vec![a], lambda: Matrix::zeros(2, 0) })
}

fn main() -> msetarx::Result<()> {
    let spec = ModelSpec {
        dim: 2,
        kappa: 0,
        p: 1,
        q: 0,
        delay: 1,
        partition: ThresholdPartition::new(vec![vec![0.0], vec![]])?,
        regimes: vec![
            regime(1, Matrix::from_diag(&[2.0, 0.3])),
            regime(2, Matrix::from_diag(&[0.4, 0.3])),
        ],
        exogenous: ExogenousSpec::none(),
        noise_cov_eps: Matrix::identity(2),
    };
    for cycle in [vec![vec![1, 1], vec![2, 1]], vec![vec![1, 1], vec![1, 1]], vec![]] {
        let rho = cycle_spectral_radius(&spec, &cycle)?;
        println!("cycle {:?}: radius {:.4} {}", cycle, rho, if rho < 1.0 { "satisfied" } else { "violated" });
    }
    Ok(())
}
