use crate::error::{Error, Result};
use crate::linalg::{least_squares_solve, Matrix};

use super::{assemble, for_each_sample, FitConfig, FitResult};

/// Ordinary least squares of `y_s` on `Φ_{s-1}`, separately for every regime.
///
/// A regime with fewer than `m` observations, or whose design is rank
/// deficient, gets no estimate and a failure message; the call only fails
/// outright when no regime can be estimated.
pub fn batch_lse(y: &Matrix, f: &Matrix, cfg: &FitConfig) -> Result<FitResult> {
    cfg.check_data(y, f)?;
    let dim = y.cols();
    let nreg = cfg.partition.num_regimes();
    let m = cfg.regressor_len(dim, f.cols());

    let mut designs: Vec<Vec<f64>> = vec![Vec::new(); nreg];
    let mut targets: Vec<Vec<f64>> = vec![Vec::new(); nreg];
    for_each_sample(cfg, y, f, |s| {
        designs[s.regime].extend_from_slice(s.phi);
        targets[s.regime].extend_from_slice(s.target);
        Ok(())
    })?;

    let mut counts = Vec::with_capacity(nreg);
    let mut thetas = Vec::with_capacity(nreg);
    let mut failures = Vec::with_capacity(nreg);
    for (k, (x, b)) in designs.into_iter().zip(targets).enumerate() {
        let count = x.len() / m;
        counts.push(count);
        let label = cfg.partition.tuple_index(k)?.label();
        if count < m {
            thetas.push(None);
            failures.push(Some(format!(
                "insufficient regime samples for regime {}: {} observations, {} regressors",
                label, count, m
            )));
            continue;
        }
        let x = Matrix::from_vec(count, m, x)?;
        let b = Matrix::from_vec(count, dim, b)?;
        match least_squares_solve(&x, &b) {
            Ok(theta) => {
                thetas.push(Some(theta));
                failures.push(None);
            }
            Err(Error::RankDeficient { rank, .. }) => {
                thetas.push(None);
                failures.push(Some(format!(
                    "insufficient regime samples for regime {}: singular design (rank {} < {})",
                    label, rank, m
                )));
            }
            Err(e) => return Err(e),
        }
    }

    if thetas.iter().all(Option::is_none) {
        let msgs: Vec<String> = failures.into_iter().flatten().collect();
        return Err(Error::Estimation(format!(
            "no regime could be estimated: {}",
            msgs.join("; ")
        )));
    }
    assemble(cfg, y, f, counts, thetas, failures, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::Algorithm;
    use crate::model::ThresholdPartition;

    fn scalar_cfg() -> FitConfig {
        FitConfig::new(ThresholdPartition::single(1), 1, 1, 0, Algorithm::Batch)
    }

    #[test]
    fn alternating_series_is_fit_exactly() {
        // y_t = 3 - y_{t-1} reproduces 1,2,1,2,...
        let y = Matrix::from_vec(8, 1, vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0]).unwrap();
        let fit = batch_lse(&y, &Matrix::zeros(8, 0), &scalar_cfg()).unwrap();
        let theta = fit.regimes[0].theta.as_ref().unwrap();
        assert!((theta[(0, 0)] - 3.0).abs() < 1e-12);
        assert!((theta[(1, 0)] + 1.0).abs() < 1e-12);
        assert_eq!(fit.regimes[0].count, 7);
        assert!(fit.residuals.max_abs() < 1e-12);
    }

    #[test]
    fn too_few_samples_in_one_regime() {
        // Two regimes split at 0; only one observation lands in the upper one.
        let vals = [-1.0, -2.0, -1.5, -0.5, -1.2, 3.0, -0.7, -1.1, -0.9, -1.3];
        let y = Matrix::from_vec(vals.len(), 1, vals.to_vec()).unwrap();
        let mut cfg = scalar_cfg();
        cfg.partition = ThresholdPartition::new(vec![vec![0.0]]).unwrap();
        let fit = batch_lse(&y, &Matrix::zeros(vals.len(), 0), &cfg).unwrap();
        assert!(fit.regimes[0].theta.is_some());
        assert_eq!(fit.regimes[1].count, 1);
        let msg = fit.regimes[1].failure.as_ref().unwrap();
        assert!(msg.contains("insufficient regime samples") && msg.contains("(2)"), "{}", msg);
        // Residual rows only for the estimated regime.
        assert_eq!(fit.residuals.rows(), fit.regimes[0].count);
    }

    #[test]
    fn all_regimes_failing_is_an_error() {
        let y = Matrix::from_vec(4, 1, vec![1.0; 4]).unwrap();
        // Constant series: intercept and lag columns coincide.
        assert!(matches!(
            batch_lse(&y, &Matrix::zeros(4, 0), &scalar_cfg()),
            Err(Error::Estimation(_))
        ));
    }
}
