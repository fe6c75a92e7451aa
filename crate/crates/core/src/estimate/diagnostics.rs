use crate::error::{Error, Result};
use crate::linalg::Matrix;

use super::FitResult;

/// Descriptive summary of in-sample residuals. Covariances use divisor `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSummary {
    pub mean: Vec<f64>,
    pub covariance: Matrix,
    /// Observations per regime (by linear index).
    pub counts: Vec<usize>,
    /// Residual covariance per regime; `None` for regimes without residuals.
    pub regime_covariance: Vec<Option<Matrix>>,
}

fn moments<'a>(rows: impl Iterator<Item = &'a [f64]> + Clone, dim: usize) -> Option<(Vec<f64>, Matrix)> {
    let n = rows.clone().count();
    if n == 0 {
        return None;
    }
    let mut mean = vec![0.0; dim];
    for r in rows.clone() {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut cov = Matrix::zeros(dim, dim);
    for r in rows {
        for i in 0..dim {
            for j in 0..dim {
                cov[(i, j)] += (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    Some((mean, cov.scale(1.0 / n as f64)))
}

pub fn residual_diagnostics(result: &FitResult) -> Result<ResidualSummary> {
    let res = &result.residuals;
    let dim = res.cols();
    let all = (0..res.rows()).map(|i| res.row(i));
    let (mean, covariance) =
        moments(all, dim).ok_or_else(|| Error::Domain("no residuals to summarise".into()))?;
    let regime_covariance = result
        .regimes
        .iter()
        .map(|r| {
            let rows = (0..res.rows())
                .filter(|&i| result.residual_regimes[i] == r.linear)
                .map(|i| res.row(i));
            moments(rows, dim).map(|(_, c)| c)
        })
        .collect();
    Ok(ResidualSummary {
        mean,
        covariance,
        counts: result.regimes.iter().map(|r| r.count).collect(),
        regime_covariance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::{Algorithm, RegimeEstimate};

    fn result_with(residuals: Matrix, regimes: Vec<usize>) -> FitResult {
        FitResult {
            algorithm: Algorithm::Batch,
            dim: residuals.cols(),
            kappa: 0,
            p: 1,
            q: 0,
            delay: 1,
            regimes: vec![
                RegimeEstimate { index: vec![1], linear: 0, count: 2, theta: None, failure: None },
                RegimeEstimate { index: vec![2], linear: 1, count: 0, theta: None, failure: None },
            ],
            residual_times: (0..residuals.rows()).collect(),
            residuals,
            residual_regimes: regimes,
            trajectory: None,
        }
    }

    #[test]
    fn zero_residuals() {
        let s = residual_diagnostics(&result_with(Matrix::zeros(2, 2), vec![0, 0])).unwrap();
        assert_eq!(s.mean, vec![0.0, 0.0]);
        assert_eq!(s.covariance.max_abs(), 0.0);
        assert_eq!(s.counts, vec![2, 0]);
        assert!(s.regime_covariance[0].is_some() && s.regime_covariance[1].is_none());
    }

    #[test]
    fn empty_residuals_are_a_domain_error() {
        let r = result_with(Matrix::zeros(0, 1), vec![]);
        assert!(matches!(residual_diagnostics(&r), Err(Error::Domain(_))));
    }

    #[test]
    fn covariance_of_two_points() {
        let res = Matrix::from_rows(&[[1.0], [-1.0]]).unwrap();
        let s = residual_diagnostics(&result_with(res, vec![0, 0])).unwrap();
        assert_eq!(s.covariance[(0, 0)], 1.0);
    }
}
