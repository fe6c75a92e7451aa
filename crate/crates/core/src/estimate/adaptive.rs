use crate::error::Result;
use crate::linalg::Matrix;

use super::{assemble, for_each_sample, ErrorTracker, FitConfig, FitResult};

/// Per-regime stochastic-gradient estimator with the relaxed control
/// sequence.
///
/// Every regime starts at `Θ = 0`, `r = 1`, `s = 1`. For an observation in
/// regime `J`:
///
/// ```text
/// r_k = r_{k-1} + |Φ_k|²
/// s_k = max{υ r_{k-1}, 1} + |Φ_k|²
/// Θ  ← Θ + α Φ_k (y_{k+1}ᵀ − Φ_kᵀ Θ) / s_k
/// ```
///
/// Inactive regimes are untouched.
#[derive(Debug, Clone)]
pub struct AdaptiveEstimator {
    alpha: f64,
    upsilon: Vec<f64>,
    theta: Vec<Matrix>,
    r: Vec<f64>,
    s: Vec<f64>,
    count: Vec<usize>,
}

impl AdaptiveEstimator {
    pub fn new(m: usize, dim: usize, alpha: f64, upsilon: Vec<f64>) -> Self {
        let n = upsilon.len();
        Self {
            alpha,
            upsilon,
            theta: vec![Matrix::zeros(m, dim); n],
            r: vec![1.0; n],
            s: vec![1.0; n],
            count: vec![0; n],
        }
    }

    pub fn theta(&self, regime: usize) -> &Matrix {
        &self.theta[regime]
    }

    pub fn r(&self, regime: usize) -> f64 {
        self.r[regime]
    }

    pub fn s(&self, regime: usize) -> f64 {
        self.s[regime]
    }

    pub fn count(&self, regime: usize) -> usize {
        self.count[regime]
    }

    pub fn update(&mut self, regime: usize, phi: &[f64], target: &[f64]) {
        let norm2: f64 = phi.iter().map(|v| v * v).sum();
        let r_prev = self.r[regime];
        self.r[regime] = r_prev + norm2;
        let s = (self.upsilon[regime] * r_prev).max(1.0) + norm2;
        self.s[regime] = s;
        self.count[regime] += 1;

        let theta = &mut self.theta[regime];
        let step = self.alpha / s;
        for c in 0..target.len() {
            let pred: f64 = phi.iter().enumerate().map(|(i, v)| v * theta[(i, c)]).sum();
            let err = target[c] - pred;
            if err == 0.0 {
                continue;
            }
            for (i, v) in phi.iter().enumerate() {
                theta[(i, c)] += step * v * err;
            }
        }
    }
}

/// Single pass of [`AdaptiveEstimator`] over the sample.
pub fn adaptive_fit(y: &Matrix, f: &Matrix, cfg: &FitConfig) -> Result<FitResult> {
    cfg.check_data(y, f)?;
    let dim = y.cols();
    let nreg = cfg.partition.num_regimes();
    let m = cfg.regressor_len(dim, f.cols());
    let upsilon = (0..nreg).map(|k| cfg.upsilon_for(k)).collect();
    let mut est = AdaptiveEstimator::new(m, dim, cfg.alpha, upsilon);
    let initial = est.theta.clone();
    let mut tracker = match (&cfg.truth, cfg.record_trajectory) {
        (Some(t), true) => Some(ErrorTracker::new(t, &initial)),
        _ => None,
    };
    for_each_sample(cfg, y, f, |smp| {
        est.update(smp.regime, smp.phi, smp.target);
        if let Some(tr) = tracker.as_mut() {
            tr.record(smp.step, smp.regime, est.theta(smp.regime));
        }
        Ok(())
    })?;
    let counts = est.count.clone();
    let thetas = est.theta.into_iter().map(Some).collect();
    assemble(
        cfg,
        y,
        f,
        counts,
        thetas,
        vec![None; nreg],
        tracker.map(|t| t.points),
    )
}
