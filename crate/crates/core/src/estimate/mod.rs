//! Per-regime estimation of the regression-form coefficients.
//!
//! All three estimators work on the same sample: for each target time
//! `s = p*, …, T-1` the regressor is `Φ_{s-1}` and the active regime is the
//! cell of `y_{s-d}`. Observations before `p* = max{p, d, q}` are startup
//! values and never enter an estimate.
//!
//! * [`batch_lse`]: ordinary least squares per regime.
//! * [`recursive_lse`]: online least squares with a per-regime Gram matrix.
//! * [`adaptive_fit`]: stochastic-gradient updates normalised by the relaxed
//!   control sequence `s_k`.

mod adaptive;
mod batch;
mod diagnostics;
mod recursive;

pub use adaptive::{adaptive_fit, AdaptiveEstimator};
pub use batch::batch_lse;
pub use diagnostics::{residual_diagnostics, ResidualSummary};
pub use recursive::{recursive_lse, RecursiveLse};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{regressor_len, write_regressor, ThetaBlocks, ThresholdPartition};

pub const DEFAULT_RIDGE: f64 = 1e-3;
pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_UPSILON: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Batch,
    Recursive,
    Adaptive,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Batch => "batch",
            Algorithm::Recursive => "recursive",
            Algorithm::Adaptive => "adaptive",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "batch" => Ok(Algorithm::Batch),
            "recursive" => Ok(Algorithm::Recursive),
            "adaptive" => Ok(Algorithm::Adaptive),
            other => Err(Error::Usage(format!("unknown algorithm '{}'", other))),
        }
    }
}

/// Known structure plus algorithm settings.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub partition: ThresholdPartition,
    pub delay: usize,
    pub p: usize,
    pub q: usize,
    pub algorithm: Algorithm,
    /// Initial Gram matrix `δ I` of the recursive estimator. Zero selects an
    /// exact warm-up: the regime accumulates data until its Gram matrix is
    /// positive definite and starts from the least-squares solution.
    pub ridge: f64,
    /// Step scale α ∈ (0, 1] of the adaptive estimator.
    pub alpha: f64,
    /// Relaxation υ ∈ (0, 1] per regime (by linear index). A single entry is
    /// broadcast to all regimes.
    pub upsilon: Vec<f64>,
    pub record_trajectory: bool,
    /// Reference coefficients (by linear index) for the error trajectory.
    pub truth: Option<Vec<Matrix>>,
}

impl FitConfig {
    pub fn new(partition: ThresholdPartition, delay: usize, p: usize, q: usize, algorithm: Algorithm) -> Self {
        Self {
            partition,
            delay,
            p,
            q,
            algorithm,
            ridge: DEFAULT_RIDGE,
            alpha: DEFAULT_ALPHA,
            upsilon: vec![DEFAULT_UPSILON],
            record_trajectory: false,
            truth: None,
        }
    }

    pub fn p_star(&self) -> usize {
        self.p.max(self.delay).max(self.q)
    }

    /// υ for the regime with linear index `k`.
    pub fn upsilon_for(&self, k: usize) -> f64 {
        if self.upsilon.len() == 1 {
            self.upsilon[0]
        } else {
            self.upsilon[k]
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = self.partition.violations();
        if self.p == 0 {
            v.push("autoregressive order p must be positive".into());
        }
        if self.delay == 0 {
            v.push("delay d must be positive".into());
        }
        if !(self.ridge >= 0.0) || !self.ridge.is_finite() {
            v.push(format!("ridge must be >= 0, got {}", self.ridge));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            v.push(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        let nreg = self.partition.num_regimes();
        if self.upsilon.len() != 1 && self.upsilon.len() != nreg {
            v.push(format!(
                "upsilon needs 1 or {} entries, got {}",
                nreg,
                self.upsilon.len()
            ));
        }
        if let Some(u) = self.upsilon.iter().find(|u| !(**u > 0.0 && **u <= 1.0)) {
            v.push(format!("upsilon must lie in (0, 1], got {}", u));
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    fn check_data(&self, y: &Matrix, f: &Matrix) -> Result<()> {
        self.validate()?;
        if y.cols() != self.partition.dim() {
            return Err(Error::Shape(format!(
                "series has {} columns but partition has {} dimensions",
                y.cols(),
                self.partition.dim()
            )));
        }
        if self.q > 0 && f.rows() != y.rows() {
            return Err(Error::Shape(format!(
                "exogenous series has {} rows, endogenous has {}",
                f.rows(),
                y.rows()
            )));
        }
        if self.q > 0 && f.cols() == 0 {
            return Err(Error::Shape("q > 0 but exogenous series has no columns".into()));
        }
        if !y.is_finite() || !f.is_finite() {
            return Err(Error::Domain("non-finite value in input series".into()));
        }
        if let Some(truth) = &self.truth {
            let m = self.regressor_len(y.cols(), f.cols());
            if truth.len() != self.partition.num_regimes()
                || truth.iter().any(|t| t.shape() != (m, y.cols()))
            {
                return Err(Error::Shape("reference coefficients do not match the model".into()));
            }
        }
        Ok(())
    }

    fn regressor_len(&self, dim: usize, kappa: usize) -> usize {
        regressor_len(dim, if self.q > 0 { kappa } else { 0 }, self.p, self.q)
    }
}

/// Estimate for one regime.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeEstimate {
    pub index: Vec<usize>,
    pub linear: usize,
    /// Observations assigned to the regime ("regime time").
    pub count: usize,
    /// m×D coefficients; `None` if the regime could not be estimated.
    pub theta: Option<Matrix>,
    pub failure: Option<String>,
}

impl RegimeEstimate {
    pub fn blocks(&self, dim: usize, kappa: usize, p: usize, q: usize) -> Option<ThetaBlocks> {
        self.theta
            .as_ref()
            .map(|t| ThetaBlocks::decode(t, dim, kappa, p, q).expect("theta has model shape"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    /// Target time index `s` of the update.
    pub step: usize,
    /// Linear index of the updated regime.
    pub regime: usize,
    /// Max elementwise |Θ̂ − Θ| over all regimes after the update.
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub algorithm: Algorithm,
    pub dim: usize,
    pub kappa: usize,
    pub p: usize,
    pub q: usize,
    pub delay: usize,
    pub regimes: Vec<RegimeEstimate>,
    /// In-sample residuals `y_s − Θ̂ᵀΦ_{s-1}` of regimes with an estimate.
    pub residuals: Matrix,
    pub residual_times: Vec<usize>,
    pub residual_regimes: Vec<usize>,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

impl FitResult {
    pub fn total_count(&self) -> usize {
        self.regimes.iter().map(|r| r.count).sum()
    }

    pub fn blocks(&self, linear: usize) -> Option<ThetaBlocks> {
        self.regimes[linear].blocks(self.dim, self.kappa, self.p, self.q)
    }

    /// Largest |Θ̂ − Θ| over the estimated regimes, against `truth` by linear index.
    pub fn max_abs_error(&self, truth: &[Matrix]) -> f64 {
        self.regimes
            .iter()
            .filter_map(|r| r.theta.as_ref().map(|t| t.max_abs_diff(&truth[r.linear])))
            .fold(0.0, f64::max)
    }
}

/// One usable observation: target time, active regime, regressor, target.
pub(crate) struct Sample<'a> {
    pub step: usize,
    pub regime: usize,
    pub phi: &'a [f64],
    pub target: &'a [f64],
}

/// Walks the sample in time order, handing each observation to `visit`.
pub(crate) fn for_each_sample(
    cfg: &FitConfig,
    y: &Matrix,
    f: &Matrix,
    mut visit: impl FnMut(Sample<'_>) -> Result<()>,
) -> Result<()> {
    let kappa = if cfg.q > 0 { f.cols() } else { 0 };
    let f_used = if cfg.q > 0 { f.clone() } else { Matrix::zeros(y.rows(), 0) };
    let m = regressor_len(y.cols(), kappa, cfg.p, cfg.q);
    let mut phi = vec![0.0; m];
    for s in cfg.p_star()..y.rows() {
        write_regressor(y, &f_used, s - 1, cfg.p, cfg.q, &mut phi)?;
        let regime = cfg.partition.regime_index(y.row(s - cfg.delay))?.linear;
        visit(Sample {
            step: s,
            regime,
            phi: &phi,
            target: y.row(s),
        })?;
    }
    Ok(())
}

/// Residuals of the final coefficients over the whole sample.
pub(crate) fn residuals(
    cfg: &FitConfig,
    y: &Matrix,
    f: &Matrix,
    thetas: &[Option<Matrix>],
) -> Result<(Matrix, Vec<usize>, Vec<usize>)> {
    let dim = y.cols();
    let mut data = Vec::new();
    let mut times = Vec::new();
    let mut regimes = Vec::new();
    for_each_sample(cfg, y, f, |s| {
        if let Some(theta) = &thetas[s.regime] {
            for c in 0..dim {
                let pred: f64 = s.phi.iter().enumerate().map(|(i, v)| v * theta[(i, c)]).sum();
                data.push(s.target[c] - pred);
            }
            times.push(s.step);
            regimes.push(s.regime);
        }
        Ok(())
    })?;
    Ok((Matrix::from_vec(times.len(), dim, data)?, times, regimes))
}

/// Tracks the max-abs error of every regime against reference coefficients.
pub(crate) struct ErrorTracker<'a> {
    truth: &'a [Matrix],
    per_regime: Vec<f64>,
    pub points: Vec<TrajectoryPoint>,
}

impl<'a> ErrorTracker<'a> {
    pub fn new(truth: &'a [Matrix], initial: &[Matrix]) -> Self {
        let per_regime = truth
            .iter()
            .zip(initial)
            .map(|(t, i)| t.max_abs_diff(i))
            .collect();
        Self {
            truth,
            per_regime,
            points: Vec::new(),
        }
    }

    pub fn record(&mut self, step: usize, regime: usize, theta: &Matrix) {
        self.per_regime[regime] = theta.max_abs_diff(&self.truth[regime]);
        let max_abs_error = self.per_regime.iter().copied().fold(0.0, f64::max);
        self.points.push(TrajectoryPoint {
            step,
            regime,
            max_abs_error,
        });
    }
}

pub(crate) fn assemble(
    cfg: &FitConfig,
    y: &Matrix,
    f: &Matrix,
    counts: Vec<usize>,
    thetas: Vec<Option<Matrix>>,
    failures: Vec<Option<String>>,
    trajectory: Option<Vec<TrajectoryPoint>>,
) -> Result<FitResult> {
    let (residuals, residual_times, residual_regimes) = residuals(cfg, y, f, &thetas)?;
    let regimes = cfg
        .partition
        .regimes()
        .zip(counts)
        .zip(thetas.into_iter().zip(failures))
        .map(|((r, count), (theta, failure))| RegimeEstimate {
            index: r.tuple,
            linear: r.linear,
            count,
            theta,
            failure,
        })
        .collect();
    Ok(FitResult {
        algorithm: cfg.algorithm,
        dim: y.cols(),
        kappa: if cfg.q > 0 { f.cols() } else { 0 },
        p: cfg.p,
        q: cfg.q,
        delay: cfg.delay,
        regimes,
        residuals,
        residual_times,
        residual_regimes,
        trajectory,
    })
}

/// Dispatches on `cfg.algorithm`.
pub fn fit(y: &Matrix, f: &Matrix, cfg: &FitConfig) -> Result<FitResult> {
    match cfg.algorithm {
        Algorithm::Batch => batch_lse(y, f, cfg),
        Algorithm::Recursive => recursive_lse(y, f, cfg),
        Algorithm::Adaptive => adaptive_fit(y, f, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names() {
        for a in [Algorithm::Batch, Algorithm::Recursive, Algorithm::Adaptive] {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!(matches!("foo".parse::<Algorithm>(), Err(Error::Usage(_))));
    }

    #[test]
    fn config_validation() {
        let mut cfg = FitConfig::new(ThresholdPartition::single(1), 1, 1, 0, Algorithm::Adaptive);
        assert!(cfg.validate().is_ok());
        cfg.alpha = 0.0;
        cfg.upsilon = vec![1.5];
        cfg.ridge = -1.0;
        match cfg.validate() {
            Err(Error::Validation(v)) => assert_eq!(v.len(), 3),
            other => panic!("{:?}", other),
        }
    }
}
