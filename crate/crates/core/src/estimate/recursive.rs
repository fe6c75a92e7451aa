use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, Matrix};

use super::{assemble, for_each_sample, ErrorTracker, FitConfig, FitResult};

#[derive(Debug, Clone)]
struct RegimeState {
    theta: Matrix,
    gram: Matrix,
    count: usize,
    /// Σ Φ yᵀ, kept only while an unregularised regime warms up.
    cross: Option<Matrix>,
}

/// Online least squares with one Gram matrix per regime,
/// `R_k = δI + Σ_{i ≤ k, J active} Φ_i Φ_iᵀ`, and the update
/// `Θ ← Θ + R_k⁻¹ Φ_k (y_{k+1}ᵀ − Φ_kᵀ Θ)` applied to the active regime only.
///
/// With `δ > 0` this reproduces the ridge-perturbed normal equations at every
/// step. With `δ = 0` a regime first accumulates observations until its Gram
/// matrix is positive definite and then starts from the exact least-squares
/// solution.
#[derive(Debug, Clone)]
pub struct RecursiveLse {
    ridge: f64,
    states: Vec<RegimeState>,
}

impl RecursiveLse {
    pub fn new(num_regimes: usize, m: usize, dim: usize, ridge: f64) -> Self {
        let state = RegimeState {
            theta: Matrix::zeros(m, dim),
            gram: Matrix::identity(m).scale(ridge),
            count: 0,
            cross: (ridge == 0.0).then(|| Matrix::zeros(m, dim)),
        };
        Self {
            ridge,
            states: vec![state; num_regimes],
        }
    }

    pub fn theta(&self, regime: usize) -> &Matrix {
        &self.states[regime].theta
    }

    pub fn gram(&self, regime: usize) -> &Matrix {
        &self.states[regime].gram
    }

    pub fn count(&self, regime: usize) -> usize {
        self.states[regime].count
    }

    pub fn thetas(&self) -> Vec<Matrix> {
        self.states.iter().map(|s| s.theta.clone()).collect()
    }

    /// Processes one observation; `step` is only used in error messages.
    pub fn update(&mut self, regime: usize, phi: &[f64], target: &[f64], step: usize) -> Result<()> {
        let st = &mut self.states[regime];
        let m = phi.len();
        let dim = target.len();
        for i in 0..m {
            for j in 0..m {
                st.gram[(i, j)] += phi[i] * phi[j];
            }
        }
        st.count += 1;

        if let Some(cross) = st.cross.as_mut() {
            for i in 0..m {
                for c in 0..dim {
                    cross[(i, c)] += phi[i] * target[c];
                }
            }
            if st.count >= m {
                if let Ok(l) = cholesky(&st.gram) {
                    st.theta = cholesky_solve(&l, cross)?;
                    st.cross = None;
                }
            }
            return Ok(());
        }

        let l = cholesky(&st.gram).map_err(|e| {
            Error::Numeric(format!("Gram solve failed at step {}: {}", step, e))
        })?;
        let gain = cholesky_solve(&l, &Matrix::from_vec(m, 1, phi.to_vec())?)?;
        for c in 0..dim {
            let pred: f64 = (0..m).map(|i| phi[i] * st.theta[(i, c)]).sum();
            let err = target[c] - pred;
            for i in 0..m {
                st.theta[(i, c)] += gain[(i, 0)] * err;
            }
        }
        Ok(())
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }
}

/// Single online pass of [`RecursiveLse`] over the sample.
pub fn recursive_lse(y: &Matrix, f: &Matrix, cfg: &FitConfig) -> Result<FitResult> {
    cfg.check_data(y, f)?;
    let dim = y.cols();
    let nreg = cfg.partition.num_regimes();
    let m = cfg.regressor_len(dim, f.cols());
    let mut est = RecursiveLse::new(nreg, m, dim, cfg.ridge);
    let initial = est.thetas();
    let mut tracker = match (&cfg.truth, cfg.record_trajectory) {
        (Some(t), true) => Some(ErrorTracker::new(t, &initial)),
        _ => None,
    };
    for_each_sample(cfg, y, f, |s| {
        est.update(s.regime, s.phi, s.target, s.step)?;
        if let Some(tr) = tracker.as_mut() {
            tr.record(s.step, s.regime, est.theta(s.regime));
        }
        Ok(())
    })?;
    let counts = (0..nreg).map(|k| est.count(k)).collect();
    let thetas = est.thetas().into_iter().map(Some).collect();
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
