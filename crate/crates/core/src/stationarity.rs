//! Companion matrices, spectral radii and the cycle condition for
//! geometric ergodicity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{spectral_radius, Matrix};
use crate::model::{validate_model, ModelSpec};

pub const DEFAULT_TOL: f64 = 1e-10;

/// VAR companion matrix of the lag blocks `B_1..B_n` (each w×w):
///
/// ```text
/// [ B_1 B_2 ... B_n ]
/// [ I   0   ... 0   ]
/// [ 0   I   ... 0   ]
/// [ ...             ]
/// ```
///
/// Its spectral radius equals that of the transposed layout with the
/// coefficient blocks in the last column.
pub fn companion_matrix(blocks: &[Matrix]) -> Result<Matrix> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::Shape("companion matrix needs at least one block".into()))?;
    let w = first.rows();
    if let Some((i, b)) = blocks
        .iter()
        .enumerate()
        .find(|(_, b)| b.shape() != (w, w))
    {
        return Err(Error::Shape(format!(
            "block {} is {}x{}, expected {}x{}",
            i + 1,
            b.rows(),
            b.cols(),
            w,
            w
        )));
    }
    let n = blocks.len();
    let mut c = Matrix::zeros(n * w, n * w);
    for (i, b) in blocks.iter().enumerate() {
        c.set_block(0, i * w, b);
    }
    for i in 1..n {
        for k in 0..w {
            c[(i * w + k, (i - 1) * w + k)] = 1.0;
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRadius {
    pub index: Vec<usize>,
    pub linear: usize,
    pub radius: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExogenousRadius {
    pub radius: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleResult {
    pub cycle: Vec<Vec<usize>>,
    pub radius: f64,
    pub satisfied: bool,
}

/// Per-regime and exogenous companion spectral radii. Instability is
/// reported, never refused.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityReport {
    pub regimes: Vec<RegimeRadius>,
    pub exogenous: Option<ExogenousRadius>,
    pub cycles: Vec<CycleResult>,
}

impl StationarityReport {
    pub fn all_stable(&self) -> bool {
        self.regimes.iter().all(|r| r.stable)
            && self.exogenous.as_ref().map_or(true, |e| e.stable)
    }

    pub fn unstable_regimes(&self) -> Vec<&RegimeRadius> {
        self.regimes.iter().filter(|r| !r.stable).collect()
    }
}

pub fn check_regime_stationarity(spec: &ModelSpec, tol: f64) -> Result<StationarityReport> {
    validate_model(spec).into_result()?;
    let mut regimes = Vec::new();
    for r in spec.partition.regimes() {
        let c = spec
            .coefficients(&r.tuple)
            .ok_or_else(|| Error::Validation(vec![format!("missing regime {}", r.label())]))?;
        let radius = spectral_radius(&companion_matrix(&c.a)?, tol)?;
        regimes.push(RegimeRadius {
            index: r.tuple,
            linear: r.linear,
            radius,
            stable: radius < 1.0,
        });
    }
    let exogenous = if spec.q >= 1 {
        let radius = spectral_radius(&companion_matrix(&spec.exogenous.xi)?, tol)?;
        Some(ExogenousRadius {
            radius,
            stable: radius < 1.0,
        })
    } else {
        None
    };
    Ok(StationarityReport {
        regimes,
        exogenous,
        cycles: Vec::new(),
    })
}

/// Ordered product `M_n ⋯ M_2 M_1` (right-to-left accumulation); the empty
/// product is the `dim`-dimensional identity.
pub fn cycle_product(mats: &[&Matrix], dim: usize) -> Result<Matrix> {
    mats.iter()
        .try_fold(Matrix::identity(dim), |acc, m| m.matmul(&acc))
}

/// Spectral radius of `A_1(j_D) ⋯ A_1(j_1)` for the regime cycle
/// `j_1 → … → j_D → j_1`. A value below one is sufficient for geometric
/// ergodicity of a first-order, zero-intercept model.
///
/// An empty cycle yields the identity product (radius 1).
pub fn cycle_spectral_radius(spec: &ModelSpec, cycle: &[Vec<usize>]) -> Result<f64> {
    if spec.p != 1 || spec.regimes.iter().any(|(_, c)| c.a0.iter().any(|&v| v != 0.0)) {
        return Err(Error::Precondition(
            "the cycle condition applies only to p=1, zero-intercept models".into(),
        ));
    }
    if !cycle.is_empty() && cycle.len() != spec.dim {
        return Err(Error::Shape(format!(
            "cycle has {} regimes, expected D={}",
            cycle.len(),
            spec.dim
        )));
    }
    let mats = cycle
        .iter()
        .map(|t| {
            spec.coefficients(t).map(|c| &c.a[0]).ok_or_else(|| {
                Error::Index(format!("regime {:?} has no coefficients", t))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let product = cycle_product(&mats, spec.dim)?;
    spectral_radius(&product, DEFAULT_TOL)
}

/// Runs [`cycle_spectral_radius`] for each cycle and appends the results.
pub fn with_cycles(
    mut report: StationarityReport,
    spec: &ModelSpec,
    cycles: &[Vec<Vec<usize>>],
) -> Result<StationarityReport> {
    for cycle in cycles {
        let radius = cycle_spectral_radius(spec, cycle)?;
        report.cycles.push(CycleResult {
            cycle: cycle.clone(),
            radius,
            satisfied: radius < 1.0,
        });
    }
    Ok(report)
}
