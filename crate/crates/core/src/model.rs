//! Model description: threshold partition, regime indexing, coefficients,
//! and the regression-form stacking shared by the simulator and estimators.
//!
//! Coefficients are stored in the simulation convention
//!
//! ```text
//! y_t = a0(J) + A_1(J) y_{t-1} + ... + A_p(J) y_{t-p} + Λ(J) f_t + ε_t
//! f_t = Ξ_1 f_{t-1} + ... + Ξ_q f_{t-q} + η_t
//! ```
//!
//! where the regime `J` is selected by where `y_{t-d}` falls in the
//! threshold partition.

use std::collections::BTreeSet;
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::{min_symmetric_eigenvalue, Matrix, PSD_TOL};

/// Per-dimension ordered breakpoints. Dimension `i` with breakpoints
/// `r_1 < ... < r_{l-1}` is split into `l` half-open cells
/// `(-inf, r_1), [r_1, r_2), ..., [r_{l-1}, +inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPartition {
    breakpoints: Vec<Vec<f64>>,
}

impl ThresholdPartition {
    /// Builds a partition, rejecting non-finite or non-increasing breakpoints.
    pub fn new(breakpoints: Vec<Vec<f64>>) -> Result<Self> {
        let p = Self { breakpoints };
        let v = p.violations();
        if v.is_empty() {
            Ok(p)
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Builds a partition without checking; use [`violations`](Self::violations)
    /// or [`validate_model`] before indexing with it.
    pub fn new_unchecked(breakpoints: Vec<Vec<f64>>) -> Self {
        Self { breakpoints }
    }

    /// A partition with no breakpoints: every vector maps to regime (1,…,1).
    pub fn single(dim: usize) -> Self {
        Self {
            breakpoints: vec![Vec::new(); dim],
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, bp) in self.breakpoints.iter().enumerate() {
            if bp.iter().any(|v| !v.is_finite()) {
                out.push(format!("breakpoints not finite in dimension {}", i + 1));
            }
            if bp.windows(2).any(|w| !(w[0] < w[1])) {
                out.push(format!("breakpoints not increasing in dimension {}", i + 1));
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn breakpoints(&self) -> &[Vec<f64>] {
        &self.breakpoints
    }

    /// Number of cells `L_i` in each dimension.
    pub fn regime_counts(&self) -> Vec<usize> {
        self.breakpoints.iter().map(|b| b.len() + 1).collect()
    }

    /// `L = max_i L_i`.
    pub fn max_regimes_per_dim(&self) -> usize {
        self.regime_counts().into_iter().max().unwrap_or(1)
    }

    /// Number of reachable regimes, `∏ L_i`.
    pub fn num_regimes(&self) -> usize {
        self.regime_counts().into_iter().product()
    }

    /// Mixed-radix encoding of a 1-based tuple, dimension 1 most significant.
    pub fn linear_index(&self, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != self.dim() {
            return Err(Error::Shape(format!(
                "regime tuple has {} entries, partition has {} dimensions",
                tuple.len(),
                self.dim()
            )));
        }
        let mut lin = 0usize;
        for (&j, l) in tuple.iter().zip(self.regime_counts()) {
            if j == 0 || j > l {
                return Err(Error::Index(format!(
                    "regime component {} outside 1..={}",
                    j, l
                )));
            }
            lin = lin * l + (j - 1);
        }
        Ok(lin)
    }

    /// Inverse of [`linear_index`](Self::linear_index).
    pub fn tuple_index(&self, linear: usize) -> Result<RegimeIndex> {
        let total = self.num_regimes();
        if linear >= total {
            return Err(Error::Index(format!(
                "linear regime index {} outside 0..{}",
                linear, total
            )));
        }
        let counts = self.regime_counts();
        let mut tuple = vec![0; counts.len()];
        let mut rest = linear;
        for (slot, &l) in tuple.iter_mut().zip(&counts).rev() {
            *slot = rest % l + 1;
            rest /= l;
        }
        Ok(RegimeIndex { tuple, linear })
    }

    /// The regime whose cell contains `y_lag`.
    pub fn regime_index(&self, y_lag: &[f64]) -> Result<RegimeIndex> {
        if y_lag.len() != self.dim() {
            return Err(Error::Shape(format!(
                "threshold vector has length {}, partition has {} dimensions",
                y_lag.len(),
                self.dim()
            )));
        }
        if let Some(pos) = y_lag.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite threshold variable in component {}",
                pos + 1
            )));
        }
        let mut tuple = Vec::with_capacity(self.dim());
        let mut linear = 0usize;
        for (x, bp) in y_lag.iter().zip(&self.breakpoints) {
            // Count of breakpoints <= x gives the half-open cell.
            let j = bp.partition_point(|r| r <= x);
            linear = linear * (bp.len() + 1) + j;
            tuple.push(j + 1);
        }
        Ok(RegimeIndex { tuple, linear })
    }

    /// All reachable regimes in linear order.
    pub fn regimes(&self) -> impl Iterator<Item = RegimeIndex> + '_ {
        (0..self.num_regimes()).map(move |k| self.tuple_index(k).expect("in range"))
    }
}

/// Active-regime identifier: 1-based tuple `(j_1,…,j_D)` and its linear index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegimeIndex {
    pub tuple: Vec<usize>,
    pub linear: usize,
}

impl RegimeIndex {
    /// Label such as `(3,1)`.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.tuple.iter().map(|j| j.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// Coefficients of one regime.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeCoefficients {
    /// Intercept, length D.
    pub a0: Vec<f64>,
    /// Lag matrices `A_1..A_p`, each D×D.
    pub a: Vec<Matrix>,
    /// Exogenous loading, D×κ.
    pub lambda: Matrix,
}

impl RegimeCoefficients {
    pub fn zeros(dim: usize, kappa: usize, p: usize) -> Self {
        Self {
            a0: vec![0.0; dim],
            a: vec![Matrix::zeros(dim, dim); p],
            lambda: Matrix::zeros(dim, kappa),
        }
    }

    /// Elementwise sum of two coefficient sets of identical shape.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.a0.len() != other.a0.len() || self.a.len() != other.a.len() {
            return Err(Error::Shape("coefficient sets differ in shape".into()));
        }
        Ok(Self {
            a0: self.a0.iter().zip(&other.a0).map(|(x, y)| x + y).collect(),
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| x.add(y))
                .collect::<Result<_>>()?,
            lambda: self.lambda.add(&other.lambda)?,
        })
    }
}

/// Exogenous VAR(q) driving process.
#[derive(Debug, Clone, PartialEq)]
pub struct ExogenousSpec {
    /// `Ξ_1..Ξ_q`, each κ×κ. Empty means no exogenous dynamics.
    pub xi: Vec<Matrix>,
    /// Covariance of the innovation `η_t`, κ×κ.
    pub noise_cov: Matrix,
}

impl ExogenousSpec {
    pub fn none() -> Self {
        Self {
            xi: Vec::new(),
            noise_cov: Matrix::zeros(0, 0),
        }
    }

    pub fn kappa(&self) -> usize {
        self.noise_cov.rows()
    }

    pub fn q(&self) -> usize {
        self.xi.len()
    }
}

/// Full MSETARX parameterisation.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    /// Endogenous dimension D.
    pub dim: usize,
    /// Exogenous dimension κ.
    pub kappa: usize,
    /// Autoregressive order p, common to all regimes.
    pub p: usize,
    /// Exogenous VAR order q.
    pub q: usize,
    /// Threshold delay d.
    pub delay: usize,
    pub partition: ThresholdPartition,
    /// Coefficients keyed by 1-based regime tuple.
    pub regimes: Vec<(Vec<usize>, RegimeCoefficients)>,
    pub exogenous: ExogenousSpec,
    /// Covariance of `ε_t`, D×D.
    pub noise_cov_eps: Matrix,
}

impl ModelSpec {
    /// `p* = max{p, d, q}`.
    pub fn p_star(&self) -> usize {
        self.p.max(self.delay).max(self.q)
    }

    /// Number of regressors `m = 1 + D·p + κ·q`.
    pub fn regressor_len(&self) -> usize {
        regressor_len(self.dim, self.kappa, self.p, self.q)
    }

    pub fn coefficients(&self, tuple: &[usize]) -> Option<&RegimeCoefficients> {
        self.regimes
            .iter()
            .find(|(t, _)| t.as_slice() == tuple)
            .map(|(_, c)| c)
    }

    /// Coefficients laid out by linear regime index. Fails if any reachable
    /// regime is missing.
    pub fn coefficients_by_linear(&self) -> Result<Vec<&RegimeCoefficients>> {
        self.partition
            .regimes()
            .map(|r| {
                self.coefficients(&r.tuple).ok_or_else(|| {
                    Error::Validation(vec![format!("missing regime {}", r.label())])
                })
            })
            .collect()
    }

    /// Regression-form coefficient matrix of every reachable regime, by
    /// linear index.
    pub fn stacked_thetas(&self) -> Result<Vec<Matrix>> {
        self.coefficients_by_linear()?
            .into_iter()
            .map(|c| stack_theta(c, &self.exogenous))
            .collect()
    }
}

pub fn regressor_len(dim: usize, kappa: usize, p: usize, q: usize) -> usize {
    1 + dim * p + kappa * q
}

/// Regressor `[1, y_t, …, y_{t-p+1}, f_t, …, f_{t-q+1}]` used to predict `y_{t+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorVector(Vec<f64>);

impl RegressorVector {
    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for RegressorVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Builds the regressor at time `t` from the rows of `y` (T×D) and `f` (T×κ).
pub fn build_regressor(y: &Matrix, f: &Matrix, t: usize, p: usize, q: usize) -> Result<RegressorVector> {
    let mut out = vec![0.0; regressor_len(y.cols(), f.cols(), p, q)];
    write_regressor(y, f, t, p, q, &mut out)?;
    Ok(RegressorVector(out))
}

/// Allocation-free form of [`build_regressor`]; `out` must have length `m`.
pub fn write_regressor(
    y: &Matrix,
    f: &Matrix,
    t: usize,
    p: usize,
    q: usize,
    out: &mut [f64],
) -> Result<()> {
    let dim = y.cols();
    let kappa = f.cols();
    let m = regressor_len(dim, kappa, p, q);
    if out.len() != m {
        return Err(Error::Shape(format!(
            "regressor buffer has length {}, expected {}",
            out.len(),
            m
        )));
    }
    if t + 1 < p || (q > 0 && t + 1 < q) {
        return Err(Error::Index(format!(
            "time {} too small for p={} and q={} lags",
            t, p, q
        )));
    }
    if (p > 0 && t >= y.rows()) || (q > 0 && t >= f.rows()) {
        return Err(Error::Index(format!("time {} beyond end of series", t)));
    }
    out[0] = 1.0;
    let mut pos = 1;
    for lag in 0..p {
        out[pos..pos + dim].copy_from_slice(y.row(t - lag));
        pos += dim;
    }
    for lag in 0..q {
        out[pos..pos + kappa].copy_from_slice(f.row(t - lag));
        pos += kappa;
    }
    Ok(())
}

/// Regression-form coefficients Θ (m×D) such that
/// `y_{t+1}ᵀ = Φ_tᵀ Θ + noise`.
///
/// Rows are `[a0ᵀ; A_1ᵀ; …; A_pᵀ; (ΛΞ_1)ᵀ; …; (ΛΞ_q)ᵀ]`.
pub fn stack_theta(coeffs: &RegimeCoefficients, exo: &ExogenousSpec) -> Result<Matrix> {
    let dim = coeffs.a0.len();
    let kappa = exo.kappa();
    if coeffs.lambda.shape() != (dim, kappa) {
        return Err(Error::Shape(format!(
            "Lambda is {}x{}, expected {}x{}",
            coeffs.lambda.rows(),
            coeffs.lambda.cols(),
            dim,
            kappa
        )));
    }
    let exo_blocks = exo
        .xi
        .iter()
        .map(|xi| {
            if xi.shape() != (kappa, kappa) {
                return Err(Error::Shape(format!(
                    "Xi is {}x{}, expected {}x{}",
                    xi.rows(),
                    xi.cols(),
                    kappa,
                    kappa
                )));
            }
            coeffs.lambda.matmul(xi)
        })
        .collect::<Result<Vec<_>>>()?;
    stack_blocks(&coeffs.a0, &coeffs.a, &exo_blocks)
}

/// Stacks intercept, lag blocks and lumped exogenous blocks (each D×κ) into Θ.
pub fn stack_blocks(a0: &[f64], a: &[Matrix], exo_blocks: &[Matrix]) -> Result<Matrix> {
    let dim = a0.len();
    let kappa = exo_blocks.first().map_or(0, |b| b.cols());
    let m = regressor_len(dim, kappa, a.len(), exo_blocks.len());
    let mut theta = Matrix::zeros(m, dim);
    theta.row_mut(0).copy_from_slice(a0);
    let mut row = 1;
    for ai in a {
        if ai.shape() != (dim, dim) {
            return Err(Error::Shape(format!(
                "lag matrix is {}x{}, expected {}x{}",
                ai.rows(),
                ai.cols(),
                dim,
                dim
            )));
        }
        theta.set_block(row, 0, &ai.transpose());
        row += dim;
    }
    for b in exo_blocks {
        if b.shape() != (dim, kappa) {
            return Err(Error::Shape(format!(
                "exogenous block is {}x{}, expected {}x{}",
                b.rows(),
                b.cols(),
                dim,
                kappa
            )));
        }
        theta.set_block(row, 0, &b.transpose());
        row += kappa;
    }
    Ok(theta)
}

/// Θ split back into its blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaBlocks {
    pub a0: Vec<f64>,
    pub a: Vec<Matrix>,
    /// Products `Λ Ξ_τ`, each D×κ. Λ and Ξ are not separately identified.
    pub exo: Vec<Matrix>,
}

impl ThetaBlocks {
    pub fn decode(theta: &Matrix, dim: usize, kappa: usize, p: usize, q: usize) -> Result<Self> {
        let m = regressor_len(dim, kappa, p, q);
        if theta.shape() != (m, dim) {
            return Err(Error::Shape(format!(
                "theta is {}x{}, expected {}x{}",
                theta.rows(),
                theta.cols(),
                m,
                dim
            )));
        }
        let a0 = theta.row(0).to_vec();
        let a = (0..p)
            .map(|i| theta.block(1 + i * dim, 0, dim, dim).transpose())
            .collect();
        let base = 1 + p * dim;
        let exo = (0..q)
            .map(|i| theta.block(base + i * kappa, 0, kappa, dim).transpose())
            .collect();
        Ok(Self { a0, a, exo })
    }

    pub fn stack(&self) -> Result<Matrix> {
        stack_blocks(&self.a0, &self.a, &self.exo)
    }
}

/// Outcome of [`validate_model`]; empty means the spec is usable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Validation(self.violations))
        }
    }
}

fn check_covariance(name: &str, cov: &Matrix, n: usize, out: &mut Vec<String>) {
    if cov.shape() != (n, n) {
        out.push(format!(
            "{} is {}x{}, expected {}x{}",
            name,
            cov.rows(),
            cov.cols(),
            n,
            n
        ));
        return;
    }
    if !cov.is_finite() {
        out.push(format!("{} has non-finite entries", name));
        return;
    }
    match min_symmetric_eigenvalue(cov) {
        Ok(None) => out.push(format!("{} not symmetric", name)),
        Ok(Some(l)) if l < -PSD_TOL * cov.max_abs().max(1.0) => {
            out.push(format!("{}: covariance not PSD (eigenvalue {:.6})", name, l))
        }
        Ok(Some(_)) => {}
        Err(e) => out.push(format!("{}: {}", name, e)),
    }
}

fn check_matrix(name: &str, m: &Matrix, shape: (usize, usize), out: &mut Vec<String>) {
    if m.shape() != shape {
        out.push(format!(
            "{} is {}x{}, expected {}x{}",
            name,
            m.rows(),
            m.cols(),
            shape.0,
            shape.1
        ));
    } else if !m.is_finite() {
        out.push(format!("{} has non-finite entries", name));
    }
}

/// Lists every problem with `spec`; never fails.
pub fn validate_model(spec: &ModelSpec) -> ValidationReport {
    let mut v = Vec::new();
    let (dim, kappa, p, q) = (spec.dim, spec.kappa, spec.p, spec.q);
    if dim == 0 {
        v.push("dimension D must be positive".to_string());
    }
    if p == 0 {
        v.push("autoregressive order p must be positive".to_string());
    }
    if spec.delay == 0 {
        v.push("delay d must be positive".to_string());
    }
    if q > 0 && kappa == 0 {
        v.push("exogenous order q > 0 requires kappa > 0".to_string());
    }

    if spec.partition.dim() != dim {
        v.push(format!(
            "partition has {} dimensions, expected {}",
            spec.partition.dim(),
            dim
        ));
    }
    let partition_ok = {
        let pv = spec.partition.violations();
        let ok = pv.is_empty();
        v.extend(pv);
        ok && spec.partition.dim() == dim
    };

    let mut seen = BTreeSet::new();
    for (tuple, c) in &spec.regimes {
        let label = RegimeIndex {
            tuple: tuple.clone(),
            linear: 0,
        }
        .label();
        if partition_ok {
            if spec.partition.linear_index(tuple).is_err() {
                v.push(format!("regime {} outside partition", label));
                continue;
            }
        }
        if !seen.insert(tuple.clone()) {
            v.push(format!("duplicate regime {}", label));
        }
        if c.a0.len() != dim {
            v.push(format!("regime {}: a0 has length {}, expected {}", label, c.a0.len(), dim));
        } else if c.a0.iter().any(|x| !x.is_finite()) {
            v.push(format!("regime {}: a0 has non-finite entries", label));
        }
        if c.a.len() != p {
            v.push(format!("regime {}: {} lag matrices, expected p={}", label, c.a.len(), p));
        }
        for (i, ai) in c.a.iter().enumerate() {
            check_matrix(&format!("regime {}: A_{}", label, i + 1), ai, (dim, dim), &mut v);
        }
        check_matrix(&format!("regime {}: Lambda", label), &c.lambda, (dim, kappa), &mut v);
    }
    if partition_ok {
        for r in spec.partition.regimes() {
            if !seen.contains(&r.tuple) {
                v.push(format!("missing regime {}", r.label()));
            }
        }
    }

    if spec.exogenous.xi.len() != q {
        v.push(format!(
            "exogenous process has {} Xi matrices, expected q={}",
            spec.exogenous.xi.len(),
            q
        ));
    }
    for (i, xi) in spec.exogenous.xi.iter().enumerate() {
        check_matrix(&format!("Xi_{}", i + 1), xi, (kappa, kappa), &mut v);
    }
    check_covariance("noise_cov_eta", &spec.exogenous.noise_cov, kappa, &mut v);
    check_covariance("noise_cov_eps", &spec.noise_cov_eps, dim, &mut v);

    ValidationReport { violations: v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{make_dgp, Dgp};

    fn dgp1_partition() -> ThresholdPartition {
        ThresholdPartition::new(vec![vec![-0.5, 0.5], vec![0.0]]).unwrap()
    }

    #[test]
    fn regime_index_examples() {
        let p = dgp1_partition();
        let r = p.regime_index(&[0.74, -0.20]).unwrap();
        assert_eq!(r.tuple, vec![3, 1]);
        // Fifth regime in the reference numbering.
        assert_eq!(r.linear, 4);

        let single = ThresholdPartition::single(3);
        assert_eq!(single.regime_index(&[1e9, -4.0, 0.0]).unwrap().tuple, vec![1, 1, 1]);

        assert_eq!(p.regime_index(&[-0.5, 0.0]).unwrap().tuple, vec![2, 2]);
    }

    #[test]
    fn regime_index_rejects_non_finite_and_bad_length() {
        let p = dgp1_partition();
        assert!(matches!(p.regime_index(&[f64::NAN, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(p.regime_index(&[0.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn linear_numbering_matches_reference_regimes() {
        let p = dgp1_partition();
        let expected = [[1, 1], [1, 2], [2, 1], [2, 2], [3, 1], [3, 2]];
        for (k, t) in expected.iter().enumerate() {
            assert_eq!(p.linear_index(t).unwrap(), k);
            assert_eq!(p.tuple_index(k).unwrap().tuple, t.to_vec());
        }
        assert!(p.tuple_index(6).is_err());
        assert!(p.linear_index(&[4, 1]).is_err());
    }

    #[test]
    fn partition_rejects_unsorted() {
        let err = ThresholdPartition::new(vec![vec![0.5, -0.5]]).unwrap_err();
        assert!(err.to_string().contains("breakpoints not increasing"));
    }

    #[test]
    fn build_regressor_layouts() {
        let y = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        let f = Matrix::from_rows(&[[3.0, 4.0]]).unwrap();
        let phi = build_regressor(&y, &f, 0, 1, 1).unwrap();
        assert_eq!(&*phi, &[1.0, 1.0, 2.0, 3.0, 4.0]);

        let phi = build_regressor(&y, &f, 0, 1, 0).unwrap();
        assert_eq!(phi.len(), 3);

        let y1 = Matrix::from_rows(&[[7.0], [5.0]]).unwrap();
        let none = Matrix::zeros(2, 0);
        let phi = build_regressor(&y1, &none, 1, 2, 0).unwrap();
        assert_eq!(&*phi, &[1.0, 5.0, 7.0]);
    }

    #[test]
    fn build_regressor_index_errors() {
        let y = Matrix::zeros(3, 1);
        let f = Matrix::zeros(3, 0);
        assert!(matches!(build_regressor(&y, &f, 0, 2, 0), Err(Error::Index(_))));
        assert!(matches!(build_regressor(&y, &f, 3, 1, 0), Err(Error::Index(_))));
    }

    #[test]
    fn stack_theta_examples() {
        let zero = RegimeCoefficients::zeros(2, 2, 1);
        let exo = ExogenousSpec {
            xi: vec![Matrix::identity(2)],
            noise_cov: Matrix::identity(2),
        };
        let theta = stack_theta(&zero, &exo).unwrap();
        assert_eq!(theta.shape(), (5, 2));
        assert_eq!(theta.max_abs(), 0.0);

        let scalar = RegimeCoefficients {
            a0: vec![1.0],
            a: vec![Matrix::from_rows(&[[0.5]]).unwrap()],
            lambda: Matrix::zeros(1, 0),
        };
        let theta = stack_theta(&scalar, &ExogenousSpec::none()).unwrap();
        assert_eq!(theta.as_slice(), &[1.0, 0.5]);
    }

    #[test]
    fn stack_theta_lumps_lambda_xi() {
        // Λ(1) Ξ_1 = [[0.2,0],[0,0]]·[[0.5,0],[0.3,0]] = [[0.1,0],[0,0]]
        let spec = make_dgp(Dgp::Dgp2);
        let c = spec.coefficients(&[1, 1]).unwrap();
        let theta = stack_theta(c, &spec.exogenous).unwrap();
        let blocks = ThetaBlocks::decode(&theta, 2, 2, 1, 1).unwrap();
        let want = Matrix::from_rows(&[[0.1, 0.0], [0.0, 0.0]]).unwrap();
        assert!(blocks.exo[0].max_abs_diff(&want) < 1e-15);
        assert_eq!(blocks.stack().unwrap(), theta);
    }

    #[test]
    fn stack_theta_shape_mismatch() {
        let c = RegimeCoefficients {
            a0: vec![0.0; 2],
            a: vec![Matrix::zeros(2, 2)],
            lambda: Matrix::zeros(2, 3),
        };
        let exo = ExogenousSpec {
            xi: vec![Matrix::zeros(2, 2)],
            noise_cov: Matrix::identity(2),
        };
        assert!(matches!(stack_theta(&c, &exo), Err(Error::Shape(_))));
    }

    #[test]
    fn validate_examples() {
        assert!(validate_model(&make_dgp(Dgp::Dgp1)).is_valid());
        assert!(validate_model(&make_dgp(Dgp::Dgp2)).is_valid());

        let mut bad = make_dgp(Dgp::Dgp1);
        bad.partition = ThresholdPartition::new_unchecked(vec![vec![0.5, -0.5], vec![0.0]]);
        let r = validate_model(&bad);
        assert!(r.violations.iter().any(|v| v.contains("breakpoints not increasing")));

        let mut bad = make_dgp(Dgp::Dgp1);
        bad.noise_cov_eps = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        let r = validate_model(&bad);
        // eigenvalues of [[1,2],[2,1]] are 3 and -1
        let msg = r.violations.iter().find(|v| v.contains("covariance not PSD")).unwrap();
        assert!(msg.contains("-1"), "{}", msg);
    }

    #[test]
    fn validate_reports_missing_regime_and_multiple_violations() {
        let mut bad = make_dgp(Dgp::Dgp1);
        bad.regimes.retain(|(t, _)| t != &vec![3, 2]);
        bad.exogenous.xi.push(Matrix::zeros(1, 1));
        let r = validate_model(&bad);
        assert!(r.violations.iter().any(|v| v == "missing regime (3,2)"));
        assert!(r.violations.len() >= 2);
    }
}
