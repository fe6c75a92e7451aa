//! Multivariate self-exciting threshold autoregressive models with
//! exogenous input (MSETARX).
//!
//! A D-dimensional series switches between linear VARX regimes according to
//! which cell of a threshold partition its own lagged value `y_{t-d}` falls
//! into, while a κ-dimensional exogenous VAR(q) input enters every regime
//! through a regime-specific loading.
//!
//! The crate covers:
//!
//! * [`model`]: partition, regime indexing, coefficient stacking, validation;
//! * [`simulate`] and [`dgp`]: seeded simulation and the two reference processes;
//! * [`stationarity`]: companion-matrix spectral radii and the cycle condition;
//! * [`estimate`]: batch, recursive and adaptive per-regime estimators;
//! * [`io`] and [`cli`]: JSON/CSV formats and the `msetarx` command line.

pub mod cli;
pub mod dgp;
pub mod error;
pub mod estimate;
pub mod io;
pub mod linalg;
pub mod model;
pub mod simulate;
pub mod stationarity;

pub use dgp::{make_dgp, Dgp};
pub use error::{Error, Result};
pub use estimate::{
    adaptive_fit, batch_lse, recursive_lse, residual_diagnostics, Algorithm, FitConfig, FitResult,
};
pub use linalg::Matrix;
pub use model::{
    build_regressor, stack_theta, validate_model, ExogenousSpec, ModelSpec, RegimeCoefficients,
    RegimeIndex, ThresholdPartition,
};
pub use simulate::{simulate_exogenous, simulate_msetarx, SimulationConfig, SimulationOutput};
pub use stationarity::{check_regime_stationarity, companion_matrix, cycle_spectral_radius};
