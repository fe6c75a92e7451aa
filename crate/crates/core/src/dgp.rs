//! The two reference data-generating processes.
//!
//! * `Dgp1`: bivariate, six regimes (thresholds {-0.5, 0.5} on component 1
//!   and {0} on component 2), delay 6, order 3, no exogenous input, N(0, I)
//!   noise.
//! * `Dgp2`: bivariate, three regimes keyed on component 2 (thresholds
//!   {-0.5, 0.5}), p = q = d = 1, bivariate exogenous VAR(1). The middle
//!   regime is explosive on its own.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::linalg::Matrix;
use crate::model::{ExogenousSpec, ModelSpec, RegimeCoefficients, ThresholdPartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dgp {
    Dgp1,
    Dgp2,
}

impl FromStr for Dgp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "dgp1" => Ok(Dgp::Dgp1),
            "dgp2" => Ok(Dgp::Dgp2),
            other => Err(Error::Usage(format!(
                "unknown data-generating process '{}' (expected dgp1 or dgp2)",
                other
            ))),
        }
    }
}

impl fmt::Display for Dgp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dgp::Dgp1 => "dgp1",
            Dgp::Dgp2 => "dgp2",
        })
    }
}

fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
    Matrix::from_vec(2, 2, vec![a, b, c, d]).expect("2x2")
}

/// Looks up a reference process by name (`dgp1` / `dgp2`).
pub fn make_dgp_by_name(name: &str) -> Result<ModelSpec, Error> {
    Ok(make_dgp(name.parse()?))
}

pub fn make_dgp(which: Dgp) -> ModelSpec {
    match which {
        Dgp::Dgp1 => dgp1(),
        Dgp::Dgp2 => dgp2(),
    }
}

fn dgp1() -> ModelSpec {
    // (tuple, a0, A1, A2, A3) in reference regime order 1..6.
    let table: [([usize; 2], [f64; 2], Matrix, Matrix, Matrix); 6] = [
        (
            [1, 1],
            [0.74, -0.20],
            m2(-0.02, 0.00, 0.00, 0.30),
            m2(0.53, 0.00, 0.00, 0.30),
            m2(0.00, 0.53, 0.00, 0.30),
        ),
        (
            [1, 2],
            [-0.75, -0.20],
            m2(-0.02, 0.00, 0.00, 0.30),
            m2(0.53, 0.00, 0.00, 0.30),
            m2(0.00, 0.53, 0.00, 0.30),
        ),
        (
            [2, 1],
            [1.15, -0.20],
            m2(-0.94, 0.00, 0.00, 0.30),
            m2(0.85, 0.00, 0.00, 0.30),
            m2(0.00, 0.85, 0.00, 0.30),
        ),
        (
            [2, 2],
            [0.74, 0.20],
            m2(-0.94, 0.00, 0.00, 0.30),
            m2(0.85, 0.00, 0.00, 0.30),
            m2(0.00, 0.85, 0.00, 0.30),
        ),
        (
            [3, 1],
            [-0.75, 0.20],
            m2(-1.10, 0.00, 0.00, 0.30),
            m2(-0.30, 0.00, 0.00, 0.30),
            m2(0.00, -0.30, 0.00, 0.30),
        ),
        (
            [3, 2],
            [1.15, 0.20],
            m2(-1.10, 0.00, 0.00, 0.30),
            m2(0.30, 0.00, 0.00, 0.30),
            m2(0.00, 0.30, 0.00, 0.30),
        ),
    ];
    let regimes = table
        .into_iter()
        .map(|(t, a0, a1, a2, a3)| {
            (
                t.to_vec(),
                RegimeCoefficients {
                    a0: a0.to_vec(),
                    a: vec![a1, a2, a3],
                    lambda: Matrix::zeros(2, 0),
                },
            )
        })
        .collect();
    ModelSpec {
        dim: 2,
        kappa: 0,
        p: 3,
        q: 0,
        delay: 6,
        partition: ThresholdPartition::new(vec![vec![-0.5, 0.5], vec![0.0]]).expect("sorted"),
        regimes,
        exogenous: ExogenousSpec::none(),
        noise_cov_eps: Matrix::identity(2),
    }
}

fn dgp2() -> ModelSpec {
    let a1 = [
        m2(-0.3, 0.6, -0.7, 0.4),
        m2(1.5, -1.0, 0.2, 0.3),
        m2(0.3, -0.1, 0.2, 0.6),
    ];
    let lambda = [
        m2(0.2, 0.0, 0.0, 0.0),
        m2(0.3, 0.0, 0.0, 0.2),
        m2(0.8, 0.0, 0.0, 0.0),
    ];
    let regimes = a1
        .into_iter()
        .zip(lambda)
        .enumerate()
        .map(|(j, (a, l))| {
            (
                vec![1, j + 1],
                RegimeCoefficients {
                    a0: vec![0.0, 0.0],
                    a: vec![a],
                    lambda: l,
                },
            )
        })
        .collect();
    ModelSpec {
        dim: 2,
        kappa: 2,
        p: 1,
        q: 1,
        delay: 1,
        // Component 1 is not a threshold variable: a single cell.
        partition: ThresholdPartition::new(vec![vec![], vec![-0.5, 0.5]]).expect("sorted"),
        regimes,
        exogenous: ExogenousSpec {
            xi: vec![m2(0.5, 0.0, 0.3, 0.0)],
            noise_cov: Matrix::identity(2),
        },
        noise_cov_eps: Matrix::identity(2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dgp1_regime6_values() {
        let spec = make_dgp(Dgp::Dgp1);
        let c = spec.coefficients(&[3, 2]).unwrap();
        assert_eq!(c.a0, vec![1.15, 0.20]);
        assert_eq!(c.a[0], m2(-1.10, 0.0, 0.0, 0.30));
        assert_eq!((spec.p, spec.delay, spec.p_star()), (3, 6, 6));
    }

    #[test]
    fn dgp2_values() {
        let spec = make_dgp(Dgp::Dgp2);
        assert_eq!(spec.exogenous.xi[0], m2(0.5, 0.0, 0.3, 0.0));
        assert_eq!(spec.coefficients(&[1, 2]).unwrap().lambda, m2(0.3, 0.0, 0.0, 0.2));
        assert_eq!(spec.partition.num_regimes(), 3);
    }

    #[test]
    fn unknown_name_is_usage_error() {
        assert!(matches!(make_dgp_by_name("dgp3"), Err(Error::Usage(_))));
        assert!(make_dgp_by_name("dgp2").is_ok());
    }
}
