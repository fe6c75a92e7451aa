//! File formats: JSON model specs and reports, CSV series.
//!
//! JSON is written through `serde_json` (shortest round-trip float
//! formatting, struct-order keys). CSV floats use Rust's `Display` for
//! `f64`, which is also the shortest representation that round-trips.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{FitConfig, FitResult, ResidualSummary, TrajectoryPoint};
use crate::linalg::Matrix;
use crate::model::{validate_model, ExogenousSpec, ModelSpec, RegimeCoefficients, ThresholdPartition};
use crate::simulate::SimulationOutput;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimsDocument {
    #[serde(rename = "D")]
    pub dim: usize,
    pub kappa: usize,
    pub p: usize,
    pub q: usize,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeDocument {
    pub index: Vec<usize>,
    pub a0: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "Lambda")]
    pub lambda: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExogenousDocument {
    #[serde(rename = "Xi")]
    pub xi: Vec<Vec<Vec<f64>>>,
    pub noise_cov: Vec<Vec<f64>>,
}

/// JSON form of a [`ModelSpec`]. For `fit --model-config` the regime,
/// exogenous and noise sections may be omitted; when regimes are present they
/// serve as reference coefficients for the error trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpecDocument {
    pub dims: DimsDocument,
    pub partition: Vec<Vec<f64>>,
    #[serde(default)]
    pub regimes: Vec<RegimeDocument>,
    #[serde(default)]
    pub exogenous: Option<ExogenousDocument>,
    #[serde(default)]
    pub noise_cov_eps: Option<Vec<Vec<f64>>>,
}

/// Nested rows to a matrix; an empty payload takes the expected shape so that
/// κ = 0 loadings may be written as `[]` or `[[], []]`.
fn to_matrix(name: &str, rows: &[Vec<f64>], expected: (usize, usize)) -> Result<Matrix> {
    if rows.iter().all(|r| r.is_empty()) && expected.0 * expected.1 == 0 {
        return Ok(Matrix::zeros(expected.0, expected.1));
    }
    Matrix::from_rows(rows).map_err(|e| Error::Validation(vec![format!("{}: {}", name, e)]))
}

impl ModelSpecDocument {
    pub fn from_spec(spec: &ModelSpec) -> Self {
        Self {
            dims: DimsDocument {
                dim: spec.dim,
                kappa: spec.kappa,
                p: spec.p,
                q: spec.q,
                d: spec.delay,
            },
            partition: spec.partition.breakpoints().to_vec(),
            regimes: spec
                .regimes
                .iter()
                .map(|(t, c)| RegimeDocument {
                    index: t.clone(),
                    a0: c.a0.clone(),
                    a: c.a.iter().map(Matrix::to_rows).collect(),
                    lambda: c.lambda.to_rows(),
                })
                .collect(),
            exogenous: Some(ExogenousDocument {
                xi: spec.exogenous.xi.iter().map(Matrix::to_rows).collect(),
                noise_cov: spec.exogenous.noise_cov.to_rows(),
            }),
            noise_cov_eps: Some(spec.noise_cov_eps.to_rows()),
        }
    }

    /// Converts to a [`ModelSpec`] without validating it.
    pub fn to_spec(&self) -> Result<ModelSpec> {
        let DimsDocument { dim, kappa, p, q, d } = self.dims;
        let regimes = self
            .regimes
            .iter()
            .map(|r| {
                let label = format!("regime {:?}", r.index);
                let a = r
                    .a
                    .iter()
                    .enumerate()
                    .map(|(i, m)| to_matrix(&format!("{} A_{}", label, i + 1), m, (dim, dim)))
                    .collect::<Result<Vec<_>>>()?;
                let lambda = to_matrix(&format!("{} Lambda", label), &r.lambda, (dim, kappa))?;
                Ok((
                    r.index.clone(),
                    RegimeCoefficients {
                        a0: r.a0.clone(),
                        a,
                        lambda,
                    },
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let exogenous = match &self.exogenous {
            Some(e) => ExogenousSpec {
                xi: e
                    .xi
                    .iter()
                    .enumerate()
                    .map(|(i, m)| to_matrix(&format!("Xi_{}", i + 1), m, (kappa, kappa)))
                    .collect::<Result<_>>()?,
                noise_cov: to_matrix("noise_cov_eta", &e.noise_cov, (kappa, kappa))?,
            },
            None if kappa == 0 && q == 0 => ExogenousSpec::none(),
            None => return Err(Error::Validation(vec!["missing exogenous section".into()])),
        };
        let noise_cov_eps = match &self.noise_cov_eps {
            Some(rows) => to_matrix("noise_cov_eps", rows, (dim, dim))?,
            None => return Err(Error::Validation(vec!["missing noise_cov_eps".into()])),
        };
        Ok(ModelSpec {
            dim,
            kappa,
            p,
            q,
            delay: d,
            partition: ThresholdPartition::new_unchecked(self.partition.clone()),
            regimes,
            exogenous,
            noise_cov_eps,
        })
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    // serde_json errors carry "at line L column C".
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed {}: {}", what, e)))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {}", path.display(), e),
        ))
    })
}

/// Parses a model document and validates it, listing every violation.
pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let doc: ModelSpecDocument = parse_json(text, "model JSON")?;
    let spec = doc.to_spec()?;
    validate_model(&spec).into_result()?;
    Ok(spec)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelSpec> {
    parse_model(&read_text(path.as_ref())?)
}

pub fn save_model(path: impl AsRef<Path>, spec: &ModelSpec) -> Result<()> {
    save_report(path, &ModelSpecDocument::from_spec(spec))
}

/// Structure needed by `fit`, plus optional reference coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub dims: DimsDocument,
    pub partition: ThresholdPartition,
    /// Full model when the document carries every regime.
    pub reference: Option<ModelSpec>,
}

pub fn parse_model_config(text: &str) -> Result<ModelConfig> {
    let doc: ModelSpecDocument = parse_json(text, "model config JSON")?;
    let partition = ThresholdPartition::new(doc.partition.clone())?;
    if partition.dim() != doc.dims.dim {
        return Err(Error::Validation(vec![format!(
            "partition has {} dimensions, expected {}",
            partition.dim(),
            doc.dims.dim
        )]));
    }
    let reference = if doc.regimes.is_empty() {
        None
    } else {
        let spec = doc.to_spec()?;
        validate_model(&spec).into_result()?;
        Some(spec)
    };
    Ok(ModelConfig {
        dims: doc.dims,
        partition,
        reference,
    })
}

pub fn load_model_config(path: impl AsRef<Path>) -> Result<ModelConfig> {
    parse_model_config(&read_text(path.as_ref())?)
}

/// Writes any serialisable report as pretty JSON with a trailing newline.
pub fn save_report<T: Serialize + ?Sized>(path: impl AsRef<Path>, report: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Numeric(format!("cannot serialise report: {}", e)))?;
    text.push('\n');
    fs::write(path.as_ref(), text)?;
    Ok(())
}

/// Endogenous/exogenous series with an optional regime column.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesData {
    pub y: Matrix,
    /// T×κ; zero columns when the model has no exogenous regressors.
    pub f: Matrix,
    pub regimes: Option<Vec<Option<usize>>>,
}

impl SeriesData {
    /// Series for a simulation; F columns are dropped when the model has
    /// `κ = 0` or `q = 0`.
    pub fn from_simulation(out: &SimulationOutput, spec: &ModelSpec, trace: bool) -> Self {
        let f = if spec.kappa == 0 || spec.q == 0 {
            Matrix::zeros(out.y.rows(), 0)
        } else {
            out.f.clone()
        };
        Self {
            y: out.y.clone(),
            f,
            regimes: trace.then(|| out.regime_trace.clone()),
        }
    }
}

pub fn write_series_to<W: Write>(writer: W, data: &SeriesData) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    header.extend((1..=data.y.cols()).map(|i| format!("y{}", i)));
    header.extend((1..=data.f.cols()).map(|i| format!("f{}", i)));
    if data.regimes.is_some() {
        header.push("regime".into());
    }
    w.write_record(&header).map_err(csv_err)?;
    let mut record = Vec::with_capacity(header.len());
    for t in 0..data.y.rows() {
        record.clear();
        record.push(t.to_string());
        record.extend(data.y.row(t).iter().map(|v| v.to_string()));
        record.extend(data.f.row(t).iter().map(|v| v.to_string()));
        if let Some(reg) = &data.regimes {
            record.push(reg[t].map(|r| r.to_string()).unwrap_or_default());
        }
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_series(path: impl AsRef<Path>, data: &SeriesData) -> Result<()> {
    let file = fs::File::create(path.as_ref())?;
    write_series_to(std::io::BufWriter::new(file), data)
}

fn parse_header(header: &csv::StringRecord) -> Result<(usize, usize, bool)> {
    let cols: Vec<&str> = header.iter().map(str::trim).collect();
    if cols.first() != Some(&"t") {
        return Err(Error::Parse("series header must start with 't'".into()));
    }
    let mut pos = 1;
    let mut dim = 0;
    while pos < cols.len() && cols[pos] == format!("y{}", dim + 1) {
        dim += 1;
        pos += 1;
    }
    let mut kappa = 0;
    while pos < cols.len() && cols[pos] == format!("f{}", kappa + 1) {
        kappa += 1;
        pos += 1;
    }
    let has_regime = pos < cols.len() && cols[pos] == "regime";
    if has_regime {
        pos += 1;
    }
    if dim == 0 {
        return Err(Error::Parse("series header has no y columns".into()));
    }
    if pos != cols.len() {
        return Err(Error::Parse(format!(
            "unexpected series column '{}' at position {}",
            cols[pos],
            pos + 1
        )));
    }
    Ok((dim, kappa, has_regime))
}

pub fn read_series_from<R: std::io::Read>(reader: R) -> Result<SeriesData> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse(format!("series header: {}", e)))?
        .clone();
    let (dim, kappa, has_regime) = parse_header(&header)?;
    let width = header.len();

    let mut y = Vec::new();
    let mut f = Vec::new();
    let mut regimes = Vec::new();
    let mut last_t: Option<u64> = None;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse(format!("row {}: {}", row, e)))?;
        if rec.len() != width {
            return Err(Error::Parse(format!(
                "ragged row {}: {} fields, header has {}",
                row,
                rec.len(),
                width
            )));
        }
        let t: u64 = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: invalid time index '{}'", row, &rec[0])))?;
        match last_t {
            None if t != 0 => {
                return Err(Error::Parse(format!("row {}: time index must start at 0", row)))
            }
            Some(prev) if t <= prev => {
                return Err(Error::Parse(format!(
                    "row {}: time index {} not increasing",
                    row, t
                )))
            }
            _ => {}
        }
        last_t = Some(t);
        for c in 1..1 + dim + kappa {
            let v: f64 = rec[c].trim().parse().map_err(|_| {
                Error::Parse(format!("row {}: non-numeric value '{}' in column {}", row, &rec[c], c + 1))
            })?;
            if c <= dim {
                y.push(v);
            } else {
                f.push(v);
            }
        }
        if has_regime {
            let cell = rec[width - 1].trim();
            regimes.push(if cell.is_empty() {
                None
            } else {
                Some(cell.parse().map_err(|_| {
                    Error::Parse(format!("row {}: invalid regime '{}'", row, cell))
                })?)
            });
        }
    }
    let n = y.len() / dim;
    Ok(SeriesData {
        y: Matrix::from_vec(n, dim, y)?,
        f: Matrix::from_vec(n, kappa, f)?,
        regimes: has_regime.then_some(regimes),
    })
}

pub fn read_series(path: impl AsRef<Path>) -> Result<SeriesData> {
    let file = fs::File::open(path.as_ref()).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {}", path.as_ref().display(), e),
        ))
    })?;
    read_series_from(std::io::BufReader::new(file))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeFitDocument {
    pub index: Vec<usize>,
    pub linear: usize,
    pub regime_time: usize,
    pub a0: Option<Vec<f64>>,
    #[serde(rename = "A")]
    pub a: Option<Vec<Vec<Vec<f64>>>>,
    /// Products Λ Ξ_τ, each D×κ.
    pub exo: Option<Vec<Vec<Vec<f64>>>>,
    pub residual_cov: Option<Vec<Vec<f64>>>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualDocument {
    pub count: usize,
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SettingsDocument {
    pub ridge: Option<f64>,
    pub alpha: Option<f64>,
    pub upsilon: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitDocument {
    pub algorithm: String,
    pub dims: DimsDocument,
    pub partition: Vec<Vec<f64>>,
    pub settings: SettingsDocument,
    pub total_regime_time: usize,
    pub regimes: Vec<RegimeFitDocument>,
    pub residuals: Option<ResidualDocument>,
}

impl FitDocument {
    pub fn new(result: &FitResult, cfg: &FitConfig, summary: Option<&ResidualSummary>) -> Self {
        use crate::estimate::Algorithm;
        let settings = match result.algorithm {
            Algorithm::Batch => SettingsDocument {
                ridge: None,
                alpha: None,
                upsilon: None,
            },
            Algorithm::Recursive => SettingsDocument {
                ridge: Some(cfg.ridge),
                alpha: None,
                upsilon: None,
            },
            Algorithm::Adaptive => SettingsDocument {
                ridge: None,
                alpha: Some(cfg.alpha),
                upsilon: Some(cfg.upsilon.clone()),
            },
        };
        let regimes = result
            .regimes
            .iter()
            .map(|r| {
                let blocks = r.blocks(result.dim, result.kappa, result.p, result.q);
                RegimeFitDocument {
                    index: r.index.clone(),
                    linear: r.linear,
                    regime_time: r.count,
                    a0: blocks.as_ref().map(|b| b.a0.clone()),
                    a: blocks.as_ref().map(|b| b.a.iter().map(Matrix::to_rows).collect()),
                    exo: blocks.as_ref().map(|b| b.exo.iter().map(Matrix::to_rows).collect()),
                    residual_cov: summary
                        .and_then(|s| s.regime_covariance[r.linear].as_ref())
                        .map(Matrix::to_rows),
                    failure: r.failure.clone(),
                }
            })
            .collect();
        Self {
            algorithm: result.algorithm.to_string(),
            dims: DimsDocument {
                dim: result.dim,
                kappa: result.kappa,
                p: result.p,
                q: result.q,
                d: result.delay,
            },
            partition: cfg.partition.breakpoints().to_vec(),
            settings,
            total_regime_time: result.total_count(),
            regimes,
            residuals: summary.map(|s| ResidualDocument {
                count: result.residuals.rows(),
                mean: s.mean.clone(),
                covariance: s.covariance.to_rows(),
            }),
        }
    }
}

/// CSV with columns `step,regime,max_abs_error`.
pub fn write_trajectory(path: impl AsRef<Path>, points: &[TrajectoryPoint]) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_err)?;
    w.write_record(["step", "regime", "max_abs_error"]).map_err(csv_err)?;
    for p in points {
        w.write_record([
            p.step.to_string(),
            p.regime.to_string(),
            p.max_abs_error.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
