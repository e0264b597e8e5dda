//! Ground-truth benchmarks and dataset ingestion.

mod catalog;
mod target;

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use catalog::{benchmark, builtin_benchmarks};
pub use target::{BinOp, Func, TargetExpr, TargetParseError};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("targets have zero variance")]
    ZeroVariance,
    #[error("need at least 2 samples, got {0}")]
    TooFewPoints(usize),
    #[error("column lengths differ: {inputs} inputs vs {targets} targets")]
    LengthMismatch { inputs: usize, targets: usize },
    #[error("line {line}: {message}")]
    ParseError { line: u64, message: String },
    #[error("unknown benchmark {0:?}")]
    UnknownBenchmark(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Per-variable sampling intervals and the sample count used to draw a dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleDomain {
    pub intervals: Vec<(f64, f64)>,
    pub samples: usize,
}

/// Input columns and targets, validated for a nonzero target variance.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    columns: Vec<Vec<f64>>,
    targets: Vec<f64>,
    domain: Option<SampleDomain>,
    ss_tot: f64,
}

impl Dataset {
    /// `columns` holds one vector per input variable.
    pub fn new(name: impl Into<String>, columns: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self, DataError> {
        let n = targets.len();
        if let Some(bad) = columns.iter().find(|c| c.len() != n) {
            return Err(DataError::LengthMismatch {
                inputs: bad.len(),
                targets: n,
            });
        }
        if n < 2 {
            return Err(DataError::TooFewPoints(n));
        }
        let mean = targets.iter().sum::<f64>() / n as f64;
        let ss_tot: f64 = targets.iter().map(|y| (y - mean).powi(2)).sum();
        if !(ss_tot > 0.0) || !ss_tot.is_finite() {
            return Err(DataError::ZeroVariance);
        }
        Ok(Self {
            name: name.into(),
            columns,
            targets,
            domain: None,
            ss_tot,
        })
    }

    pub fn with_domain(mut self, domain: SampleDomain) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn domain(&self) -> Option<&SampleDomain> {
        self.domain.as_ref()
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn n_vars(&self) -> usize {
        self.columns.len()
    }

    /// Σ(yᵢ − ȳ)².
    pub fn ss_tot(&self) -> f64 {
        self.ss_tot
    }

    /// Writes a CSV with header `x0,...,x{d-1},y`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = (0..self.n_vars()).map(|i| format!("x{i}")).collect();
        header.push("y".into());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let row = self
                .columns
                .iter()
                .map(|c| c[i])
                .chain(std::iter::once(self.targets[i]))
                .map(|v| format!("{v:e}"));
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A ground-truth benchmark: target formula and sampling domain.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkSpec {
    pub name: String,
    /// The target in infix notation.
    pub expression: String,
    pub target: TargetExpr,
    pub n_vars: usize,
    /// Every variable is drawn from this interval.
    pub interval: (f64, f64),
    pub samples: usize,
    /// Whether the search alphabet includes the constant placeholder.
    pub constants_allowed: bool,
}

impl BenchmarkSpec {
    pub fn domain(&self) -> SampleDomain {
        SampleDomain {
            intervals: vec![self.interval; self.n_vars],
            samples: self.samples,
        }
    }

    /// Draws `samples` inputs uniformly from the interval and evaluates the
    /// target exactly. Pure in `(self, seed)`.
    pub fn generate(&self, seed: u64) -> Result<Dataset, DataError> {
        self.generate_n(seed, self.samples)
    }

    /// As [`generate`](Self::generate) with an explicit sample count.
    pub fn generate_n(&self, seed: u64, samples: usize) -> Result<Dataset, DataError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = self.interval;
        let columns: Vec<Vec<f64>> = (0..self.n_vars)
            .map(|_| (0..samples).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect())
            .collect();
        let mut point = vec![0.0; self.n_vars];
        let targets = (0..samples)
            .map(|i| {
                for (p, c) in point.iter_mut().zip(&columns) {
                    *p = c[i];
                }
                self.target.eval(&point)
            })
            .collect();
        Ok(Dataset::new(self.name.clone(), columns, targets)?.with_domain(self.domain()))
    }
}

/// Convenience wrapper around [`BenchmarkSpec::generate`].
pub fn generate_dataset(spec: &BenchmarkSpec, seed: u64) -> Result<Dataset, DataError> {
    spec.generate(seed)
}

/// Reads a headed, comma-separated file; the last column is the target.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let width = reader.headers()?.len();
    if width < 2 {
        return Err(DataError::ParseError {
            line: 1,
            message: format!("need at least 2 columns, found {width}"),
        });
    }
    let mut columns = vec![Vec::new(); width - 1];
    let mut targets = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(DataError::ParseError {
                line,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| DataError::ParseError {
                line,
                message: format!("not a number: {cell:?}"),
            })?;
            if j + 1 == width {
                targets.push(v);
            } else {
                columns[j].push(v);
            }
        }
    }
    let name = path.file_stem().map_or_else(|| "data".into(), |s| s.to_string_lossy().into_owned());
    Dataset::new(name, columns, targets)
}
