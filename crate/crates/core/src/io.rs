//! JSON file formats: density matrices, local unitaries and result reports.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytic::BoundCertificate;
use crate::error::{MfefError, Result};
use crate::quantum::{hilbert_dim, validate_density, ComplexMatrix, DensityMatrix, LocalUnitarySet};
use crate::qudit::KktReport;
use crate::solve::RestartLog;

/// Density matrix on disk. `d` and `n` are explicit; the matrix is row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub d: usize,
    pub n: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix, label: Option<String>) -> Self {
        let (re, im) = split_row_major(rho.matrix());
        Self {
            d: rho.d(),
            n: rho.n(),
            re,
            im,
            label,
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        let dim = hilbert_dim(self.d, self.n)?;
        let raw = join_row_major(&self.re, &self.im, dim)?;
        validate_density(raw, self.d, self.n)
    }
}

/// One `d x d` matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntries {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitariesFile {
    pub d: usize,
    pub n: usize,
    pub unitaries: Vec<MatrixEntries>,
}

impl UnitariesFile {
    pub fn from_set(us: &LocalUnitarySet) -> Self {
        let unitaries = us
            .unitaries()
            .iter()
            .map(|u| {
                let (re, im) = split_row_major(u);
                MatrixEntries { re, im }
            })
            .collect();
        Self {
            d: us.d(),
            n: us.n(),
            unitaries,
        }
    }

    pub fn to_set(&self) -> Result<LocalUnitarySet> {
        if self.unitaries.len() != self.n {
            return Err(MfefError::DimensionMismatch {
                expected: self.n,
                got: self.unitaries.len(),
            });
        }
        let mats = self
            .unitaries
            .iter()
            .map(|m| join_row_major(&m.re, &m.im, self.d))
            .collect::<Result<Vec<_>>>()?;
        LocalUnitarySet::new(self.d, mats)
    }
}

fn split_row_major(m: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let mut re = Vec::with_capacity(m.len());
    let mut im = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            re.push(m[(i, j)].re);
            im.push(m[(i, j)].im);
        }
    }
    (re, im)
}

fn join_row_major(re: &[f64], im: &[f64], dim: usize) -> Result<ComplexMatrix> {
    let expected = dim * dim;
    for got in [re.len(), im.len()] {
        if got != expected {
            return Err(MfefError::EntryCount { expected, got });
        }
    }
    if re.iter().chain(im).any(|v| !v.is_finite()) {
        return Err(MfefError::NonFinite);
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(re[i * dim + j], im[i * dim + j])
    }))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<(T, String)> {
    let bytes = fs::read(path).map_err(|e| MfefError::Io(format!("{}: {e}", path.display())))?;
    let value = serde_json::from_slice(&bytes).map_err(|e| MfefError::Parse(format!("{}: {e}", path.display())))?;
    Ok((value, sha256_hex(&bytes)))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| MfefError::Io(format!("{}: {e}", path.display())))
}

/// Reads and validates a state file. Also returns the SHA-256 of the raw bytes.
pub fn read_state(path: &Path) -> Result<(StateFile, DensityMatrix, String)> {
    let (file, hash): (StateFile, String) = read_json(path)?;
    let rho = file.to_density()?;
    Ok((file, rho, hash))
}

pub fn read_unitaries(path: &Path) -> Result<LocalUnitarySet> {
    let (file, _): (UnitariesFile, String) = read_json(path)?;
    file.to_set()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportSource {
    Qubit,
    Qudit,
    Analytic,
    Oracle,
    Verify,
}

/// Echo of the settings that produced a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_sweeps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

/// Machine-readable output of every command. Only `wall_time_s` varies between
/// runs with the same input, seed and configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub input_sha256: String,
    pub d: usize,
    pub n: usize,
    pub solver: ReportSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub certificate: BoundCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_certificate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kkt_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubit_kkt_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kkt: Option<KktReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts_agreeing: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<Vec<RestartLog>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigEcho>,
    pub wall_time_s: f64,
    pub version: String,
}

impl ResultReport {
    /// Bare report carrying only the certificate; commands fill in the rest.
    pub fn new(
        command: &str,
        solver: ReportSource,
        file: &StateFile,
        hash: String,
        certificate: BoundCertificate,
    ) -> Self {
        Self {
            command: command.to_string(),
            label: file.label.clone(),
            input_sha256: hash,
            d: file.d,
            n: file.n,
            solver,
            value: None,
            certificate,
            within_certificate: None,
            kkt_residual: None,
            qubit_kkt_residual: None,
            kkt: None,
            converged: None,
            restarts_agreeing: None,
            restarts: None,
            config: None,
            wall_time_s: 0.0,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }
}
