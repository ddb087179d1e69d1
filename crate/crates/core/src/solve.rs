//! Configuration, results and the multi-start driver shared by both solvers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::BoundCertificate;
use crate::error::{MfefError, Result};
use crate::quantum::LocalUnitarySet;
use crate::qudit::KktReport;

/// Restarts whose final objective is within this distance of the best count as agreeing.
pub const AGREEMENT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Relative per-sweep objective gain below which a restart may stop.
    pub objective_tol: f64,
    /// KKT residual a restart must reach to be flagged converged.
    pub stationarity_tol: f64,
    pub seed: u64,
    /// Caps the restart pool; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Hold the first party at the identity and optimize the rest.
    pub pin_first: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_sweeps: 500,
            objective_tol: 1e-10,
            stationarity_tol: 1e-8,
            seed: 0,
            threads: None,
            pin_first: false,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_sweeps == 0 {
            return Err(MfefError::InvalidParameter(
                "restarts and max_sweeps must be positive".into(),
            ));
        }
        if !(self.objective_tol > 0.0 && self.stationarity_tol > 0.0) {
            return Err(MfefError::InvalidParameter("tolerances must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(MfefError::InvalidParameter("threads must be positive".into()));
        }
        Ok(())
    }

    /// Deterministic generator for one restart, independent of scheduling.
    pub fn restart_rng(&self, restart: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(restart as u64);
        rng
    }

    /// Runs `job` for every restart index, in parallel, returning results in index order.
    pub(crate) fn run_restarts<T, F>(&self, job: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize, &mut ChaCha8Rng) -> Result<T> + Sync,
    {
        let run = || {
            (0..self.restarts)
                .into_par_iter()
                .map(|r| job(r, &mut self.restart_rng(r)))
                .collect::<Result<Vec<T>>>()
        };
        match self.threads {
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| MfefError::InvalidParameter(e.to_string()))?
                .install(run),
            None => run(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Qubit,
    Qudit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartLog {
    pub restart: usize,
    pub objective: f64,
    pub sweeps: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct MfefEstimate {
    pub solver: SolverKind,
    pub value: f64,
    pub unitaries: LocalUnitarySet,
    pub certificate: BoundCertificate,
    pub kkt_residual: f64,
    /// Whether the reported restart met both stopping criteria.
    pub converged: bool,
    pub restarts_agreeing: usize,
    pub log: Vec<RestartLog>,
    /// Full Lagrange report for the qudit solver.
    pub kkt: Option<KktReport>,
}

/// Index of the best objective; ties go to the lowest index.
pub(crate) fn best_index(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn agreeing(values: &[f64], best: f64) -> usize {
    values.iter().filter(|&&v| (v - best).abs() <= AGREEMENT_TOL).count()
}
