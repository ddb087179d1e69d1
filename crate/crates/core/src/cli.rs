//! Command-line front end. [`run`] is the whole program minus process I/O.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::analytic::bounds;
use crate::error::{MfefError, Result};
use crate::frame::qubit_params;
use crate::io::{
    read_state, read_unitaries, sha256_hex, write_json, ConfigEcho, ReportSource, ResultReport, StateFile,
    UnitariesFile,
};
use crate::oracle::haar_search;
use crate::quantum::objective;
use crate::qubit::{kkt_residual_qubit, solve_qubit};
use crate::qudit::{kkt_report, solve};
use crate::solve::{SolveConfig, SolverKind};
use crate::states::StateFamily;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// Slack allowed when checking a value against its certificate.
pub const CERTIFICATE_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "mfef",
    version,
    about = "Multipartite fully entangled fraction of qudit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    Auto,
    Qubit,
    Qudit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyChoice {
    Ghz,
    Theorem2,
    Theorem3,
    HaarMixed,
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stationarity tolerance a restart must reach.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_sweeps: usize,
    #[arg(long)]
    pub threads: Option<usize>,
}

impl SolveArgs {
    fn config(&self) -> SolveConfig {
        SolveConfig {
            restarts: self.restarts,
            max_sweeps: self.max_sweeps,
            stationarity_tol: self.tol,
            seed: self.seed,
            threads: self.threads,
            ..SolveConfig::default()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize over local unitaries and report F.
    Compute {
        state: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, value_enum, default_value_t = SolverChoice::Auto)]
        solver: SolverChoice,
        /// Also write the optimal unitaries to this file.
        #[arg(long)]
        unitaries_out: Option<PathBuf>,
    },
    /// Closed-form bounds only.
    Bounds { state: PathBuf },
    /// Write a state from a named family.
    MakeState {
        #[arg(long, value_enum)]
        family: FamilyChoice,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Coefficient of sigma_z^{⊗n} (theorem3).
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        /// Comma-separated probabilities (theorem2); their count sets d.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        /// Mixture rank (haar-mixed).
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Best objective over Haar-random local unitaries.
    Oracle {
        state: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Objective and stationarity of given unitaries.
    Verify { state: PathBuf, unitaries: PathBuf },
}

/// Everything the process would print, plus its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn input_error(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let start = Instant::now();
    let result = match cli.command {
        Command::Compute {
            state,
            solve,
            solver,
            unitaries_out,
        } => cmd_compute(&state, &solve, solver, unitaries_out.as_deref()),
        Command::Bounds { state } => cmd_bounds(&state).map(|r| (r, EXIT_OK)),
        Command::MakeState {
            family,
            d,
            n,
            c,
            p,
            rank,
            seed,
            label,
            out,
        } => {
            return match make_family(family, d, n, c, p, rank, seed).and_then(|f| cmd_make_state(&f, label, &out)) {
                Ok(json) => Outcome {
                    code: EXIT_OK,
                    stdout: json,
                    stderr: String::new(),
                },
                Err(e) => Outcome::input_error(e),
            };
        }
        Command::Oracle {
            state,
            samples,
            seed,
            threads,
        } => cmd_oracle(&state, samples, seed, threads).map(|r| (r, EXIT_OK)),
        Command::Verify { state, unitaries } => cmd_verify(&state, &unitaries).map(|r| (r, EXIT_OK)),
    };
    match result {
        Ok((mut report, code)) => {
            report.wall_time_s = start.elapsed().as_secs_f64();
            let stderr = if code == EXIT_NOT_CONVERGED {
                "warning: no restart met the stationarity tolerance; reporting best effort\n".to_string()
            } else {
                String::new()
            };
            Outcome {
                code,
                stdout: report.to_json() + "\n",
                stderr,
            }
        }
        Err(e) => Outcome::input_error(e),
    }
}

fn make_family(
    family: FamilyChoice,
    d: usize,
    n: usize,
    c: Option<f64>,
    p: Option<Vec<f64>>,
    rank: usize,
    seed: u64,
) -> Result<StateFamily> {
    Ok(match family {
        FamilyChoice::Ghz => StateFamily::Ghz { d, n },
        FamilyChoice::Theorem2 => StateFamily::Theorem2 {
            p: p.ok_or_else(|| MfefError::InvalidParameter("theorem2 needs --p".into()))?,
            n,
        },
        FamilyChoice::Theorem3 => StateFamily::Theorem3 {
            c: c.ok_or_else(|| MfefError::InvalidParameter("theorem3 needs --c".into()))?,
            n,
        },
        FamilyChoice::HaarMixed => StateFamily::HaarMixed { d, n, rank, seed },
    })
}

/// Runs the solver picked by `choice` (qubit for `d = 2` under `Auto`).
pub fn cmd_compute(
    path: &Path,
    args: &SolveArgs,
    choice: SolverChoice,
    unitaries_out: Option<&Path>,
) -> Result<(ResultReport, i32)> {
    let (file, rho, hash) = read_state(path)?;
    let cfg = args.config();
    cfg.validate()?;
    let kind = match choice {
        SolverChoice::Auto if rho.d() == 2 => SolverKind::Qubit,
        SolverChoice::Auto | SolverChoice::Qudit => SolverKind::Qudit,
        SolverChoice::Qubit => SolverKind::Qubit,
    };
    if kind == SolverKind::Qubit && rho.d() != 2 {
        return Err(MfefError::InvalidParameter(format!(
            "qubit solver needs d = 2, state has d = {}",
            rho.d()
        )));
    }
    let est = match kind {
        SolverKind::Qubit => solve_qubit(&rho, &cfg)?,
        SolverKind::Qudit => solve(&rho, &cfg)?,
    };
    if let Some(out) = unitaries_out {
        write_json(out, &UnitariesFile::from_set(&est.unitaries))?;
    }
    let source = match kind {
        SolverKind::Qubit => ReportSource::Qubit,
        SolverKind::Qudit => ReportSource::Qudit,
    };
    let mut report = ResultReport::new("compute", source, &file, hash, est.certificate);
    report.value = Some(est.value);
    report.within_certificate = Some(est.certificate.contains(est.value, CERTIFICATE_TOL));
    report.kkt_residual = Some(est.kkt_residual);
    report.kkt = est.kkt;
    report.converged = Some(est.converged);
    report.restarts_agreeing = Some(est.restarts_agreeing);
    report.restarts = Some(est.log);
    report.config = Some(ConfigEcho {
        restarts: Some(cfg.restarts),
        max_sweeps: Some(cfg.max_sweeps),
        tol: Some(cfg.stationarity_tol),
        samples: None,
        seed: cfg.seed,
        threads: cfg.threads,
    });
    let code = if est.converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
    Ok((report, code))
}

pub fn cmd_bounds(path: &Path) -> Result<ResultReport> {
    let (file, rho, hash) = read_state(path)?;
    Ok(ResultReport::new(
        "bounds",
        ReportSource::Analytic,
        &file,
        hash,
        bounds(&rho),
    ))
}

/// Writes the family's state to `out` and returns a JSON summary.
pub fn cmd_make_state(family: &StateFamily, label: Option<String>, out: &Path) -> Result<String> {
    let rho = family.build()?;
    let file = StateFile::from_density(&rho, Some(label.unwrap_or_else(|| family.name().to_string())));
    write_json(out, &file)?;
    let text = std::fs::read(out)?;
    let summary = serde_json::json!({
        "command": "make-state",
        "family": family.name(),
        "label": file.label,
        "d": file.d,
        "n": file.n,
        "path": out.display().to_string(),
        "sha256": sha256_hex(&text),
    });
    Ok(serde_json::to_string_pretty(&summary)? + "\n")
}

pub fn cmd_oracle(path: &Path, samples: usize, seed: u64, threads: Option<usize>) -> Result<ResultReport> {
    let (file, rho, hash) = read_state(path)?;
    let result = match threads {
        Some(0) => return Err(MfefError::InvalidParameter("threads must be positive".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| MfefError::InvalidParameter(e.to_string()))?
            .install(|| haar_search(&rho, samples, seed))?,
        None => haar_search(&rho, samples, seed)?,
    };
    let cert = bounds(&rho);
    let mut report = ResultReport::new("oracle", ReportSource::Oracle, &file, hash, cert);
    report.value = Some(result.value);
    report.within_certificate = Some(cert.contains(result.value, CERTIFICATE_TOL));
    report.config = Some(ConfigEcho {
        restarts: None,
        max_sweeps: None,
        tol: None,
        samples: Some(samples),
        seed,
        threads,
    });
    Ok(report)
}

/// Objective, stationarity and certificate check for given unitaries.
pub fn cmd_verify(state: &Path, unitaries: &Path) -> Result<ResultReport> {
    let (file, rho, hash) = read_state(state)?;
    let us = read_unitaries(unitaries)?;
    if us.d() != rho.d() || us.n() != rho.n() {
        return Err(MfefError::InvalidParameter(format!(
            "unitaries are for (d, n) = ({}, {}), state has ({}, {})",
            us.d(),
            us.n(),
            rho.d(),
            rho.n()
        )));
    }
    let value = objective(&rho, &us)?;
    let kkt = kkt_report(&rho, &us)?;
    let cert = bounds(&rho);
    let mut report = ResultReport::new("verify", ReportSource::Verify, &file, hash, cert);
    report.value = Some(value);
    report.within_certificate = Some(cert.contains(value, CERTIFICATE_TOL));
    report.kkt_residual = Some(kkt.gradient_residual);
    if rho.d() == 2 {
        let x: Vec<[f64; 4]> = us.unitaries().iter().map(qubit_params).collect();
        report.qubit_kkt_residual = Some(kkt_residual_qubit(&rho, &x)?);
    }
    report.kkt = Some(kkt);
    Ok(report)
}
