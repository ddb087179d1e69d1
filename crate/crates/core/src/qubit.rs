//! N-qubit solver: alternating top-eigenvector updates of the real unit
//! 4-vectors `x^(l)` that parametrize `U_l = x_0 I + i sum_j x_j sigma_j`.
//!
//! With every site but `l` fixed the objective is `x^T M^(l) x` on the unit
//! sphere, so the exact site maximizer is the top eigenvector of `M^(l)` and
//! its eigenvalue is both the new objective and the Lagrange multiplier.

use nalgebra::{Matrix4, Vector4};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::analytic::bounds;
use crate::error::{MfefError, Result};
use crate::frame::{canonical_sign, qubit_site_form, qubit_unitary};
use crate::quantum::{DensityMatrix, LocalUnitarySet};
use crate::solve::{agreeing, best_index, MfefEstimate, RestartLog, SolveConfig, SolverKind};

/// Top eigenvalues closer than this are treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QubitIterate {
    pub x: Vec<[f64; 4]>,
    pub objective: f64,
    /// Multiplier of the last updated site.
    pub lambda: f64,
    pub sweep: usize,
}

impl QubitIterate {
    /// Iterate at the given unit vectors; the objective is evaluated at site 0.
    pub fn new(rho: &DensityMatrix, x: Vec<[f64; 4]>) -> Result<Self> {
        if x.len() != rho.n() {
            return Err(MfefError::DimensionMismatch {
                expected: rho.n(),
                got: x.len(),
            });
        }
        if let Some(bad) = x.iter().find(|v| (norm4(v) - 1.0).abs() > 1e-12) {
            return Err(MfefError::InvalidParameter(format!("x has norm {}", norm4(bad))));
        }
        let us = unitaries_of(&x)?;
        let m = qubit_site_form(rho, &us, 0)?;
        let objective = quad(&m, &x[0]);
        Ok(Self {
            x,
            objective,
            lambda: objective,
            sweep: 0,
        })
    }

    pub fn identities(rho: &DensityMatrix) -> Result<Self> {
        Self::new(rho, vec![[1.0, 0.0, 0.0, 0.0]; rho.n()])
    }

    pub fn unitaries(&self) -> LocalUnitarySet {
        unitaries_of(&self.x).expect("unit x gives unitaries")
    }
}

fn norm4(x: &[f64; 4]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn quad(m: &Matrix4<f64>, x: &[f64; 4]) -> f64 {
    let v = Vector4::from(*x);
    v.dot(&(m * v))
}

fn unitaries_of(x: &[[f64; 4]]) -> Result<LocalUnitarySet> {
    LocalUnitarySet::new(2, x.iter().map(qubit_unitary).collect())
}

/// Uniform point on the unit 3-sphere.
pub fn random_unit4<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    loop {
        let x: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = norm4(&x);
        if norm > 1e-12 {
            return x.map(|v| v / norm);
        }
    }
}

/// Unit maximizer of `x^T m x`, with the tie-breaking rules of the sweep.
fn top_eigenvector(m: &Matrix4<f64>, previous: &[f64; 4]) -> Result<(f64, [f64; 4])> {
    let eig = m.symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(MfefError::EigenFailure("non-finite eigenvalue in site form".into()));
    }
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues[order[0]];
    let prev = Vector4::from(*previous);

    let degenerate: Vec<usize> = order
        .iter()
        .copied()
        .take_while(|&k| top - eig.eigenvalues[k] < DEGENERACY_GAP)
        .collect();
    if degenerate.len() > 1 {
        // keep the point of the top eigenspace closest to the previous iterate
        let mut proj = Vector4::zeros();
        for &k in &degenerate {
            let v = eig.eigenvectors.column(k);
            proj += v * v.dot(&prev);
        }
        if proj.norm() > 1e-8 {
            let p = proj.normalize();
            return Ok((top, [p[0], p[1], p[2], p[3]]));
        }
    }
    let v = eig.eigenvectors.column(order[0]);
    let mut x = [v[0], v[1], v[2], v[3]];
    let norm = norm4(&x);
    x.iter_mut().for_each(|c| *c /= norm);
    for c in x.iter_mut() {
        if c.abs() < 1e-14 {
            *c = 0.0;
        }
    }
    canonical_sign(&mut x);
    Ok((top, x))
}

/// Exact maximization over site `l` with all other sites fixed.
pub fn sweep_step(rho: &DensityMatrix, it: &QubitIterate, l: usize) -> Result<QubitIterate> {
    if l >= it.x.len() {
        return Err(MfefError::IndexOutOfRange(format!("site {l} >= {}", it.x.len())));
    }
    let m = qubit_site_form(rho, &it.unitaries(), l)?;
    let (_, x_new) = top_eigenvector(&m, &it.x[l])?;
    let value = quad(&m, &x_new);
    let mut out = it.clone();
    out.x[l] = x_new;
    out.objective = value;
    out.lambda = value;
    Ok(out)
}

/// `max_l || M^(l) x^(l) - (x^(l)T M^(l) x^(l)) x^(l) ||_2`.
pub fn kkt_residual_qubit(rho: &DensityMatrix, x: &[[f64; 4]]) -> Result<f64> {
    kkt_over_sites(rho, x, 0)
}

fn kkt_over_sites(rho: &DensityMatrix, x: &[[f64; 4]], first: usize) -> Result<f64> {
    let us = unitaries_of(x)?;
    let mut worst: f64 = 0.0;
    for (l, xl) in x.iter().enumerate().skip(first) {
        let m = qubit_site_form(rho, &us, l)?;
        let v = Vector4::from(*xl);
        let lambda = v.dot(&(m * v));
        worst = worst.max((m * v - v * lambda).norm());
    }
    Ok(worst)
}

/// Per-site multipliers `x^(l)T M^(l) x^(l)`.
pub fn qubit_multipliers(rho: &DensityMatrix, x: &[[f64; 4]]) -> Result<Vec<f64>> {
    let us = unitaries_of(x)?;
    (0..x.len())
        .map(|l| Ok(quad(&qubit_site_form(rho, &us, l)?, &x[l])))
        .collect()
}

struct RestartOutcome {
    it: QubitIterate,
    kkt: f64,
    converged: bool,
}

fn run_restart(rho: &DensityMatrix, cfg: &SolveConfig, x0: Vec<[f64; 4]>) -> Result<RestartOutcome> {
    let first = usize::from(cfg.pin_first);
    let mut it = QubitIterate::new(rho, x0)?;
    let mut kkt = f64::INFINITY;
    let mut converged = false;
    for sweep in 1..=cfg.max_sweeps {
        let before = it.objective;
        for l in first..rho.n() {
            it = sweep_step(rho, &it, l)?;
        }
        it.sweep = sweep;
        let gain = it.objective - before;
        if gain <= cfg.objective_tol * it.objective.abs().max(f64::MIN_POSITIVE) {
            kkt = kkt_over_sites(rho, &it.x, first)?;
            if kkt <= cfg.stationarity_tol {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        kkt = kkt_over_sites(rho, &it.x, first)?;
    }
    Ok(RestartOutcome { it, kkt, converged })
}

/// Multi-start alternating eigen-ascent. The first restart starts at the
/// identities, the others at uniform points of the 3-sphere per site.
pub fn solve_qubit(rho: &DensityMatrix, cfg: &SolveConfig) -> Result<MfefEstimate> {
    if rho.d() != 2 {
        return Err(MfefError::InvalidParameter(format!(
            "qubit solver needs d = 2, got {}",
            rho.d()
        )));
    }
    cfg.validate()?;
    let n = rho.n();
    let outcomes = cfg.run_restarts(|r, rng| {
        let x0: Vec<[f64; 4]> = (0..n)
            .map(|l| {
                if r == 0 || (cfg.pin_first && l == 0) {
                    [1.0, 0.0, 0.0, 0.0]
                } else {
                    random_unit4(rng)
                }
            })
            .collect();
        run_restart(rho, cfg, x0)
    })?;

    let values: Vec<f64> = outcomes.iter().map(|o| o.it.objective).collect();
    let best = best_index(&values);
    let chosen = &outcomes[best];
    Ok(MfefEstimate {
        solver: SolverKind::Qubit,
        value: chosen.it.objective,
        unitaries: chosen.it.unitaries(),
        certificate: bounds(rho),
        kkt_residual: chosen.kkt,
        converged: chosen.converged,
        restarts_agreeing: agreeing(&values, values[best]),
        log: outcomes
            .iter()
            .enumerate()
            .map(|(restart, o)| RestartLog {
                restart,
                objective: o.it.objective,
                sweeps: o.it.sweep,
                converged: o.converged,
            })
            .collect(),
        kkt: None,
    })
}
