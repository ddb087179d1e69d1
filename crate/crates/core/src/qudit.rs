//! General-`d` solver: Riemannian ascent on each local unitary with a polar
//! retraction, and certification of endpoints against the Lagrange system
//! in the coefficient variables `z = x + i y` of `U = sum_mu z_mu sigma_mu`.
//!
//! Lagrangian per site `l`:
//!
//! ```text
//! L = f - lambda_l (sum_mu |z_mu|^2 - d/2) - sum_k tau_lk g_k(x, y)
//! ```
//!
//! with `g_k` the `sigma_k` coefficient of `U U^H`. Contracting the gradient
//! condition with `(x, y)` gives `2 f = d lambda_l`, so the multiplier is
//! reported rescaled by `d/2`; it then equals the objective at any
//! stationary point, as in the qubit case.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::bounds;
use crate::error::{MfefError, Result};
use crate::frame::qudit_site_form;
use crate::generators::{basis, constraint_residuals, UnitaryCoefficients};
use crate::quantum::{
    apply_local, polar_unitary, rotated_ghz, ComplexMatrix, DensityMatrix, LocalUnitarySet, StateVector,
};
use crate::solve::{agreeing, best_index, MfefEstimate, RestartLog, SolveConfig, SolverKind};

/// Relative singular-value cutoff for the constraint Jacobian.
pub const RANK_TOL: f64 = 1e-10;
/// Objective decrease tolerated as rounding when accepting a step.
pub const ROUNDING_SLACK: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct QuditIterate {
    pub unitaries: LocalUnitarySet,
    pub objective: f64,
    pub sweep: usize,
}

impl QuditIterate {
    pub fn new(rho: &DensityMatrix, unitaries: LocalUnitarySet) -> Result<Self> {
        let objective = crate::quantum::objective(rho, &unitaries)?;
        Ok(Self {
            unitaries,
            objective,
            sweep: 0,
        })
    }
}

/// Backtracking line-search parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// First trial step; `None` uses `1 / (1 + ||G||_F)`.
    pub initial_eta: Option<f64>,
    pub shrink: f64,
    pub max_halvings: usize,
    /// Sufficient-increase constant.
    pub armijo: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            initial_eta: None,
            shrink: 0.5,
            max_halvings: 30,
            armijo: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub accepted: bool,
    pub eta: f64,
    pub gain: f64,
    /// Riemannian gradient norm `||G - U G^H U||_F` before the step.
    pub direction_norm: f64,
    pub stalled: bool,
}

/// Slot-`l` environment: the GHZ vector rotated at every site except `l`.
fn environment(us: &LocalUnitarySet, l: usize) -> StateVector {
    rotated_ghz(us, Some(l))
}

/// `G_ab = 2 sum_{L,R} (rho v)[L,a,R] conj(env[L,b,R])`.
fn gradient_from(rho: &DensityMatrix, u: &ComplexMatrix, env: &StateVector, l: usize) -> (ComplexMatrix, f64) {
    let (d, n) = (rho.d(), rho.n());
    let v = apply_local(u, l, d, n, env);
    let r = rho.matrix() * &v;
    let value = v.dotc(&r).re;
    let right = d.pow((n - 1 - l) as u32);
    let left = env.len() / (d * right);
    let mut g = ComplexMatrix::zeros(d, d);
    for a in 0..left {
        let base = a * d * right;
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..right {
                    acc += r[base + i * right + k] * env[base + j * right + k].conj();
                }
                g[(i, j)] += acc;
            }
        }
    }
    (g * Complex64::new(2.0, 0.0), value)
}

/// Euclidean gradient `G_l`: `f(U_l + D) - f(U_l) = Re tr(G_l^H D) + O(|D|^2)`.
pub fn euclidean_gradient(rho: &DensityMatrix, us: &LocalUnitarySet, l: usize) -> Result<ComplexMatrix> {
    check_site(rho, us, l)?;
    Ok(gradient_from(rho, us.get(l), &environment(us, l), l).0)
}

/// Tangent direction `G - U G^H U` at `U`.
pub fn riemannian_direction(u: &ComplexMatrix, g: &ComplexMatrix) -> ComplexMatrix {
    g - u * g.adjoint() * u
}

fn check_site(rho: &DensityMatrix, us: &LocalUnitarySet, l: usize) -> Result<()> {
    if us.d() != rho.d() || us.n() != rho.n() {
        return Err(MfefError::DimensionMismatch {
            expected: rho.dim(),
            got: us.d().pow(us.n() as u32),
        });
    }
    if l >= rho.n() {
        return Err(MfefError::IndexOutOfRange(format!("site {l} >= {}", rho.n())));
    }
    Ok(())
}

/// One backtracking ascent step at site `l`:
/// `U_l <- polar(U_l + eta (G_l - U_l G_l^H U_l))`.
pub fn ascent_step(
    rho: &DensityMatrix,
    it: &QuditIterate,
    l: usize,
    control: &StepControl,
) -> Result<(QuditIterate, StepOutcome)> {
    check_site(rho, &it.unitaries, l)?;
    let (d, n) = (rho.d(), rho.n());
    let env = environment(&it.unitaries, l);
    let u = it.unitaries.get(l);
    let (g, current) = gradient_from(rho, u, &env, l);
    let dir = riemannian_direction(u, &g);
    let dnorm = dir.norm();
    let mut out = it.clone();
    out.objective = current;
    if dnorm == 0.0 {
        let outcome = StepOutcome {
            accepted: true,
            eta: 0.0,
            gain: 0.0,
            direction_norm: 0.0,
            stalled: false,
        };
        return Ok((out, outcome));
    }
    // directional derivative along dir is ||dir||^2 / 2
    let slope = 0.5 * dnorm * dnorm;
    let mut eta = control.initial_eta.unwrap_or(1.0 / (1.0 + g.norm()));
    for _ in 0..=control.max_halvings {
        let trial = polar_unitary(&(u + &dir * Complex64::new(eta, 0.0)));
        let v = apply_local(&trial, l, d, n, &env);
        let value = rho.expectation(&v);
        if value >= current + control.armijo * eta * slope - ROUNDING_SLACK {
            out.unitaries.set_unchecked(l, trial);
            out.objective = value;
            let outcome = StepOutcome {
                accepted: true,
                eta,
                gain: value - current,
                direction_norm: dnorm,
                stalled: false,
            };
            return Ok((out, outcome));
        }
        eta *= control.shrink;
    }
    let outcome = StepOutcome {
        accepted: false,
        eta,
        gain: 0.0,
        direction_norm: dnorm,
        stalled: true,
    };
    Ok((out, outcome))
}

/// Lagrange stationarity report for a set of local unitaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// Norm-constraint multiplier per site, scaled by `d/2` (equals the objective at stationarity).
    pub lambda: Vec<f64>,
    /// Multipliers of the `d^2 - 1` off-identity constraints per site.
    pub tau: Vec<Vec<f64>>,
    /// Max-norm of `grad f - J^T (lambda, tau)` over every `x`, `y` coordinate.
    pub gradient_residual: f64,
    /// Max-norm of the constraint left-hand sides.
    pub constraint_residual: f64,
    pub rank_deficient: bool,
    pub objective: f64,
}

impl KktReport {
    /// Multipliers on the norm constraint as written, `sum |z|^2 - d/2`.
    pub fn raw_lambda(&self, d: usize) -> Vec<f64> {
        self.lambda.iter().map(|l| l * 2.0 / d as f64).collect()
    }
}

/// Rows: gradients of the norm constraint and of each `g_k`, in `(x, y)` order.
pub(crate) fn constraint_jacobian(zc: &UnitaryCoefficients) -> Result<DMatrix<f64>> {
    let b = basis(zc.d)?;
    let d = zc.d;
    let m = d * d;
    let (x, y) = (zc.x(), zc.y());
    let s = (2.0 / d as f64).sqrt();
    let mut jac = DMatrix::zeros(m, 2 * m);
    for mu in 0..m {
        jac[(0, mu)] = 2.0 * x[mu];
        jac[(0, m + mu)] = 2.0 * y[mu];
    }
    for k in 1..m {
        jac[(k, 0)] += 2.0 * s * x[k];
        jac[(k, m)] += 2.0 * s * y[k];
        jac[(k, k)] += 2.0 * s * x[0];
        jac[(k, m + k)] += 2.0 * s * y[0];
        for a in 1..m {
            let (mut gx, mut gy) = (0.0, 0.0);
            for j in 1..m {
                let (daj, faj, fja) = (b.dsym(a, j, k), b.f(a, j, k), b.f(j, a, k));
                gx += 2.0 * x[j] * daj + 2.0 * y[j] * faj;
                gy += 2.0 * y[j] * daj + 2.0 * x[j] * fja;
            }
            jac[(k, a)] += gx;
            jac[(k, m + a)] += gy;
        }
    }
    Ok(jac)
}

/// Recovers `(lambda_l, tau_lk)` by least squares at every site and reports
/// the out-of-span gradient residual and the constraint residuals.
pub fn kkt_report(rho: &DensityMatrix, us: &LocalUnitarySet) -> Result<KktReport> {
    if us.d() != rho.d() || us.n() != rho.n() {
        return Err(MfefError::DimensionMismatch {
            expected: rho.dim(),
            got: us.d().pow(us.n() as u32),
        });
    }
    let d = rho.d();
    let b = basis(d)?;
    let m = d * d;
    let objective = crate::quantum::objective(rho, us)?;
    let mut report = KktReport {
        lambda: Vec::with_capacity(rho.n()),
        tau: Vec::with_capacity(rho.n()),
        gradient_residual: 0.0,
        constraint_residual: 0.0,
        rank_deficient: false,
        objective,
    };
    for l in 0..rho.n() {
        let zc = crate::generators::decompose_unitary(us.get(l), &b)?;
        let (norm_res, ks) = constraint_residuals(&zc, &b);
        report.constraint_residual = ks
            .iter()
            .map(|c| c.norm())
            .fold(report.constraint_residual.max(norm_res.abs()), f64::max);

        let h = qudit_site_form(rho, us, l)?;
        let hz = &h * DVector::from_column_slice(&zc.z);
        let grad = DVector::from_fn(2 * m, |i, _| if i < m { 2.0 * hz[i].re } else { 2.0 * hz[i - m].im });

        let jt = constraint_jacobian(&zc)?.transpose();
        let svd = jt.clone().svd(true, true);
        let smax = svd.singular_values.max();
        if svd.singular_values.iter().any(|&s| s <= RANK_TOL * smax) {
            report.rank_deficient = true;
        }
        let mult = svd
            .solve(&grad, RANK_TOL * smax)
            .map_err(|e| MfefError::EigenFailure(e.to_string()))?;
        let residual = &grad - &jt * &mult;
        report.gradient_residual = report.gradient_residual.max(residual.amax());
        report.lambda.push(mult[0] * d as f64 / 2.0);
        report.tau.push(mult.iter().skip(1).copied().collect());
    }
    Ok(report)
}

struct RestartOutcome {
    it: QuditIterate,
    converged: bool,
}

/// `max_l ||G_l - U_l G_l^H U_l||_F / sqrt(2)`: the 2-norm of the
/// out-of-span gradient component in coefficient space.
pub fn stationarity(rho: &DensityMatrix, us: &LocalUnitarySet, first: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for l in first..rho.n() {
        let g = euclidean_gradient(rho, us, l)?;
        worst = worst.max(riemannian_direction(us.get(l), &g).norm() / std::f64::consts::SQRT_2);
    }
    Ok(worst)
}

fn run_restart(rho: &DensityMatrix, cfg: &SolveConfig, start: LocalUnitarySet) -> Result<RestartOutcome> {
    let first = usize::from(cfg.pin_first);
    let control = StepControl::default();
    let mut it = QuditIterate::new(rho, start)?;
    let mut converged = false;
    for sweep in 1..=cfg.max_sweeps {
        let before = it.objective;
        for l in first..rho.n() {
            it = ascent_step(rho, &it, l, &control)?.0;
        }
        it.sweep = sweep;
        let gain = it.objective - before;
        if gain <= cfg.objective_tol * it.objective.abs().max(f64::MIN_POSITIVE)
            && stationarity(rho, &it.unitaries, first)? <= cfg.stationarity_tol
        {
            converged = true;
            break;
        }
    }
    Ok(RestartOutcome { it, converged })
}

/// Multi-start Riemannian ascent for any `d >= 2`. The first restart starts
/// at the identities, the others at Haar-random unitaries.
pub fn solve(rho: &DensityMatrix, cfg: &SolveConfig) -> Result<MfefEstimate> {
    cfg.validate()?;
    let (d, n) = (rho.d(), rho.n());
    let outcomes = cfg.run_restarts(|r, rng| {
        let start = if r == 0 {
            LocalUnitarySet::identities(d, n)
        } else {
            let mut us = LocalUnitarySet::haar(d, n, rng);
            if cfg.pin_first {
                us.set_unchecked(0, ComplexMatrix::identity(d, d));
            }
            us
        };
        run_restart(rho, cfg, start)
    })?;

    let values: Vec<f64> = outcomes.iter().map(|o| o.it.objective).collect();
    let best = best_index(&values);
    let chosen = &outcomes[best];
    let kkt = kkt_report(rho, &chosen.it.unitaries)?;
    Ok(MfefEstimate {
        solver: SolverKind::Qudit,
        value: chosen.it.objective,
        unitaries: chosen.it.unitaries.clone(),
        certificate: bounds(rho),
        kkt_residual: kkt.gradient_residual,
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
        kkt: Some(kkt),
    })
}
