//! Closed-form values and certified bounds.
//!
//! * [`bounds`]: `1/d^n <= F <= p_max <= sqrt(tr rho^2) <= 1`.
//! * [`theorem2_value`]: pure states `sum_i sqrt(p_i)|i...i>` have
//!   `F = (1/d)(sum_i sqrt(p_i))^2`, attained at identity unitaries.
//!   Without the `1/d` factor the uniform case would give `F = d > 1`.
//! * [`theorem3_value`]: `(I + c sigma_z^{⊗n})/2^n` has `F = (1 + |c|)/2^n`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MfefError, Result};
use crate::quantum::{hilbert_dim, purity, validate_density, ComplexMatrix, DensityMatrix, StateVector};

/// Tolerance on `sum p_i = 1` for probability-vector parameters.
pub const PROBABILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub lower: f64,
    pub upper_pmax: f64,
    pub upper_purity: f64,
    pub upper: f64,
}

impl BoundCertificate {
    /// Whether `value` lies in `[lower - tol, upper + tol]`.
    pub fn contains(&self, value: f64, tol: f64) -> bool {
        value >= self.lower - tol && value <= self.upper + tol
    }
}

pub fn bounds(rho: &DensityMatrix) -> BoundCertificate {
    let lower = 1.0 / rho.dim() as f64;
    let upper_pmax = *rho.eigenvalues().last().expect("non-empty spectrum");
    let upper_purity = purity(rho).sqrt();
    BoundCertificate {
        lower,
        upper_pmax,
        upper_purity,
        upper: upper_pmax.min(upper_purity).min(1.0),
    }
}

fn check_probabilities(p: &[f64], d: usize) -> Result<()> {
    if p.len() != d {
        return Err(MfefError::InvalidParameter(format!(
            "probability vector has {} entries, expected d = {d}",
            p.len()
        )));
    }
    if p.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(MfefError::InvalidParameter(
            "probabilities must be finite and non-negative".into(),
        ));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(MfefError::InvalidParameter(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    Ok(())
}

/// `(1/d) (sum_i sqrt(p_i))^2`.
pub fn theorem2_value(p: &[f64], d: usize) -> Result<f64> {
    check_probabilities(p, d)?;
    let s: f64 = p.iter().map(|v| v.sqrt()).sum();
    Ok(s * s / d as f64)
}

/// Projector onto `sum_i sqrt(p_i) |i i ... i>`.
pub fn theorem2_state(p: &[f64], d: usize, n: usize) -> Result<DensityMatrix> {
    check_probabilities(p, d)?;
    let dim = hilbert_dim(d, n)?;
    let stride: usize = (0..n).map(|k| d.pow(k as u32)).sum();
    let mut psi = StateVector::zeros(dim);
    for (i, &pi) in p.iter().enumerate() {
        psi[i * stride] = Complex64::new(pi.sqrt(), 0.0);
    }
    DensityMatrix::from_pure(&psi, d, n)
}

fn check_c(c: f64) -> Result<()> {
    if !c.is_finite() || c.abs() > 1.0 {
        return Err(MfefError::InvalidParameter(format!("|c| = {} exceeds 1", c.abs())));
    }
    Ok(())
}

/// `(1 + |c|) / 2^n`.
pub fn theorem3_value(c: f64, n: usize) -> Result<f64> {
    check_c(c)?;
    if n < 2 {
        return Err(MfefError::InvalidParameter(format!("party count n = {n} < 2")));
    }
    Ok((1.0 + c.abs()) / 2f64.powi(n as i32))
}

/// `(I + c sigma_z^{⊗n}) / 2^n`, diagonal in the computational basis.
pub fn theorem3_state(c: f64, n: usize) -> Result<DensityMatrix> {
    check_c(c)?;
    let dim = hilbert_dim(2, n)?;
    let diag: Vec<Complex64> = (0..dim)
        .map(|b| {
            let sign = if b.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new((1.0 + c * sign) / dim as f64, 0.0)
        })
        .collect();
    validate_density(ComplexMatrix::from_diagonal(&DVector::from_vec(diag)), 2, n)
}
