//! Generalized Gell-Mann basis of the `d x d` matrix space and the
//! coefficient representation `U = sum_mu z_mu sigma_mu` of unitaries.
//!
//! Ordering of the `d^2` generators:
//!
//! * `sigma_0 = sqrt(2/d) I`
//! * symmetric pairs `|j><k| + |k><j|`, `j < k` lexicographic
//! * antisymmetric pairs `-i(|j><k| - |k><j|)`, `j < k` lexicographic
//! * diagonal `sqrt(2/(j(j+1))) (sum_{k<=j} |k><k| - j |j+1><j+1|)`, `j = 1..d-1`
//!
//! For `d = 2` this gives `I, sigma_x, sigma_y, sigma_z`.
//!
//! The structure-constant tensors `f` and `dsym` are indexed over the
//! traceless generators only (`1..d^2`), stored densely as `(d^2-1)^3`
//! reals. Storage grows as `d^6`; `d <= 6` is the intended range.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;

use crate::error::{MfefError, Result};
use crate::quantum::{unitary_deviation, ComplexMatrix, I, ONE, UNITARY_TOL, ZERO};

/// Residual beyond which a coefficient vector is rejected by [`reconstruct`].
pub const RECONSTRUCT_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    d: usize,
    sigmas: Vec<ComplexMatrix>,
    f: Vec<f64>,
    dsym: Vec<f64>,
}

impl GeneratorBasis {
    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of generators, `d^2`.
    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn sigmas(&self) -> &[ComplexMatrix] {
        &self.sigmas
    }

    pub fn sigma(&self, mu: usize) -> &ComplexMatrix {
        &self.sigmas[mu]
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        let m = self.sigmas.len() - 1;
        ((i - 1) * m + (j - 1)) * m + (k - 1)
    }

    /// `f_{ijk}` for `i, j, k` in `1..d^2`.
    pub fn f(&self, i: usize, j: usize, k: usize) -> f64 {
        self.f[self.idx(i, j, k)]
    }

    /// `d_{ijk}` for `i, j, k` in `1..d^2`.
    pub fn dsym(&self, i: usize, j: usize, k: usize) -> f64 {
        self.dsym[self.idx(i, j, k)]
    }

    /// `sum_mu (tr(sigma_mu M)/2) sigma_mu`.
    pub fn coefficients(&self, m: &ComplexMatrix) -> Vec<Complex64> {
        self.sigmas.iter().map(|s| trace_product(s, m) * 0.5).collect()
    }

    pub fn combine(&self, z: &[Complex64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.d, self.d);
        for (s, &c) in self.sigmas.iter().zip(z) {
            out += s * c;
        }
        out
    }
}

/// `tr(A B)` without forming the product.
pub(crate) fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

fn generators(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    out.push(ComplexMatrix::identity(d, d).scale((2.0 / d as f64).sqrt()));
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = ONE;
            m[(k, j)] = ONE;
            out.push(m);
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(j, k)] = -I;
            m[(k, j)] = I;
            out.push(m);
        }
    }
    for j in 1..d {
        let scale = (2.0 / (j * (j + 1)) as f64).sqrt();
        let mut m = ComplexMatrix::zeros(d, d);
        for k in 0..j {
            m[(k, k)] = Complex64::new(scale, 0.0);
        }
        m[(j, j)] = Complex64::new(-(j as f64) * scale, 0.0);
        out.push(m);
    }
    out
}

/// Builds the basis and its structure constants
/// `f_{ijk} = tr([s_i, s_j] s_k)/(4i)`, `d_{ijk} = tr({s_i, s_j} s_k)/4`.
pub fn build_basis(d: usize) -> Result<GeneratorBasis> {
    if d < 2 {
        return Err(MfefError::InvalidParameter(format!("local dimension d = {d} < 2")));
    }
    let sigmas = generators(d);
    let m = d * d - 1;
    let mut f = vec![0.0; m * m * m];
    let mut dsym = vec![0.0; m * m * m];
    for i in 1..=m {
        for j in 1..=m {
            let prod_ij = &sigmas[i] * &sigmas[j];
            let prod_ji = &sigmas[j] * &sigmas[i];
            let comm = &prod_ij - &prod_ji;
            let anti = &prod_ij + &prod_ji;
            for (k, sk) in sigmas.iter().enumerate().skip(1) {
                let at = ((i - 1) * m + (j - 1)) * m + (k - 1);
                f[at] = (trace_product(&comm, sk) / (I * 4.0)).re;
                dsym[at] = trace_product(&anti, sk).re / 4.0;
            }
        }
    }
    Ok(GeneratorBasis { d, sigmas, f, dsym })
}

static BASIS_CACHE: OnceLock<RwLock<HashMap<usize, Arc<GeneratorBasis>>>> = OnceLock::new();

/// Shared, lazily built basis for dimension `d`.
pub fn basis(d: usize) -> Result<Arc<GeneratorBasis>> {
    let cache = BASIS_CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(b) = cache.read().expect("basis cache poisoned").get(&d) {
        return Ok(Arc::clone(b));
    }
    let built = Arc::new(build_basis(d)?);
    let mut w = cache.write().expect("basis cache poisoned");
    Ok(Arc::clone(w.entry(d).or_insert(built)))
}

/// Coefficients `z` of a `d x d` matrix in the generator basis.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryCoefficients {
    pub d: usize,
    pub z: Vec<Complex64>,
}

impl UnitaryCoefficients {
    pub fn x(&self) -> Vec<f64> {
        self.z.iter().map(|c| c.re).collect()
    }

    pub fn y(&self) -> Vec<f64> {
        self.z.iter().map(|c| c.im).collect()
    }
}

/// `z_mu = tr(sigma_mu U)/2`; rejects non-unitary input.
pub fn decompose_unitary(u: &ComplexMatrix, basis: &GeneratorBasis) -> Result<UnitaryCoefficients> {
    if u.nrows() != basis.d() || u.ncols() != basis.d() {
        return Err(MfefError::DimensionMismatch {
            expected: basis.d(),
            got: u.nrows(),
        });
    }
    let deviation = unitary_deviation(u);
    if deviation > UNITARY_TOL {
        return Err(MfefError::NotUnitary { deviation });
    }
    Ok(UnitaryCoefficients {
        d: basis.d(),
        z: basis.coefficients(u),
    })
}

/// `U = sum_mu z_mu sigma_mu`, after checking the unitarity constraints.
pub fn reconstruct(zc: &UnitaryCoefficients, basis: &GeneratorBasis) -> Result<ComplexMatrix> {
    if zc.z.len() != basis.len() {
        return Err(MfefError::DimensionMismatch {
            expected: basis.len(),
            got: zc.z.len(),
        });
    }
    let (norm_res, ks) = constraint_residuals(zc, basis);
    let residual = ks.iter().map(|c| c.norm()).fold(norm_res.abs(), f64::max);
    if residual > RECONSTRUCT_TOL {
        return Err(MfefError::ConstraintViolation { residual });
    }
    Ok(basis.combine(&zc.z))
}

/// Left-hand sides of the unitarity constraints in real form, at
/// `(x, y) = (Re z, Im z)`:
///
/// * norm: `sum_mu (x_mu^2 + y_mu^2) - d/2`
/// * for each `k >= 1`: `2 sqrt(2/d)(x_0 x_k + y_0 y_k)
///   + sum_{ij} [(x_i x_j + y_i y_j) d_{ijk} + 2 x_i y_j f_{ijk}]`
///
/// The second list is returned as complex numbers whose imaginary part is
/// the imaginary part of the complex form `sqrt(2/d)(z_0^* z_k + z_0 z_k^*)
/// + sum z_i z_j^* (d_{ijk} + i f_{ijk})`, which vanishes identically.
pub fn constraint_residuals(zc: &UnitaryCoefficients, basis: &GeneratorBasis) -> (f64, Vec<Complex64>) {
    let d = basis.d();
    let m = d * d - 1;
    let z = &zc.z;
    let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>() - d as f64 / 2.0;
    let s = (2.0 / d as f64).sqrt();
    let mut out = Vec::with_capacity(m);
    for k in 1..=m {
        let mut acc = (z[0].conj() * z[k] + z[0] * z[k].conj()) * s;
        for i in 1..=m {
            for j in 1..=m {
                let (dd, ff) = (basis.dsym(i, j, k), basis.f(i, j, k));
                if dd == 0.0 && ff == 0.0 {
                    continue;
                }
                acc += z[i] * z[j].conj() * Complex64::new(dd, ff);
            }
        }
        out.push(acc);
    }
    (norm, out)
}
