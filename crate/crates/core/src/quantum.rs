//! Dense complex matrices, validated density matrices, local unitaries and
//! the GHZ overlap objective.
//!
//! Tensor ordering: party 1 (site index 0) is the most significant factor, so
//! the computational basis index of `|i_1 i_2 ... i_n>` is
//! `i_1 d^{n-1} + ... + i_n`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{MfefError, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type StateVector = DVector<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_FLOOR: f64 = -1e-9;
pub const UNITARY_TOL: f64 = 1e-9;
/// Largest supported Hilbert-space dimension `d^n`.
pub const MAX_DIM: usize = 4096;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// `d^n`, or an error when it exceeds [`MAX_DIM`].
pub fn hilbert_dim(d: usize, n: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = dim
            .checked_mul(d)
            .filter(|&v| v <= MAX_DIM)
            .ok_or_else(|| MfefError::BudgetExceeded(format!("d^n = {d}^{n} exceeds {MAX_DIM}")))?;
    }
    Ok(dim)
}

fn check_local(d: usize, n: usize) -> Result<()> {
    if d < 2 {
        return Err(MfefError::InvalidParameter(format!("local dimension d = {d} < 2")));
    }
    if n < 2 {
        return Err(MfefError::InvalidParameter(format!("party count n = {n} < 2")));
    }
    Ok(())
}

/// Max entrywise deviation `|A - A^H|`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Max entrywise deviation `|U U^H - I|`.
pub fn unitary_deviation(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let p = u * u.adjoint();
    let mut dev: f64 = 0.0;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let target = if i == j { ONE } else { ZERO };
            dev = dev.max((p[(i, j)] - target).norm());
        }
    }
    dev
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// A Hermitian, positive-semidefinite, trace-one matrix on `(C^d)^{⊗n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    d: usize,
    n: usize,
    mat: ComplexMatrix,
}

/// Validates `raw` as a density matrix on `n` parties of dimension `d`.
///
/// The Hermitian part `(raw + raw^H)/2` is what gets stored; the raw
/// asymmetry must still be within [`HERMITIAN_TOL`].
pub fn validate_density(raw: ComplexMatrix, d: usize, n: usize) -> Result<DensityMatrix> {
    check_local(d, n)?;
    let dim = hilbert_dim(d, n)?;
    if raw.nrows() != dim || raw.ncols() != dim {
        return Err(MfefError::DimensionMismatch {
            expected: dim,
            got: if raw.nrows() != dim { raw.nrows() } else { raw.ncols() },
        });
    }
    if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(MfefError::NonFinite);
    }
    let deviation = hermitian_deviation(&raw);
    if deviation > HERMITIAN_TOL {
        return Err(MfefError::NotHermitian { deviation });
    }
    let mat = (&raw + raw.adjoint()).scale(0.5);
    let trace = mat.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(MfefError::TraceDeviation { trace });
    }
    let min_eig = hermitian_eigenvalues(&mat)[0];
    if min_eig < PSD_FLOOR {
        return Err(MfefError::NegativeEigenvalue { eigenvalue: min_eig });
    }
    Ok(DensityMatrix { d, n, mat })
}

impl DensityMatrix {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Full Hilbert-space dimension `d^n`.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    /// `|psi><psi|` for a (not necessarily normalized) vector; normalizes first.
    pub fn from_pure(psi: &StateVector, d: usize, n: usize) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(MfefError::InvalidParameter("zero or non-finite state vector".into()));
        }
        let v = psi.unscale(norm);
        validate_density(&v * v.adjoint(), d, n)
    }

    /// Maximally mixed state `I / d^n`.
    pub fn maximally_mixed(d: usize, n: usize) -> Result<Self> {
        check_local(d, n)?;
        let dim = hilbert_dim(d, n)?;
        validate_density(ComplexMatrix::identity(dim, dim).unscale(dim as f64), d, n)
    }

    /// `(⊗V_l) rho (⊗V_l)^H`.
    pub fn conjugate_local(&self, vs: &LocalUnitarySet) -> Result<Self> {
        vs.check_compatible(self)?;
        let big = kron_all(vs.unitaries())?;
        let mat = &big * &self.mat * big.adjoint();
        validate_density(mat, self.d, self.n)
    }

    /// `<v|rho|v>`, real part.
    pub fn expectation(&self, v: &StateVector) -> f64 {
        v.dotc(&(&self.mat * v)).re
    }
}

/// `tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    rho.mat.iter().map(|z| z.norm_sqr()).sum()
}

/// `n` unitaries of size `d x d`, one per party.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitarySet {
    d: usize,
    n: usize,
    unitaries: Vec<ComplexMatrix>,
}

impl LocalUnitarySet {
    pub fn new(d: usize, unitaries: Vec<ComplexMatrix>) -> Result<Self> {
        if unitaries.is_empty() {
            return Err(MfefError::Empty);
        }
        for u in &unitaries {
            if u.nrows() != d || u.ncols() != d {
                return Err(MfefError::DimensionMismatch {
                    expected: d,
                    got: u.nrows(),
                });
            }
            let deviation = unitary_deviation(u);
            if deviation > UNITARY_TOL {
                return Err(MfefError::NotUnitary { deviation });
            }
        }
        Ok(Self {
            d,
            n: unitaries.len(),
            unitaries,
        })
    }

    pub fn identities(d: usize, n: usize) -> Self {
        Self {
            d,
            n,
            unitaries: vec![ComplexMatrix::identity(d, d); n],
        }
    }

    pub fn haar<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Self {
        Self {
            d,
            n,
            unitaries: (0..n).map(|_| haar_unitary(d, rng)).collect(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn get(&self, site: usize) -> &ComplexMatrix {
        &self.unitaries[site]
    }

    /// Replaces the unitary at `site`; the caller guarantees unitarity.
    pub(crate) fn set_unchecked(&mut self, site: usize, u: ComplexMatrix) {
        self.unitaries[site] = u;
    }

    pub fn with_site(&self, site: usize, u: ComplexMatrix) -> Result<Self> {
        if site >= self.n {
            return Err(MfefError::IndexOutOfRange(format!("site {site} >= {}", self.n)));
        }
        let mut out = self.clone();
        out.unitaries[site] = u;
        LocalUnitarySet::new(self.d, out.unitaries)
    }

    pub(crate) fn check_compatible(&self, rho: &DensityMatrix) -> Result<()> {
        if self.d != rho.d() {
            return Err(MfefError::DimensionMismatch {
                expected: rho.d(),
                got: self.d,
            });
        }
        if self.n != rho.n() {
            return Err(MfefError::DimensionMismatch {
                expected: rho.n(),
                got: self.n,
            });
        }
        Ok(())
    }
}

/// Kronecker product of the list, in order.
pub fn kron_all(ms: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = ms.split_first().ok_or(MfefError::Empty)?;
    Ok(rest.iter().fold(first.clone(), |acc, m| acc.kronecker(m)))
}

/// `(1/sqrt d) sum_i |i i ... i>`.
pub fn ghz(d: usize, n: usize) -> Result<StateVector> {
    check_local(d, n)?;
    let dim = hilbert_dim(d, n)?;
    let stride: usize = (0..n).map(|k| d.pow(k as u32)).sum();
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = StateVector::zeros(dim);
    for i in 0..d {
        v[i * stride] = amp;
    }
    Ok(v)
}

/// Applies the `d x d` operator `op` to tensor factor `site` of `v`.
pub fn apply_local(op: &ComplexMatrix, site: usize, d: usize, n: usize, v: &StateVector) -> StateVector {
    debug_assert!(site < n && op.nrows() == d && op.ncols() == d);
    let right = d.pow((n - 1 - site) as u32);
    let left = v.len() / (d * right);
    let mut out = StateVector::zeros(v.len());
    for a in 0..left {
        let base = a * d * right;
        for i in 0..d {
            for j in 0..d {
                let c = op[(i, j)];
                if c == ZERO {
                    continue;
                }
                let (oi, oj) = (base + i * right, base + j * right);
                for r in 0..right {
                    out[oi + r] += c * v[oj + r];
                }
            }
        }
    }
    out
}

/// `(⊗ U_l)|phi>` with the slot `skip` left as identity when given.
pub fn rotated_ghz(us: &LocalUnitarySet, skip: Option<usize>) -> StateVector {
    let mut v = ghz(us.d(), us.n()).expect("LocalUnitarySet dimensions are validated");
    for (site, u) in us.unitaries().iter().enumerate() {
        if Some(site) != skip {
            v = apply_local(u, site, us.d(), us.n(), &v);
        }
    }
    v
}

/// `<phi| (⊗U_l)^H rho (⊗U_l) |phi>` for fixed unitaries.
pub fn objective(rho: &DensityMatrix, us: &LocalUnitarySet) -> Result<f64> {
    us.check_compatible(rho)?;
    let v = rotated_ghz(us, None);
    let val = v.dotc(&(rho.matrix() * &v));
    if val.im.abs() > 1e-10 {
        return Err(MfefError::NotHermitian {
            deviation: val.im.abs(),
        });
    }
    Ok(val.re)
}

/// Haar-distributed `d x d` unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random unit vector of dimension `dim`.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let v = StateVector::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let norm = v.norm();
    v.unscale(norm)
}

/// Nearest unitary in Frobenius norm (unitary polar factor).
pub fn polar_unitary(a: &ComplexMatrix) -> ComplexMatrix {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^H");
    u * v_t
}

pub fn pauli(k: usize) -> ComplexMatrix {
    match k {
        0 => ComplexMatrix::identity(2, 2),
        1 => ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        2 => ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        3 => ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => panic!("pauli index {k} out of range"),
    }
}
