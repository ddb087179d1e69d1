//! Rotated GHZ frame vectors and the quadratic forms the solvers contract.
//!
//! For qubits a local unitary is written `U = sum_mu x_mu i^{g(mu)} sigma_mu`
//! with real unit `x` (`g(0) = 0`, `g(1..3) = 1`), and the frame vectors carry
//! the phase `i^{g(mu_1)+...+g(mu_n)}`. For qudits `U = sum_mu z_mu sigma_mu`
//! with complex `z` and no phase in the frame.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{MfefError, Result};
use crate::generators::{basis, GeneratorBasis};
use crate::quantum::{apply_local, ghz, rotated_ghz, ComplexMatrix, DensityMatrix, LocalUnitarySet, StateVector, I};

pub const DEFAULT_FRAME_CACHE: usize = 4096;
/// Default party-count budget for a materialized R tensor (`16^n` entries).
pub const DEFAULT_R_MAX_PARTIES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FramePhase {
    /// Pauli frame with the `i^{g(mu)}` phase; `d = 2` only.
    Qubit,
    /// Generator frame without phase.
    Qudit,
}

/// `i^{g(mu)} sigma_mu` for the qubit parametrization.
pub fn qubit_local_operator(mu: usize) -> ComplexMatrix {
    let b = basis(2).expect("d = 2 basis");
    if mu == 0 {
        b.sigma(0).clone()
    } else {
        b.sigma(mu) * I
    }
}

/// `x_0 I + i (x_1 sigma_1 + x_2 sigma_2 + x_3 sigma_3)`.
pub fn qubit_unitary(x: &[f64; 4]) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(2, 2);
    for (mu, &c) in x.iter().enumerate() {
        u += qubit_local_operator(mu) * Complex64::new(c, 0.0);
    }
    u
}

/// Real unit 4-vector of a `2 x 2` unitary after removing its global phase
/// (`det = 1`). The sign of the result is fixed so the first nonzero entry
/// is positive.
pub fn qubit_params(u: &ComplexMatrix) -> [f64; 4] {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let su = u / det.sqrt();
    let b = basis(2).expect("d = 2 basis");
    let mut x = [0.0; 4];
    x[0] = su.trace().re / 2.0;
    for (j, xj) in x.iter_mut().enumerate().skip(1) {
        *xj = crate::generators::trace_product(b.sigma(j), &su).im / 2.0;
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    canonical_sign(&mut x);
    x
}

pub(crate) fn canonical_sign(x: &mut [f64; 4]) {
    if let Some(first) = x.iter().copied().find(|v| *v != 0.0) {
        if first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

/// Frame vectors `|phi_{mu_1...mu_n}>` with a bounded, concurrently readable cache.
#[derive(Debug)]
pub struct GhzFrame {
    d: usize,
    n: usize,
    phase: FramePhase,
    ops: Vec<ComplexMatrix>,
    phi: StateVector,
    cache: RwLock<HashMap<Vec<usize>, Arc<StateVector>>>,
    capacity: usize,
}

impl GhzFrame {
    pub fn qubit(n: usize) -> Result<Self> {
        let ops = (0..4).map(qubit_local_operator).collect();
        Self::with_ops(2, n, FramePhase::Qubit, ops)
    }

    pub fn qudit(d: usize, n: usize) -> Result<Self> {
        let b = basis(d)?;
        Self::with_ops(d, n, FramePhase::Qudit, b.sigmas().to_vec())
    }

    fn with_ops(d: usize, n: usize, phase: FramePhase, ops: Vec<ComplexMatrix>) -> Result<Self> {
        Ok(Self {
            d,
            n,
            phase,
            ops,
            phi: ghz(d, n)?,
            cache: RwLock::new(HashMap::new()),
            capacity: DEFAULT_FRAME_CACHE,
        })
    }

    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity;
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> FramePhase {
        self.phase
    }

    /// Number of local operators per site (`d^2`).
    pub fn local_count(&self) -> usize {
        self.ops.len()
    }

    pub fn cached(&self) -> usize {
        self.cache.read().expect("frame cache poisoned").len()
    }

    /// `(⊗_l O_{mu_l}) |phi>` where `O` is `i^{g} sigma` (qubit) or `sigma` (qudit).
    pub fn frame_vector(&self, mu: &[usize]) -> Result<StateVector> {
        Ok((*self.frame_vector_shared(mu)?).clone())
    }

    pub(crate) fn frame_vector_shared(&self, mu: &[usize]) -> Result<Arc<StateVector>> {
        if mu.len() != self.n {
            return Err(MfefError::IndexOutOfRange(format!(
                "multi-index has {} entries, expected {}",
                mu.len(),
                self.n
            )));
        }
        if let Some(&bad) = mu.iter().find(|&&m| m >= self.ops.len()) {
            return Err(MfefError::IndexOutOfRange(format!(
                "generator index {bad} >= {}",
                self.ops.len()
            )));
        }
        if let Some(v) = self.cache.read().expect("frame cache poisoned").get(mu) {
            return Ok(Arc::clone(v));
        }
        let mut v = self.phi.clone();
        for (site, &m) in mu.iter().enumerate() {
            v = apply_local(&self.ops[m], site, self.d, self.n, &v);
        }
        let v = Arc::new(v);
        let mut cache = self.cache.write().expect("frame cache poisoned");
        if cache.len() < self.capacity {
            cache.insert(mu.to_vec(), Arc::clone(&v));
        }
        Ok(v)
    }
}

/// Decodes a flat base-`m` index into a multi-index, site 0 most significant.
pub(crate) fn multi_index(mut flat: usize, m: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = flat % m;
        flat /= m;
    }
    out
}

/// `R_{nu;mu} = Re <phi_nu|rho|phi_mu>` over the qubit frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RTensor {
    n: usize,
    entries: Vec<f64>,
}

impl RTensor {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry at flattened multi-indices (base 4, site 0 most significant).
    pub fn get_flat(&self, nu: usize, mu: usize) -> f64 {
        self.entries[nu * 4usize.pow(self.n as u32) + mu]
    }

    pub fn get(&self, nu: &[usize], mu: &[usize]) -> f64 {
        let flat = |m: &[usize]| m.iter().fold(0, |acc, &v| acc * 4 + v);
        self.get_flat(flat(nu), flat(mu))
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Full `2n`-fold contraction with the same vectors on both index groups.
    pub fn contract(&self, xs: &[[f64; 4]]) -> Result<f64> {
        if xs.len() != self.n {
            return Err(MfefError::DimensionMismatch {
                expected: self.n,
                got: xs.len(),
            });
        }
        let size = 4usize.pow(self.n as u32);
        let t: Vec<f64> = (0..size)
            .map(|flat| {
                multi_index(flat, 4, self.n)
                    .iter()
                    .zip(xs)
                    .map(|(&m, x)| x[m])
                    .product()
            })
            .collect();
        let mut acc = 0.0;
        for (nu, &tn) in t.iter().enumerate() {
            if tn == 0.0 {
                continue;
            }
            let row = &self.entries[nu * size..(nu + 1) * size];
            acc += tn * row.iter().zip(&t).map(|(r, tm)| r * tm).sum::<f64>();
        }
        Ok(acc)
    }
}

pub fn build_r_tensor(rho: &DensityMatrix) -> Result<RTensor> {
    build_r_tensor_with_budget(rho, DEFAULT_R_MAX_PARTIES)
}

pub fn build_r_tensor_with_budget(rho: &DensityMatrix, max_parties: usize) -> Result<RTensor> {
    if rho.d() != 2 {
        return Err(MfefError::InvalidParameter(format!(
            "R tensor needs qubits, got d = {}",
            rho.d()
        )));
    }
    let n = rho.n();
    if n > max_parties {
        return Err(MfefError::BudgetExceeded(format!(
            "R tensor for n = {n} exceeds budget n <= {max_parties}"
        )));
    }
    let frame = GhzFrame::qubit(n)?.with_capacity(0);
    let size = 4usize.pow(n as u32);
    let vecs: Vec<StateVector> = (0..size)
        .map(|flat| frame.frame_vector(&multi_index(flat, 4, n)))
        .collect::<Result<_>>()?;
    let rho_vecs: Vec<StateVector> = vecs.iter().map(|v| rho.matrix() * v).collect();
    let mut entries = vec![0.0; size * size];
    for nu in 0..size {
        for mu in nu..size {
            let a = vecs[nu].dotc(&rho_vecs[mu]);
            let b = vecs[mu].dotc(&rho_vecs[nu]);
            let r = 0.5 * (a + b).re;
            entries[nu * size + mu] = r;
            entries[mu * size + nu] = r;
        }
    }
    Ok(RTensor { n, entries })
}

/// Single-site quadratic form with every other site held fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum SiteForm {
    /// `M_{nu mu} = Re(w_nu^H rho w_mu)`; `x^T M x` is the objective.
    Qubit { site: usize, m: Matrix4<f64> },
    /// `H_{nu mu} = w_nu^H rho w_mu`; `z^H H z` is the objective.
    Qudit { site: usize, h: ComplexMatrix },
}

impl SiteForm {
    pub fn site(&self) -> usize {
        match self {
            SiteForm::Qubit { site, .. } | SiteForm::Qudit { site, .. } => *site,
        }
    }
}

/// Qubit form for `d = 2`, qudit form otherwise.
pub fn site_form(rho: &DensityMatrix, us: &LocalUnitarySet, l: usize) -> Result<SiteForm> {
    if rho.d() == 2 {
        Ok(SiteForm::Qubit {
            site: l,
            m: qubit_site_form(rho, us, l)?,
        })
    } else {
        Ok(SiteForm::Qudit {
            site: l,
            h: qudit_site_form(rho, us, l)?,
        })
    }
}

fn check_site(rho: &DensityMatrix, us: &LocalUnitarySet, l: usize) -> Result<()> {
    us.check_compatible(rho)?;
    if l >= rho.n() {
        return Err(MfefError::IndexOutOfRange(format!("site {l} >= {}", rho.n())));
    }
    Ok(())
}

/// The slot-`l` replacement vectors `w_mu` for the given local operators.
fn replacement_vectors(ops: &[ComplexMatrix], us: &LocalUnitarySet, l: usize) -> Vec<StateVector> {
    let b = rotated_ghz(us, Some(l));
    ops.iter().map(|op| apply_local(op, l, us.d(), us.n(), &b)).collect()
}

/// 4x4 real symmetric `M^(l)`; the unitary at slot `l` is ignored.
pub fn qubit_site_form(rho: &DensityMatrix, us: &LocalUnitarySet, l: usize) -> Result<Matrix4<f64>> {
    check_site(rho, us, l)?;
    if rho.d() != 2 {
        return Err(MfefError::InvalidParameter(format!(
            "qubit site form needs d = 2, got {}",
            rho.d()
        )));
    }
    let ops: Vec<ComplexMatrix> = (0..4).map(qubit_local_operator).collect();
    let w = replacement_vectors(&ops, us, l);
    let rw: Vec<StateVector> = w.iter().map(|v| rho.matrix() * v).collect();
    let mut m = Matrix4::zeros();
    for nu in 0..4 {
        for mu in nu..4 {
            let val = 0.5 * (w[nu].dotc(&rw[mu]) + w[mu].dotc(&rw[nu])).re;
            m[(nu, mu)] = val;
            m[(mu, nu)] = val;
        }
    }
    Ok(m)
}

/// `d^2 x d^2` Hermitian `H^(l)`; the unitary at slot `l` is ignored.
pub fn qudit_site_form(rho: &DensityMatrix, us: &LocalUnitarySet, l: usize) -> Result<ComplexMatrix> {
    check_site(rho, us, l)?;
    let b: Arc<GeneratorBasis> = basis(rho.d())?;
    let w = replacement_vectors(b.sigmas(), us, l);
    let rw: Vec<StateVector> = w.iter().map(|v| rho.matrix() * v).collect();
    let m = w.len();
    let mut h = ComplexMatrix::zeros(m, m);
    for nu in 0..m {
        for mu in nu..m {
            let val = if nu == mu {
                Complex64::new(w[nu].dotc(&rw[mu]).re, 0.0)
            } else {
                w[nu].dotc(&rw[mu])
            };
            h[(nu, mu)] = val;
            h[(mu, nu)] = val.conj();
        }
    }
    Ok(h)
}

/// `z^H H z`.
pub fn hermitian_form(h: &ComplexMatrix, z: &[Complex64]) -> f64 {
    let zv = StateVector::from_column_slice(z);
    zv.dotc(&(h * &zv)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::decompose_unitary;
    use crate::quantum::{haar_state, objective};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_x(rng: &mut ChaCha8Rng) -> [f64; 4] {
        let mut x = [0.0; 4];
        for v in x.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.map(|v| v / norm)
    }

    fn random_density(d: usize, n: usize, rank: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
        let dim = d.pow(n as u32);
        let mut m = ComplexMatrix::zeros(dim, dim);
        for _ in 0..rank {
            let v = haar_state(dim, rng);
            m += &v * v.adjoint();
        }
        crate::quantum::validate_density(m.unscale(rank as f64), d, n).unwrap()
    }

    #[test]
    fn frame_vector_examples() {
        let f = GhzFrame::qubit(3).unwrap();
        assert_eq!(f.frame_vector(&[0, 0, 0]).unwrap(), ghz(2, 3).unwrap());
        let f2 = GhzFrame::qubit(2).unwrap();
        let v = f2.frame_vector(&[1, 1]).unwrap();
        assert!((v + ghz(2, 2).unwrap()).norm() < 1e-15);
        let q = GhzFrame::qudit(3, 2).unwrap();
        let v = q.frame_vector(&[0, 0]).unwrap();
        assert!((v - ghz(3, 2).unwrap().scale(2.0 / 3.0)).norm() < 1e-15);
        assert!(q.frame_vector(&[9, 0]).is_err());
        assert!(q.frame_vector(&[0]).is_err());
    }

    #[test]
    fn qubit_frame_vectors_are_unit() {
        let f = GhzFrame::qubit(3).unwrap();
        for flat in 0..64 {
            let v = f.frame_vector(&multi_index(flat, 4, 3)).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
        assert_eq!(f.cached(), 64);
        let small = GhzFrame::qubit(2).unwrap().with_capacity(3);
        for flat in 0..16 {
            small.frame_vector(&multi_index(flat, 4, 2)).unwrap();
        }
        assert_eq!(small.cached(), 3);
    }

    #[test]
    fn qubit_parametrization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let x = random_x(&mut rng);
            let u = qubit_unitary(&x);
            assert!(crate::quantum::unitary_deviation(&u) < 1e-14);
            let mut xc = x;
            canonical_sign(&mut xc);
            let back = qubit_params(&u);
            for k in 0..4 {
                assert!((back[k] - xc[k]).abs() < 1e-12);
            }
            // global phase is discarded
            let back2 = qubit_params(&(u * Complex64::from_polar(1.0, 0.7)));
            for k in 0..4 {
                assert!((back2[k] - xc[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn expansion_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 3;
        let f = GhzFrame::qubit(n).unwrap();
        let xs: Vec<[f64; 4]> = (0..n).map(|_| random_x(&mut rng)).collect();
        let us = LocalUnitarySet::new(2, xs.iter().map(qubit_unitary).collect()).unwrap();
        let direct = rotated_ghz(&us, None);
        let mut expanded = StateVector::zeros(8);
        for flat in 0..64 {
            let mu = multi_index(flat, 4, n);
            let coef: f64 = mu.iter().zip(&xs).map(|(&m, x)| x[m]).product();
            expanded += f.frame_vector(&mu).unwrap() * Complex64::new(coef, 0.0);
        }
        assert!((direct - expanded).camax() < 1e-12);
    }

    #[test]
    fn r_tensor_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 2..=4 {
            let rho = random_density(2, n, 3, &mut rng);
            let r = build_r_tensor(&rho).unwrap();
            let size = 4usize.pow(n as u32);
            for nu in 0..size {
                for mu in 0..size {
                    assert_eq!(r.get_flat(nu, mu), r.get_flat(mu, nu));
                    assert!(r.get_flat(nu, mu).abs() <= 1.0);
                }
            }
            let ids = vec![[1.0, 0.0, 0.0, 0.0]; n];
            let phi = ghz(2, n).unwrap();
            assert!((r.contract(&ids).unwrap() - rho.expectation(&phi)).abs() < 1e-14);

            let xs: Vec<[f64; 4]> = (0..n).map(|_| random_x(&mut rng)).collect();
            let us = LocalUnitarySet::new(2, xs.iter().map(qubit_unitary).collect()).unwrap();
            assert!((r.contract(&xs).unwrap() - objective(&rho, &us).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn r_tensor_of_maximally_mixed() {
        let n = 2;
        let rho = DensityMatrix::maximally_mixed(2, n).unwrap();
        let r = build_r_tensor(&rho).unwrap();
        let f = GhzFrame::qubit(n).unwrap();
        for nu in 0..16 {
            for mu in 0..16 {
                let a = f.frame_vector(&multi_index(nu, 4, n)).unwrap();
                let b = f.frame_vector(&multi_index(mu, 4, n)).unwrap();
                assert!((r.get_flat(nu, mu) - 0.25 * a.dotc(&b).re).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn r_tensor_budget_and_dimension() {
        let rho = DensityMatrix::maximally_mixed(2, 3).unwrap();
        assert!(matches!(
            build_r_tensor_with_budget(&rho, 2),
            Err(MfefError::BudgetExceeded(_))
        ));
        let q = DensityMatrix::maximally_mixed(3, 2).unwrap();
        assert!(matches!(build_r_tensor(&q), Err(MfefError::InvalidParameter(_))));
    }

    #[test]
    fn qubit_site_form_examples() {
        let phi = ghz(2, 3).unwrap();
        let rho = DensityMatrix::from_pure(&phi, 2, 3).unwrap();
        let ids = LocalUnitarySet::identities(2, 3);
        let m = qubit_site_form(&rho, &ids, 1).unwrap();
        let eig = m.symmetric_eigen();
        let top = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
        assert!((top - 1.0).abs() < 1e-12);
        assert!((m[(0, 0)] - 1.0).abs() < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let us = LocalUnitarySet::haar(2, 3, &mut rng);
        let m = qubit_site_form(&mixed, &us, 0).unwrap();
        for _ in 0..10 {
            let x = nalgebra::Vector4::from(random_x(&mut rng));
            assert!((x.dot(&(m * x)) - 0.125).abs() < 1e-14);
        }
    }

    #[test]
    fn qubit_site_form_matches_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let rho = random_density(2, 2, 2, &mut rng);
            let us = LocalUnitarySet::haar(2, 2, &mut rng);
            let m = qubit_site_form(&rho, &us, 1).unwrap();
            let x = random_x(&mut rng);
            let with = us.with_site(1, qubit_unitary(&x)).unwrap();
            let xv = nalgebra::Vector4::from(x);
            let val = xv.dot(&(m * xv));
            assert!((val - objective(&rho, &with).unwrap()).abs() < 1e-12);
            assert!((-1e-14..=1.0 + 1e-14).contains(&val));
        }
    }

    #[test]
    fn qudit_site_form_matches_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (d, n) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
            let rho = random_density(d, n, 2, &mut rng);
            let us = LocalUnitarySet::haar(d, n, &mut rng);
            let b = basis(d).unwrap();
            for l in 0..n {
                let h = qudit_site_form(&rho, &us, l).unwrap();
                assert!(crate::quantum::hermitian_deviation(&h) < 1e-12);
                let z = decompose_unitary(us.get(l), &b).unwrap();
                let val = hermitian_form(&h, &z.z);
                assert!((val - objective(&rho, &us).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn site_form_dispatch() {
        let rho = DensityMatrix::maximally_mixed(3, 2).unwrap();
        let ids = LocalUnitarySet::identities(3, 2);
        assert!(matches!(
            site_form(&rho, &ids, 0).unwrap(),
            SiteForm::Qudit { site: 0, .. }
        ));
        let rho = DensityMatrix::maximally_mixed(2, 2).unwrap();
        let ids = LocalUnitarySet::identities(2, 2);
        assert!(matches!(
            site_form(&rho, &ids, 1).unwrap(),
            SiteForm::Qubit { site: 1, .. }
        ));
        assert!(site_form(&rho, &ids, 2).is_err());
    }
}
