//! Named state families used by the CLI, tests and examples.

use rand::Rng;
use rand_distr::Exp1;

use crate::analytic::{theorem2_state, theorem3_state};
use crate::error::{MfefError, Result};
use crate::quantum::{ghz, haar_state, hilbert_dim, validate_density, ComplexMatrix, DensityMatrix};

#[derive(Debug, Clone, PartialEq)]
pub enum StateFamily {
    /// GHZ projector `|phi><phi|`.
    Ghz { d: usize, n: usize },
    /// Pure state `sum_i sqrt(p_i) |i...i>`.
    Theorem2 { p: Vec<f64>, n: usize },
    /// `(I + c sigma_z^{⊗n}) / 2^n`.
    Theorem3 { c: f64, n: usize },
    /// Rank-`rank` mixture of Haar pure states with Dirichlet(1) weights.
    HaarMixed { d: usize, n: usize, rank: usize, seed: u64 },
}

impl StateFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Ghz { .. } => "ghz",
            Self::Theorem2 { .. } => "theorem2",
            Self::Theorem3 { .. } => "theorem3",
            Self::HaarMixed { .. } => "haar-mixed",
        }
    }

    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            Self::Ghz { d, n } => DensityMatrix::from_pure(&ghz(*d, *n)?, *d, *n),
            Self::Theorem2 { p, n } => theorem2_state(p, p.len(), *n),
            Self::Theorem3 { c, n } => theorem3_state(*c, *n),
            Self::HaarMixed { d, n, rank, seed } => {
                use rand::SeedableRng;
                haar_mixed(*d, *n, *rank, &mut rand_chacha::ChaCha8Rng::seed_from_u64(*seed))
            }
        }
    }
}

/// Weights `w ~ Dirichlet(1, ..., 1)` via normalized exponentials.
pub fn dirichlet_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v / total).collect()
}

/// `sum_k w_k |psi_k><psi_k|` with Haar `psi_k` and Dirichlet(1) weights.
pub fn haar_mixed<R: Rng + ?Sized>(d: usize, n: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let dim = hilbert_dim(d, n)?;
    if rank == 0 || rank > dim {
        return Err(MfefError::InvalidParameter(format!("rank {rank} outside 1..={dim}")));
    }
    let weights = dirichlet_weights(rank, rng);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for w in weights {
        let psi = haar_state(dim, rng);
        m += (&psi * psi.adjoint()).scale(w);
    }
    validate_density(m, d, n)
}

/// Probability vector drawn uniformly from the simplex.
pub fn random_probabilities<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    dirichlet_weights(d, rng)
}
