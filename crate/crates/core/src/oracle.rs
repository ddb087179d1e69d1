//! Baseline lower bound on F: best objective over Haar-random local unitaries.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{MfefError, Result};
use crate::quantum::{objective, DensityMatrix, LocalUnitarySet};

/// Samples per independently seeded chunk; results do not depend on thread count.
pub const ORACLE_CHUNK: usize = 1024;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: f64,
    pub unitaries: LocalUnitarySet,
    pub samples: usize,
}

/// Draws `samples` Haar-random local unitary sets and keeps the best.
/// Chunk `c` uses stream `c` of a ChaCha8 generator seeded with `seed`.
pub fn haar_search(rho: &DensityMatrix, samples: usize, seed: u64) -> Result<OracleResult> {
    if samples == 0 {
        return Err(MfefError::InvalidParameter("samples must be positive".into()));
    }
    let (d, n) = (rho.d(), rho.n());
    let chunks = samples.div_ceil(ORACLE_CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = ORACLE_CHUNK.min(samples - c * ORACLE_CHUNK);
            let mut best: Option<(f64, LocalUnitarySet)> = None;
            for _ in 0..count {
                let us = LocalUnitarySet::haar(d, n, &mut rng);
                let v = objective(rho, &us)?;
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, us));
                }
            }
            Ok(best.expect("chunk is non-empty"))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one chunk");
    Ok(OracleResult {
        value: best.0,
        unitaries: best.1,
        samples,
    })
}
