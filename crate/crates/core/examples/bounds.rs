//! Closed-form certificate `1/d^n <= F <= min(p_max, sqrt(tr rho^2), 1)`.

use mfef::analytic::bounds;
use mfef::quantum::{ghz, DensityMatrix};
use mfef::states::haar_mixed;
use rand::SeedableRng;

fn main() -> mfef::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let cases = [
        ("GHZ projector, d=3 n=2", DensityMatrix::from_pure(&ghz(3, 2)?, 3, 2)?),
        ("I/8", DensityMatrix::maximally_mixed(2, 3)?),
        ("rank-3 Haar mixture, d=2 n=2", haar_mixed(2, 2, 3, &mut rng)?),
    ];
    for (name, rho) in cases {
        let b = bounds(&rho);
        println!(
            "{name:<30} lower {:.4}  p_max {:.4}  sqrt(purity) {:.4}  upper {:.4}",
            b.lower, b.upper_pmax, b.upper_purity, b.upper
        );
    }
    Ok(())
}
