//! Pure states `sum_i sqrt(p_i)|i...i>`: solver against `(1/d)(sum sqrt p_i)^2`.

use mfef::analytic::{theorem2_state, theorem2_value};
use mfef::qudit::solve;
use mfef::solve::SolveConfig;
use mfef::states::random_probabilities;
use rand::SeedableRng;

fn main() -> mfef::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    for (d, n) in [(2, 2), (2, 3), (3, 2)] {
        for _ in 0..3 {
            let p = random_probabilities(d, &mut rng);
            let exact = theorem2_value(&p, d)?;
            let est = solve(&theorem2_state(&p, d, n)?, &SolveConfig::default())?;
            println!("d={d} n={n} p={p:.3?}  formula {exact:.10}  solver {:.10}", est.value);
        }
    }
    Ok(())
}
