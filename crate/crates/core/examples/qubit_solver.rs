//! Alternating eigenvector sweeps on `(I + c Z^{⊗n})/2^n` and on a random state.

use mfef::analytic::{theorem3_state, theorem3_value};
use mfef::qubit::solve_qubit;
use mfef::solve::SolveConfig;
use mfef::states::haar_mixed;
use rand::SeedableRng;

fn main() -> mfef::Result<()> {
    let cfg = SolveConfig::default();
    for n in 2..=4 {
        for c in [-0.75, 0.0, 0.5, 1.0] {
            let est = solve_qubit(&theorem3_state(c, n)?, &cfg)?;
            println!(
                "n={n} c={c:+.2}  F = {:.10}  expected {:.10}",
                est.value,
                theorem3_value(c, n)?
            );
        }
    }

    let rho = haar_mixed(2, 3, 2, &mut rand_chacha::ChaCha8Rng::seed_from_u64(5))?;
    let est = solve_qubit(&rho, &cfg)?;
    println!(
        "\nrank-2 three-qubit state: F = {:.10}, KKT residual {:.1e}",
        est.value, est.kkt_residual
    );
    for log in est.log.iter().take(5) {
        println!(
            "  restart {:>2}: {:.10} after {} sweeps",
            log.restart, log.objective, log.sweeps
        );
    }
    Ok(())
}
