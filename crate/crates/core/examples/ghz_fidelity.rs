//! F of a locally rotated GHZ state is 1, whichever solver is used.

use mfef::quantum::{ghz, DensityMatrix, LocalUnitarySet};
use mfef::qubit::solve_qubit;
use mfef::qudit::solve;
use mfef::solve::SolveConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mfef::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = SolveConfig::default();
    for (d, n) in [(2, 3), (3, 2), (4, 2)] {
        let ghz_rho = DensityMatrix::from_pure(&ghz(d, n)?, d, n)?;
        let rho = ghz_rho.conjugate_local(&LocalUnitarySet::haar(d, n, &mut rng))?;
        let est = solve(&rho, &cfg)?;
        print!("d={d} n={n}  qudit F = {:.12}", est.value);
        if d == 2 {
            print!("  qubit F = {:.12}", solve_qubit(&rho, &cfg)?.value);
        }
        println!("  ({} of {} restarts agree)", est.restarts_agreeing, cfg.restarts);
    }
    Ok(())
}
