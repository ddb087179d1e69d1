//! Stationarity residuals away from and at an optimum.

use mfef::frame::qubit_params;
use mfef::quantum::{objective, LocalUnitarySet};
use mfef::qubit::{kkt_residual_qubit, qubit_multipliers, solve_qubit};
use mfef::qudit::kkt_report;
use mfef::solve::SolveConfig;
use mfef::states::haar_mixed;
use rand::SeedableRng;

fn main() -> mfef::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let rho = haar_mixed(2, 2, 2, &mut rng)?;

    let random = LocalUnitarySet::haar(2, 2, &mut rng);
    let r = kkt_report(&rho, &random)?;
    println!(
        "random unitaries: objective {:.6}, residual {:.3e}",
        objective(&rho, &random)?,
        r.gradient_residual
    );

    let est = solve_qubit(&rho, &SolveConfig::default())?;
    let x: Vec<[f64; 4]> = est.unitaries.unitaries().iter().map(qubit_params).collect();
    let r = kkt_report(&rho, &est.unitaries)?;
    println!("solver endpoint:  objective {:.12}", est.value);
    println!(
        "  qubit residual {:.2e}, multipliers {:.12?}",
        kkt_residual_qubit(&rho, &x)?,
        qubit_multipliers(&rho, &x)?
    );
    println!("  qudit residual {:.2e}, lambda {:.12?}", r.gradient_residual, r.lambda);
    Ok(())
}
