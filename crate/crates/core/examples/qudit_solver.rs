//! Riemannian ascent for qutrits, with the full multiplier report.

use mfef::analytic::bounds;
use mfef::qudit::solve;
use mfef::solve::SolveConfig;
use mfef::states::haar_mixed;
use rand::SeedableRng;

fn main() -> mfef::Result<()> {
    let rho = haar_mixed(3, 2, 2, &mut rand_chacha::ChaCha8Rng::seed_from_u64(12))?;
    let cfg = SolveConfig {
        restarts: 16,
        seed: 3,
        ..Default::default()
    };
    let est = solve(&rho, &cfg)?;
    let b = bounds(&rho);
    println!("F = {:.12} in [{:.4}, {:.4}]", est.value, b.lower, b.upper);
    println!(
        "converged: {}, {} of {} restarts agree",
        est.converged, est.restarts_agreeing, cfg.restarts
    );
    if let Some(kkt) = &est.kkt {
        println!("lambda per site: {:.10?}", kkt.lambda);
        println!(
            "gradient residual {:.2e}, constraint residual {:.2e}",
            kkt.gradient_residual, kkt.constraint_residual
        );
    }
    for (l, u) in est.unitaries.unitaries().iter().enumerate() {
        println!("U_{l} =\n{u:.4}");
    }
    Ok(())
}
