//! Random-search baseline against the optimizer.

use mfef::oracle::haar_search;
use mfef::qudit::solve;
use mfef::solve::SolveConfig;
use mfef::states::haar_mixed;
use rand::SeedableRng;

fn main() -> mfef::Result<()> {
    let rho = haar_mixed(2, 3, 1, &mut rand_chacha::ChaCha8Rng::seed_from_u64(4))?;
    let best = solve(&rho, &SolveConfig::default())?.value;
    println!("optimizer: {best:.8}");
    for samples in [100, 1_000, 10_000, 100_000] {
        let o = haar_search(&rho, samples, 0)?;
        println!("{samples:>7} Haar samples: {:.8} (gap {:.2e})", o.value, best - o.value);
    }
    Ok(())
}
