//! Generalized Gell-Mann basis, structure constants and unitary decomposition.

use mfef::generators::{basis, constraint_residuals, decompose_unitary};
use mfef::quantum::haar_unitary;
use rand::SeedableRng;

fn main() -> mfef::Result<()> {
    let b2 = basis(2)?;
    println!(
        "d=2: f(1,2,3) = {}, f(2,1,3) = {}, dsym(1,1,3) = {}",
        b2.f(1, 2, 3),
        b2.f(2, 1, 3),
        b2.dsym(1, 1, 3)
    );

    let b3 = basis(3)?;
    println!(
        "d=3: {} generators, f(1,4,7) = {:.4}, dsym(1,1,8) = {:.4}",
        b3.len(),
        b3.f(1, 4, 7),
        b3.dsym(1, 1, 8)
    );

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let u = haar_unitary(3, &mut rng);
    let mut zc = decompose_unitary(&u, &b3)?;
    let (norm, g) = constraint_residuals(&zc, &b3);
    let worst = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("Haar U: |sum|z|^2 - d/2| = {norm:.1e}, max |g_k| = {worst:.1e}");

    zc.z[2] += num_complex::Complex64::new(1e-3, 0.0);
    let (norm, g) = constraint_residuals(&zc, &b3);
    let worst = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("perturbed by 1e-3: norm residual {norm:.1e}, max |g_k| = {worst:.1e}");
    Ok(())
}
