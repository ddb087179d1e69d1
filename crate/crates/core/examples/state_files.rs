//! JSON state and unitary files: write, read back, solve and verify.

use mfef::analytic::theorem3_state;
use mfef::io::{read_state, read_unitaries, write_json, StateFile, UnitariesFile};
use mfef::quantum::objective;
use mfef::qubit::solve_qubit;
use mfef::solve::SolveConfig;

fn main() -> mfef::Result<()> {
    let dir = std::env::temp_dir().join("mfef-example");
    std::fs::create_dir_all(&dir)?;
    let state_path = dir.join("state.json");
    let unitary_path = dir.join("unitaries.json");

    let rho = theorem3_state(-0.4, 3)?;
    write_json(&state_path, &StateFile::from_density(&rho, Some("zzz c=-0.4".into())))?;
    let (file, back, sha) = read_state(&state_path)?;
    println!("read {:?} (d={}, n={}), sha256 {sha}", file.label, file.d, file.n);

    let est = solve_qubit(&back, &SolveConfig::default())?;
    write_json(&unitary_path, &UnitariesFile::from_set(&est.unitaries))?;
    let us = read_unitaries(&unitary_path)?;
    println!(
        "F = {:.12}, re-evaluated from file: {:.12}",
        est.value,
        objective(&back, &us)?
    );
    println!("files in {}", dir.display());
    Ok(())
}
