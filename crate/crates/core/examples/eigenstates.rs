//! Exponential envelopes of the disordered line's eigenstates, compared
//! with the closed-form length at each eigenvalue.
//!
//! cargo run --release --example eigenstates

use glued_localization::stats::median;
use glued_localization::{
    apply_disorder, eigendecompose, eigenstate_envelope, reduced_hamiltonian, thouless_length,
    DisorderSpec,
};

fn main() -> glued_localization::Result<()> {
    let (n, gamma, delta) = (1000, 1.0, 0.3);
    let h = apply_disorder(
        &reduced_hamiltonian(n, gamma)?,
        &DisorderSpec::cauchy(delta)?,
        7,
    )?;
    let spectrum = eigendecompose(&h)?;
    let mut ratios = Vec::new();
    let mut skipped = 0;
    for a in (0..spectrum.dim()).step_by(10) {
        match eigenstate_envelope(&spectrum, a) {
            Ok(fit) => {
                let l = thouless_length(fit.energy, gamma, delta)?.finite().unwrap();
                ratios.push(fit.length / l);
                if a % 200 == 0 {
                    println!(
                        "E = {:>7.3}  centre {:>4}  fitted l {:>7.2}  closed form {:>7.2}",
                        fit.energy, fit.center, fit.length, l
                    );
                }
            }
            Err(_) => skipped += 1,
        }
    }
    println!(
        "median fitted/closed-form ratio {:.3} over {} states ({skipped} unusable)",
        median(&ratios),
        ratios.len()
    );
    Ok(())
}
