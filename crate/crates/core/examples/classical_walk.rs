//! Classical random walk against the quantum walk on the clean line: the
//! classical walker is pushed back toward the middle and spreads over the
//! whole graph, the quantum one crosses to the right root ballistically.

use glued_localization::dynamics::{hitting_probability, site_state, time_grid};
use glued_localization::{
    eigendecompose, evolve_classical, lumped_classical_chain, reduced_hamiltonian,
};

fn main() -> glued_localization::Result<()> {
    let gamma = 1.0;
    println!(" n  classical P(right root, t=2n)  quantum max P(right root, t<=2n)");
    for n in [4, 8, 12, 16, 20] {
        let chain = lumped_classical_chain(n, gamma)?;
        let mut p0 = vec![0.0; chain.len()];
        p0[0] = 1.0;
        let t = 2.0 * n as f64;
        let classical = evolve_classical(&chain, &p0, &[t])?;
        let p_right = classical[0].probabilities[2 * n];

        let h = reduced_hamiltonian(n, gamma)?;
        let grid = time_grid(t, 0.05)?;
        let hit = hitting_probability(&eigendecompose(&h)?, &site_state(h.len(), 0), 2 * n, &grid)?;
        println!(
            "{n:>2}  {p_right:>29.3e}  {:>10.4} at t = {:.2}",
            hit.probability, hit.time
        );
    }
    Ok(())
}
