//! Probability of ever reaching the right root within T = 4n, clean and
//! disordered: disorder makes it exponentially small in n.

use glued_localization::dynamics::{site_state, time_grid};
use glued_localization::stats::{linear_fit, median};
use glued_localization::{
    apply_disorder, eigendecompose, hitting_probability, reduced_hamiltonian, DisorderSpec,
};

fn main() -> glued_localization::Result<()> {
    let (gamma, delta) = (1.0, 0.2);
    let spec = DisorderSpec::cauchy(delta)?;
    let depths = [20usize, 30, 40, 50, 60];
    let mut medians = Vec::new();
    println!(" n   clean    median (delta = {delta}, 10 seeds)");
    for n in depths {
        let clean = reduced_hamiltonian(n, gamma)?;
        let start = site_state(clean.len(), 0);
        let grid = time_grid(4.0 * n as f64, 0.1)?;
        let p_clean =
            hitting_probability(&eigendecompose(&clean)?, &start, 2 * n, &grid)?.probability;
        let mut hits = Vec::new();
        for seed in 0..10 {
            let h = apply_disorder(&clean, &spec, seed)?;
            hits.push(hitting_probability(&eigendecompose(&h)?, &start, 2 * n, &grid)?.probability);
        }
        medians.push(median(&hits));
        println!("{n:>2}  {p_clean:.4}  {:.3e}", medians.last().unwrap());
    }
    let x: Vec<f64> = depths.iter().map(|&n| n as f64).collect();
    let y: Vec<f64> = medians.iter().map(|m| m.ln()).collect();
    let fit = linear_fit(&x, &y);
    println!(
        "ln(median) ~ {:.3} n, R^2 = {:.3}",
        fit.slope, fit.r_squared
    );
    Ok(())
}
