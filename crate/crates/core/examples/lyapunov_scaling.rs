//! Transfer-matrix localization lengths at the band centre: Cauchy against
//! the closed form, and the delta^-1 versus delta^-2 scaling of the families.
//!
//! cargo run --release --example lyapunov_scaling

use glued_localization::localization::{log_grid, lyapunov_exponent_averaged};
use glued_localization::{scaling_exponent, thouless_length, DisorderFamily, DisorderSpec};

fn main() -> glued_localization::Result<()> {
    let gamma = 1.0;
    let seeds = [1, 2, 3, 4];
    println!("Cauchy, E = 3 gamma");
    for delta in [0.03, 0.1, 0.3] {
        let est = lyapunov_exponent_averaged(
            3.0 * gamma,
            gamma,
            &DisorderSpec::cauchy(delta)?,
            1_000_000,
            &seeds,
        )?;
        let l_tm = 1.0 / est.exponent;
        let l_th = thouless_length(3.0 * gamma, gamma, delta)?
            .finite()
            .unwrap();
        println!(
            "  delta {delta:<5} l_TM {l_tm:>8.3}  closed form {l_th:>8.3}  ({:+.2}%)",
            100.0 * (l_tm / l_th - 1.0)
        );
    }

    let grid = log_grid(0.01, 0.1, 8);
    println!("\nlog-log slope of l(delta) over [0.01, 0.1]");
    for family in DisorderFamily::ALL {
        let r = scaling_exponent(family, gamma, &grid, 2_000_000, &seeds)?;
        println!(
            "  {family:<8} slope {:+.3}  R^2 {:.4}",
            r.slope(),
            r.fit.r_squared
        );
    }
    Ok(())
}
