//! Closed-form localization length for Cauchy disorder across the band.

use glued_localization::localization::max_length_asymptote;
use glued_localization::{max_localization_length, thouless_length, Length};

fn show(l: Length) -> String {
    match l {
        Length::Finite(l) => format!("{l:.3}"),
        Length::Infinite => "inf".into(),
    }
}

fn main() -> glued_localization::Result<()> {
    let gamma = 1.0;
    for delta in [0.03, 0.06, 0.1] {
        let l_max = max_localization_length(gamma, delta)?;
        println!(
            "delta = {delta}: l_max = {}, sqrt(8) gamma / delta = {:.3}",
            show(l_max),
            max_length_asymptote(gamma, delta)
        );
        for e in [0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 5.5, 6.0] {
            println!(
                "  E = {e:>3}: l = {}",
                show(thouless_length(e, gamma, delta)?)
            );
        }
    }
    Ok(())
}
