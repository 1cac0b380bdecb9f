//! Localization lengths from eigenstates and transfer matrices against the
//! closed form.

use glued_localization::localization::{log_grid, lyapunov_exponent_averaged};
use glued_localization::stats::median;
use glued_localization::*;

#[test]
fn eigenstate_envelopes_follow_closed_form_in_the_band() {
    let (gamma, delta) = (1.0, 0.3);
    let mut ratios = Vec::new();
    for seed in 0..3 {
        let h = apply_disorder(
            &reduced_hamiltonian(1000, gamma).unwrap(),
            &DisorderSpec::cauchy(delta).unwrap(),
            seed,
        )
        .unwrap();
        let spectrum = eigendecompose(&h).unwrap();
        for a in (0..spectrum.dim()).step_by(7) {
            let e = spectrum.eigenvalues()[a];
            // Band interior only; edges have short, noisy lengths.
            if (e - 3.0 * gamma).abs() > 2.0 {
                continue;
            }
            if let Ok(fit) = eigenstate_envelope(&spectrum, a) {
                let l = thouless_length(e, gamma, delta).unwrap().finite().unwrap();
                ratios.push(fit.length / l);
            }
        }
    }
    assert!(ratios.len() > 300);
    let m = median(&ratios);
    assert!((m - 1.0).abs() < 0.2, "median ratio {m}");
}

#[test]
fn clean_states_have_no_envelope() {
    let h = reduced_hamiltonian(200, 1.0).unwrap();
    let spectrum = eigendecompose(&h).unwrap();
    let err = eigenstate_envelope(&spectrum, 200).unwrap_err();
    assert_eq!(err.kind(), "unreliable_envelope");
}

#[test]
fn transfer_matrix_matches_closed_form_off_centre() {
    let (gamma, delta) = (1.0, 0.2);
    let spec = DisorderSpec::cauchy(delta).unwrap();
    for e in [1.5, 4.0, 5.5] {
        let est = lyapunov_exponent_averaged(e, gamma, &spec, 400_000, &[1, 2, 3]).unwrap();
        let l = thouless_length(e, gamma, delta).unwrap().finite().unwrap();
        let l_tm = 1.0 / est.exponent;
        assert!((l_tm / l - 1.0).abs() < 0.03, "E = {e}: {l_tm} vs {l}");
    }
}

#[test]
fn outside_band_decay_without_disorder_is_evanescent() {
    // With no disorder, E outside [3 - sqrt 8, 3 + sqrt 8] decays at acosh(|E - 3| / sqrt 8).
    let spec = DisorderSpec::cauchy(0.0).unwrap();
    let e = 7.0;
    let est = lyapunov_exponent(e, 1.0, &spec, 20_000, 0).unwrap();
    let exact = ((e - 3.0) / 8f64.sqrt()).acosh();
    assert!((est.exponent - exact).abs() < 1e-3 * exact);
}

#[test]
fn scaling_rejects_short_runs_and_bad_grids() {
    let grid = log_grid(0.01, 0.1, 4);
    assert!(scaling_exponent(DisorderFamily::Cauchy, 1.0, &grid, 1000, &[1]).is_err());
    assert!(scaling_exponent(DisorderFamily::Cauchy, 1.0, &[0.05, 0.1], 1_000_000, &[1]).is_err());
    assert!(scaling_exponent(DisorderFamily::Cauchy, 1.0, &[0.1, 0.01], 1_000_000, &[1]).is_err());
}
