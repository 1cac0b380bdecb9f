//! Acceptance criteria, one PASS/FAIL line each.
//!
//! cargo test --release --test acceptance -- --nocapture

use std::f64::consts::SQRT_2;
use std::path::Path;

use glued_localization::dynamics::{energy, site_state, Propagator};
use glued_localization::experiment::{
    crosscheck_report, run, Experiment, ExperimentConfig, Fig4Summary, HittingSummary,
    ScalingSummary,
};
use glued_localization::line::{compress_hamiltonian, verify_subspace_closure};
use glued_localization::localization::{log_grid, lyapunov_exponent_averaged};
use glued_localization::*;
use tempfile::tempdir;

type Check<'a> = Box<dyn Fn() -> Result<Outcome> + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> T {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn subspace_reduction() -> Result<Outcome> {
    let (mut entry, mut closure) = (0.0_f64, 0.0_f64);
    for n in 1..=8 {
        let g = GluedTreeGraph::build(n)?;
        let basis = column_basis(&g);
        let compressed = compress_hamiltonian(&g, &basis, 1.0)?;
        entry = entry.max(
            (compressed - reduced_hamiltonian(n, 1.0)?.to_dense())
                .abs()
                .max(),
        );
        closure = closure.max(verify_subspace_closure(&g, &basis, 1.0)?);
    }
    outcome(
        entry <= 1e-12 && closure <= 1e-10,
        format!("n = 1..8: max entry error {entry:.1e} (<= 1e-12), closure residual {closure:.1e} (<= 1e-10)"),
    )
}

fn dynamics_oracle() -> Result<Outcome> {
    let mut config = ExperimentConfig::new(Experiment::Crosscheck);
    config.n = vec![6];
    config.times = Some(vec![1.0, 3.0, 10.0]);
    let r = crosscheck_report(&config)?;
    outcome(
        r.quantum_deviation <= 1e-8 && r.classical_deviation <= 1e-8,
        format!(
            "n = 6, t in {{1, 3, 10}}: quantum {:.1e}, classical {:.1e} (<= 1e-8)",
            r.quantum_deviation, r.classical_deviation
        ),
    )
}

fn ballistic(dir: &Path) -> Result<Outcome> {
    let mut config = ExperimentConfig::new(Experiment::Fig4);
    config.deltas = vec![0.0];
    config.times = Some((2..=12).map(|k| 25.0 * k as f64).collect());
    config.out = dir.join("ballistic");
    run(&config)?;
    let summary: Fig4Summary = read_json(&config.out.join("fig4_summary.json"));
    let fit = summary.series[0].extent_fit.unwrap();
    let v = 2.0 * SQRT_2;
    outcome(
        (fit.slope / v - 1.0).abs() <= 0.05,
        format!(
            "n = 1000, 99% extent over t in [50, 300]: slope {:.4} vs 2 sqrt 2 = {v:.4} (+-5%), R^2 {:.6}",
            fit.slope, fit.r_squared
        ),
    )
}

fn saturation(dir: &Path) -> Result<Outcome> {
    let mut config = ExperimentConfig::new(Experiment::Fig4);
    config.deltas = vec![0.03, 0.06];
    config.times = Some(vec![350.0, 700.0]);
    config.seeds = 10;
    config.out = dir.join("saturation");
    run(&config)?;
    let s: Fig4Summary = read_json(&config.out.join("fig4_summary.json"));
    let (weak, strong) = (&s.series[0], &s.series[1]);
    let (e350, e700) = (strong.median_extent[0], strong.median_extent[1]);
    let growth = e700 / e350 - 1.0;
    let l_max = strong.max_length.finite().unwrap();
    let ratio = e700 / l_max;
    let stopped = growth < 0.10;
    let scale = (0.5..=2.0).contains(&ratio);
    let ordered = weak.median_extent[1] > e700;
    outcome(
        stopped && scale && ordered,
        format!(
            "delta = 0.06, 10 seeds: extent {e350} -> {e700} ({:+.1}%, < 10%: {}); \
             extent / l_max = {e700} / {l_max:.2} = {ratio:.2} (within 2x: {}); \
             delta = 0.03 extent {} > {e700}: {}",
            100.0 * growth,
            yes(stopped),
            yes(scale),
            weak.median_extent[1],
            yes(ordered),
        ),
    )
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

fn lyapunov_vs_closed_form() -> Result<Outcome> {
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for delta in [0.03, 0.1, 0.3] {
        let spec = DisorderSpec::cauchy(delta)?;
        let est = lyapunov_exponent_averaged(3.0, 1.0, &spec, 1_000_000, &[1, 2, 3, 4])?;
        let l_th = thouless_length(3.0, 1.0, delta)?.finite().unwrap();
        let rel = (1.0 / est.exponent - l_th).abs() / l_th;
        worst = worst.max(rel);
        parts.push(format!("delta {delta}: {:.2}%", 100.0 * rel));
    }
    outcome(
        worst <= 0.03,
        format!(
            "E = 3, 10^6 steps x 4 realizations: {} (<= 3%)",
            parts.join(", ")
        ),
    )
}

fn scaling(dir: &Path) -> Result<Outcome> {
    let mut config = ExperimentConfig::new(Experiment::Scaling);
    config.deltas = log_grid(0.01, 0.1, 8);
    config.out = dir.join("scaling");
    run(&config)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for (family, target, tol) in [
        ("cauchy", -1.0, 0.1),
        ("gaussian", -2.0, 0.2),
        ("uniform", -2.0, 0.2),
    ] {
        let s: ScalingSummary = read_json(&config.out.join(format!("scaling_{family}.json")));
        let ok = (s.slope - target).abs() <= tol && s.r_squared >= 0.98;
        pass &= ok;
        parts.push(format!("{family} {:.3} (R^2 {:.4})", s.slope, s.r_squared));
    }
    outcome(
        pass,
        format!("slopes over delta in [0.01, 0.1]: {}", parts.join(", ")),
    )
}

fn hitting(dir: &Path) -> Result<Outcome> {
    let mut config = ExperimentConfig::new(Experiment::Hitting);
    config.n = vec![20, 30, 40, 50, 60];
    config.deltas = vec![0.2];
    config.seeds = 10;
    config.out = dir.join("hitting");
    run(&config)?;
    let s: HittingSummary = read_json(&config.out.join("hitting_summary.json"));
    let fit = s.fit.unwrap();
    outcome(
        fit.slope < 0.0 && fit.r_squared >= 0.9 && s.suppression_ratio <= 0.1,
        format!(
            "delta = 0.2, 10 seeds: slope {:.3}/site, R^2 {:.3}, P(60)/P(20) = {:.1e} (<= 0.1)",
            fit.slope, fit.r_squared, s.suppression_ratio
        ),
    )
}

fn invariants() -> Result<Outcome> {
    let mut unitarity = 0.0_f64;
    let mut energy_drift = 0.0_f64;
    let mut reversal = 0.0_f64;
    for (seed, delta) in [(1u64, 0.0), (2, 0.06), (3, 0.5), (4, 3.0)] {
        let h = apply_disorder(
            &reduced_hamiltonian(200, 1.0)?,
            &DisorderSpec::cauchy(delta)?,
            seed,
        )?;
        let spectrum = eigendecompose(&h)?;
        let psi0 = site_state(h.len(), 0);
        let prop = Propagator::new(&spectrum, &psi0)?;
        let e0 = energy(&h, &psi0);
        for t in [1.0, 37.5, 400.0, 2500.0] {
            let psi = prop.amplitudes(t);
            unitarity = unitarity.max((psi.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs());
            energy_drift = energy_drift.max((energy(&h, &psi) - e0).abs() / e0.abs());
            let back = Propagator::new(&spectrum, &psi)?.amplitudes(-t);
            reversal = reversal.max(
                back.iter()
                    .zip(&psi0)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max),
            );
        }
    }

    let mut classical = 0.0_f64;
    for n in [1, 10, 300] {
        let chain = lumped_classical_chain(n, 1.0)?;
        let mut p0 = vec![0.0; chain.len()];
        p0[0] = 1.0;
        for p in evolve_classical(&chain, &p0, &[0.5, 50.0, 5000.0])? {
            classical = classical.max((p.total() - 1.0).abs());
        }
    }

    let spec = DisorderSpec::cauchy(0.03)?;
    let a = sample_disorder(&spec, 2001, 99)?;
    let b = sample_disorder(&spec, 2001, 99)?;
    let deterministic = a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits());

    let mut symmetric = true;
    let mut monotone = true;
    for delta in [0.01, 0.1, 1.0] {
        for de in [0.0, 0.7, 2.5, 4.0] {
            let up = thouless_length(3.0 + de, 1.0, delta)?.finite().unwrap();
            let down = thouless_length(3.0 - de, 1.0, delta)?.finite().unwrap();
            symmetric &= (up - down).abs() <= 1e-12 * up;
            let wider = thouless_length(3.0 + de, 1.0, 2.0 * delta)?
                .finite()
                .unwrap();
            monotone &= wider < up;
        }
    }

    let pass = unitarity <= 1e-9
        && energy_drift <= 1e-9
        && reversal <= 1e-8
        && classical <= 1e-9
        && deterministic
        && symmetric
        && monotone;
    outcome(
        pass,
        format!(
            "unitarity {unitarity:.1e}, energy {energy_drift:.1e}, reversal {reversal:.1e}, \
             classical {classical:.1e}, bit-exact disorder {}, closed-form symmetry {}, monotonicity {}",
            yes(deterministic),
            yes(symmetric),
            yes(monotone)
        ),
    )
}

#[test]
fn acceptance() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    let criteria: Vec<(&str, Check)> = vec![
        ("subspace reduction exactness", Box::new(subspace_reduction)),
        ("dynamics oracle equivalence", Box::new(dynamics_oracle)),
        ("ballistic clean transport", Box::new(|| ballistic(d))),
        ("localization saturation", Box::new(|| saturation(d))),
        (
            "closed form vs transfer matrix",
            Box::new(lyapunov_vs_closed_form),
        ),
        ("scaling exponents", Box::new(|| scaling(d))),
        ("hitting suppression", Box::new(|| hitting(d))),
        ("invariant suite", Box::new(invariants)),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let number = k + 1;
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("criterion {number} {tag} {name}: {detail}");
        if !pass {
            failed.push(number);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
