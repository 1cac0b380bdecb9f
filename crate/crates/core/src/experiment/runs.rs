use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::config::{Experiment, ExperimentConfig};
use super::output::{OutputDir, RunManifest};
use crate::dynamics::{
    eigendecompose, evolve_classical, evolve_quantum, hitting_probability, packet_extent,
    site_state, time_grid, write_profiles_csv,
};
use crate::error::{Error, Result};
use crate::graph::{self, GluedTreeGraph};
use crate::line::{
    apply_disorder, column_basis, compress_hamiltonian, lumped_classical_chain,
    reduced_hamiltonian, verify_subspace_closure, DisorderFamily, DisorderSpec,
};
use crate::localization::{
    longest_length_energy, max_length_asymptote, max_localization_length, scaling_exponent,
    thouless_length, Length,
};
use crate::rng::child_seed;
use crate::stats::{linear_fit, median, LinearFit};

const SQRT_8: f64 = 2.0 * SQRT_2;

/// Run whatever `config.experiment` names. Data files go to `config.out`
/// together with `config.txt` and, last, `manifest.json`.
pub fn run(config: &ExperimentConfig) -> Result<RunManifest> {
    config.validate()?;
    let mut out = OutputDir::prepare(config)?;
    out.write("config.txt", |w| {
        Ok(w.write_all(config.to_text().as_bytes())?)
    })?;
    match config.experiment {
        Experiment::Fig4 => fig4(config, &mut out)?,
        Experiment::Scaling => scaling(config, &mut out)?,
        Experiment::Hitting => hitting(config, &mut out)?,
        Experiment::Crosscheck => {
            let report = crosscheck_report(config)?;
            out.write_json("crosscheck.json", &report)?;
        }
        Experiment::Thouless => thouless(config, &mut out)?,
    }
    out.finish(config)
}

/// Seed of repetition `rep` at disorder width `delta`.
pub fn realization_seed(master: u64, delta: f64, rep: usize) -> u64 {
    child_seed(master, delta.to_bits(), rep as u64)
}

/// Seven equally spaced times ending at `0.9 n / (2 sqrt(2) gamma)`, when the
/// clean front is still inside the left half.
pub fn default_fig4_times(n: usize, gamma: f64) -> Vec<f64> {
    let last = 0.9 * n as f64 / (SQRT_8 * gamma);
    (1..=7).map(|k| last * k as f64 / 7.0).collect()
}

fn single_family(config: &ExperimentConfig) -> Result<DisorderFamily> {
    match config.families.as_slice() {
        [f] => Ok(*f),
        _ => Err(Error::Config(format!(
            "{} takes a single disorder family",
            config.experiment
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Series {
    pub delta: f64,
    pub max_length: Length,
    pub seeds: Vec<u64>,
    /// Median over seeds, one per time.
    pub median_extent: Vec<f64>,
    /// Median extent against time; `None` for a single time.
    pub extent_fit: Option<LinearFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4Summary {
    pub n: usize,
    pub gamma: f64,
    pub family: DisorderFamily,
    pub quantile: f64,
    pub times: Vec<f64>,
    pub series: Vec<Fig4Series>,
}

fn fig4(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let n = config.n[0];
    let family = single_family(config)?;
    let times = config
        .times
        .clone()
        .unwrap_or_else(|| default_fig4_times(n, config.gamma));
    let clean = reduced_hamiltonian(n, config.gamma)?;
    let start = site_state(clean.len(), 0);

    let mut extent_rows = Vec::new();
    let mut series = Vec::new();
    for &delta in &config.deltas {
        let spec = DisorderSpec::new(family, delta)?;
        // A clean chain is the same for every seed.
        let reps = if delta == 0.0 { 1 } else { config.seeds };
        let mut seeds = Vec::with_capacity(reps);
        let mut extents = vec![Vec::with_capacity(reps); times.len()];
        for rep in 0..reps {
            let seed = realization_seed(config.seed, delta, rep);
            seeds.push(seed);
            let h = apply_disorder(&clean, &spec, seed)?;
            let profiles = evolve_quantum(&eigendecompose(&h)?, &start, &times)?;
            out.write(&format!("profile_delta{delta:?}_rep{rep}.csv"), |w| {
                write_profiles_csv(w, &profiles, 0..n)
            })?;
            for (k, p) in profiles.iter().enumerate() {
                let e = packet_extent(p, config.quantile);
                extents[k].push(e as f64);
                extent_rows.push(format!("{delta:?},{rep},{seed},{:?},{e}", p.time));
            }
        }
        let median_extent: Vec<f64> = extents.iter().map(|e| median(e)).collect();
        let extent_fit = (times.len() > 1).then(|| linear_fit(&times, &median_extent));
        series.push(Fig4Series {
            delta,
            max_length: max_localization_length(config.gamma, delta)?,
            seeds,
            median_extent,
            extent_fit,
        });
    }

    out.write("extent.csv", |w| {
        writeln!(w, "# schema: glued-extent v1")?;
        writeln!(w, "delta,repetition,seed,time,extent")?;
        for row in &extent_rows {
            writeln!(w, "{row}")?;
        }
        Ok(())
    })?;
    out.write_json(
        "fig4_summary.json",
        &Fig4Summary {
            n,
            gamma: config.gamma,
            family,
            quantile: config.quantile,
            times,
            series,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub family: DisorderFamily,
    pub gamma: f64,
    pub steps: usize,
    pub seeds: Vec<u64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub monotone: bool,
    /// Cauchy only: largest relative distance to the closed-form length.
    pub max_thouless_deviation: Option<f64>,
}

fn family_tag(family: DisorderFamily) -> u64 {
    u64::from_le_bytes(*b"family\0\0") ^ family as u64
}

fn scaling(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let gamma = config.gamma;
    for &family in &config.families {
        let seeds: Vec<u64> = (0..config.seeds as u64)
            .map(|r| child_seed(config.seed, family_tag(family), r))
            .collect();
        let result = scaling_exponent(family, gamma, &config.deltas, config.steps, &seeds)?;
        let reference = |delta: f64| -> Result<Option<f64>> {
            if family != DisorderFamily::Cauchy {
                return Ok(None);
            }
            Ok(thouless_length(3.0 * gamma, gamma, delta)?.finite())
        };
        let mut deviation: Option<f64> = None;
        let mut rows = Vec::new();
        for p in &result.points {
            let th = reference(p.delta)?;
            if let Some(l) = th {
                let d = (p.length - l).abs() / l;
                deviation = Some(deviation.map_or(d, |m| m.max(d)));
            }
            let th = th.map(|l| format!("{l:?}")).unwrap_or_default();
            rows.push(format!(
                "{family},{:?},{:?},{:?},{th}",
                p.delta, p.length, p.stderr
            ));
        }
        out.write(&format!("scaling_{family}.csv"), |w| {
            writeln!(w, "# schema: glued-scaling v1")?;
            writeln!(w, "family,delta,length,stderr,thouless_length")?;
            for row in &rows {
                writeln!(w, "{row}")?;
            }
            Ok(())
        })?;
        if !result.monotone {
            out.warn(format!("{family}: l(delta) is not monotone within noise"));
        }
        out.write_json(
            &format!("scaling_{family}.json"),
            &ScalingSummary {
                family,
                gamma,
                steps: config.steps,
                seeds,
                slope: result.fit.slope,
                intercept: result.fit.intercept,
                r_squared: result.fit.r_squared,
                monotone: result.monotone,
                max_thouless_deviation: deviation,
            },
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingPoint {
    pub n: usize,
    pub median_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingSummary {
    pub family: DisorderFamily,
    pub delta: f64,
    pub gamma: f64,
    pub horizon_factor: f64,
    pub grid_dt: f64,
    pub seeds: Vec<u64>,
    pub points: Vec<HittingPoint>,
    /// `ln median` against `n`; `None` for a single depth.
    pub fit: Option<LinearFit>,
    /// Median at the largest `n` over the median at the smallest.
    pub suppression_ratio: f64,
}

fn hitting(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let family = single_family(config)?;
    let delta = config.deltas[0];
    let spec = DisorderSpec::new(family, delta)?;
    let gamma = config.gamma;
    let seeds: Vec<u64> = (0..config.seeds)
        .map(|r| realization_seed(config.seed, delta, r))
        .collect();

    let mut ns = config.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &n in &ns {
        let horizon = config.horizon_factor * n as f64;
        let crossing = 2.0 * n as f64 / (SQRT_8 * gamma);
        if horizon < crossing {
            out.warn(format!(
                "n = {n}: horizon {horizon} is shorter than the ballistic crossing time {crossing}"
            ));
        }
        let grid = time_grid(horizon, config.grid_dt)?;
        let clean = reduced_hamiltonian(n, gamma)?;
        let start = site_state(clean.len(), 0);
        let mut maxima = Vec::with_capacity(seeds.len());
        for &seed in &seeds {
            let h = apply_disorder(&clean, &spec, seed)?;
            let hit = hitting_probability(&eigendecompose(&h)?, &start, 2 * n, &grid)?;
            maxima.push(hit.probability);
            rows.push(format!("{n},{seed},{:?},{:?}", hit.probability, hit.time));
        }
        points.push(HittingPoint {
            n,
            median_probability: median(&maxima),
        });
    }

    let fit = (points.len() > 1).then(|| {
        let x: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
        let y: Vec<f64> = points.iter().map(|p| p.median_probability.ln()).collect();
        linear_fit(&x, &y)
    });
    let suppression_ratio =
        points[points.len() - 1].median_probability / points[0].median_probability;

    out.write("hitting.csv", |w| {
        writeln!(w, "# schema: glued-hitting v1")?;
        writeln!(w, "n,seed,max_probability,argmax_time")?;
        for row in &rows {
            writeln!(w, "{row}")?;
        }
        Ok(())
    })?;
    out.write_json(
        "hitting_summary.json",
        &HittingSummary {
            family,
            delta,
            gamma,
            horizon_factor: config.horizon_factor,
            grid_dt: config.grid_dt,
            seeds,
            points,
            fit,
            suppression_ratio,
        },
    )
}

pub const CLOSURE_TOLERANCE: f64 = 1e-10;
pub const ENTRY_TOLERANCE: f64 = 1e-12;
pub const DYNAMICS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub n: usize,
    pub gamma: f64,
    pub times: Vec<f64>,
    /// Largest norm of `H|j~>` outside the column span.
    pub closure_residual: f64,
    /// Largest entry difference between the compressed and reduced `H`.
    pub hamiltonian_entry_error: f64,
    /// Largest column-probability difference, full graph vs line.
    pub quantum_deviation: f64,
    /// Largest column-sum difference, full classical walk vs lumped chain.
    pub classical_deviation: f64,
    pub closure_pass: bool,
    pub hamiltonian_pass: bool,
    pub quantum_pass: bool,
    pub classical_pass: bool,
    pub pass: bool,
}

fn max_abs_diff<'a>(
    a: impl IntoIterator<Item = &'a f64>,
    b: impl IntoIterator<Item = &'a f64>,
) -> f64 {
    a.into_iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Compare the clean full graph against its column reductions, starting
/// from the left root. Needs `n <= 8`.
pub fn crosscheck_report(config: &ExperimentConfig) -> Result<CrosscheckReport> {
    let n = config.n[0];
    let gamma = config.gamma;
    let times = config.times.clone().unwrap_or_else(|| vec![1.0, 3.0, 10.0]);
    let g = GluedTreeGraph::build(n)?;
    let basis = column_basis(&g);

    let closure_residual = verify_subspace_closure(&g, &basis, gamma)?;
    let compressed = compress_hamiltonian(&g, &basis, gamma)?;
    let line = reduced_hamiltonian(n, gamma)?;
    let hamiltonian_entry_error = max_abs_diff(compressed.iter(), line.to_dense().iter());

    let h_full = graph::quantum_hamiltonian_full(&g, gamma)?;
    let psi0 = site_state(g.vertex_count(), g.leftmost());
    let full_states = graph::quantum_evolve_full(&h_full, &psi0, &times)?;
    let reduced = evolve_quantum(&eigendecompose(&line)?, &site_state(line.len(), 0), &times)?;
    let quantum_deviation = full_states
        .iter()
        .zip(&reduced)
        .map(|(psi, p)| max_abs_diff(&g.column_probabilities(psi), &p.probabilities))
        .fold(0.0, f64::max);

    let m_full = graph::classical_generator(&g, gamma)?;
    let mut p0 = vec![0.0; g.vertex_count()];
    p0[g.leftmost()] = 1.0;
    let full_p = graph::classical_evolve_full(&m_full, &p0, &times)?;
    let chain = lumped_classical_chain(n, gamma)?;
    let mut q0 = vec![0.0; chain.len()];
    q0[0] = 1.0;
    let lumped = evolve_classical(&chain, &q0, &times)?;
    let classical_deviation = full_p
        .iter()
        .zip(&lumped)
        .map(|(p, q)| max_abs_diff(&g.column_sums(p), &q.probabilities))
        .fold(0.0, f64::max);

    let closure_pass = closure_residual <= CLOSURE_TOLERANCE;
    let hamiltonian_pass = hamiltonian_entry_error <= ENTRY_TOLERANCE;
    let quantum_pass = quantum_deviation <= DYNAMICS_TOLERANCE;
    let classical_pass = classical_deviation <= DYNAMICS_TOLERANCE;
    Ok(CrosscheckReport {
        n,
        gamma,
        times,
        closure_residual,
        hamiltonian_entry_error,
        quantum_deviation,
        classical_deviation,
        closure_pass,
        hamiltonian_pass,
        quantum_pass,
        classical_pass,
        pass: closure_pass && hamiltonian_pass && quantum_pass && classical_pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThoulessSummaryRow {
    pub delta: f64,
    pub max_length: Length,
    pub asymptote: f64,
    pub longest_energy: f64,
}

fn thouless(config: &ExperimentConfig, out: &mut OutputDir) -> Result<()> {
    let gamma = config.gamma;
    let half_width = 2.0 * SQRT_8 * gamma;
    let k_max = (half_width / config.grid_dt + 1e-9).floor() as i64;
    let energies: Vec<f64> = (-k_max..=k_max)
        .map(|k| 3.0 * gamma + k as f64 * config.grid_dt)
        .collect();

    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &delta in &config.deltas {
        for &e in &energies {
            let l = thouless_length(e, gamma, delta)?;
            rows.push(format!("{e:?},{delta:?},{l},{:?}", l.inverse()));
        }
        summary.push(ThoulessSummaryRow {
            delta,
            max_length: max_localization_length(gamma, delta)?,
            asymptote: max_length_asymptote(gamma, delta),
            longest_energy: longest_length_energy(gamma, delta, half_width, config.grid_dt)?,
        });
    }
    out.write("thouless.csv", |w| {
        writeln!(w, "# schema: glued-thouless v1")?;
        writeln!(w, "energy,delta,length,inverse_length")?;
        for row in &rows {
            writeln!(w, "{row}")?;
        }
        Ok(())
    })?;
    out.write_json("thouless_summary.json", &summary)
}
