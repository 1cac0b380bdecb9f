//! Localization lengths of the disordered line: closed form for Cauchy
//! disorder, transfer-matrix Lyapunov exponents for any family, and
//! exponential-envelope fits of individual eigenstates.

use std::f64::consts::SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::line::{DisorderFamily, DisorderSpec};
use crate::stats::{self, LinearFit};

const SQRT_8: f64 = 2.0 * SQRT_2;

/// A localization length. Extended states carry an explicit infinite tag
/// rather than a sentinel float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Length {
    Finite(f64),
    Infinite,
}

impl Length {
    pub fn finite(self) -> Option<f64> {
        match self {
            Length::Finite(l) => Some(l),
            Length::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Length::Infinite)
    }

    /// `1 / l`, zero for infinite lengths.
    pub fn inverse(self) -> f64 {
        match self {
            Length::Finite(l) => 1.0 / l,
            Length::Infinite => 0.0,
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Finite(l) => write!(f, "{l:?}"),
            Length::Infinite => f.write_str("inf"),
        }
    }
}

fn check_gamma_delta(gamma: f64, delta: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive and finite, got {gamma}"
        )));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "delta must be finite and non-negative, got {delta}"
        )));
    }
    Ok(())
}

/// Right-hand side of the Lloyd-Thouless relation,
/// `cosh(1/l) = [sqrt((sqrt8 g + Eh)^2 + d^2) + sqrt((sqrt8 g - Eh)^2 + d^2)] / (sqrt32 g)`
/// with `Eh = E - 3 g`, evaluated directly.
pub fn thouless_rhs(energy: f64, gamma: f64, delta: f64) -> f64 {
    let e_hat = energy - 3.0 * gamma;
    ((SQRT_8 * gamma + e_hat).hypot(delta) + (SQRT_8 * gamma - e_hat).hypot(delta))
        / (32f64.sqrt() * gamma)
}

/// `rhs - 1`, rearranged so that no cancellation happens for small `delta`.
fn thouless_excess(e_hat: f64, gamma: f64, delta: f64) -> f64 {
    let a = SQRT_8 * gamma + e_hat;
    let b = SQRT_8 * gamma - e_hat;
    // hypot(a, d) - |a| = d^2 / (hypot(a, d) + |a|)
    let lift = |x: f64| {
        let h = x.hypot(delta);
        if h == 0.0 {
            0.0
        } else {
            delta * delta / (h + x.abs())
        }
    };
    // |a| + |b| - 2 sqrt8 g = 2 max(|Eh| - sqrt8 g, 0)
    let outside = 2.0 * (e_hat.abs() - SQRT_8 * gamma).max(0.0);
    (lift(a) + lift(b) + outside) / (32f64.sqrt() * gamma)
}

/// Localization length at energy `energy` for Cauchy disorder of width
/// `delta` on the bulk chain (on-site `3 gamma`, hopping `-sqrt2 gamma`).
pub fn thouless_length(energy: f64, gamma: f64, delta: f64) -> Result<Length> {
    check_gamma_delta(gamma, delta)?;
    if !energy.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "energy must be finite, got {energy}"
        )));
    }
    let rhs = thouless_rhs(energy, gamma, delta);
    if rhs < 1.0 - 1e-12 {
        return Err(Error::Inconsistent(format!(
            "cosh(1/l) = {rhs} < 1 at E = {energy}, gamma = {gamma}, delta = {delta}"
        )));
    }
    let excess = thouless_excess(energy - 3.0 * gamma, gamma, delta);
    if excess <= 1e-15 {
        return Ok(Length::Infinite);
    }
    // acosh(1 + x) = log1p(x + sqrt(x (2 + x)))
    let inverse = (excess + (excess * (2.0 + excess)).sqrt()).ln_1p();
    Ok(Length::Finite(1.0 / inverse))
}

/// Band-centre length `thouless_length(3 gamma, gamma, delta)`, the largest
/// over all energies.
pub fn max_localization_length(gamma: f64, delta: f64) -> Result<Length> {
    check_gamma_delta(gamma, delta)?;
    if delta == 0.0 {
        return Ok(Length::Infinite);
    }
    thouless_length(3.0 * gamma, gamma, delta)
}

/// Small-`delta` asymptote `sqrt(8) gamma / delta` of the band-centre length.
pub fn max_length_asymptote(gamma: f64, delta: f64) -> f64 {
    SQRT_8 * gamma / delta
}

/// Scan energies `3 gamma + k step` for `|k step| <= half_width` and return
/// the one with the largest Lloyd-Thouless length.
pub fn longest_length_energy(gamma: f64, delta: f64, half_width: f64, step: f64) -> Result<f64> {
    check_gamma_delta(gamma, delta)?;
    if !(step > 0.0 && half_width >= 0.0) {
        return Err(Error::InvalidParameter(
            "scan needs step > 0 and half_width >= 0".into(),
        ));
    }
    let k_max = (half_width / step + 1e-9).floor() as i64;
    let mut best = (f64::NEG_INFINITY, 3.0 * gamma);
    for k in -k_max..=k_max {
        let e = 3.0 * gamma + k as f64 * step;
        let score = match thouless_length(e, gamma, delta)? {
            Length::Infinite => f64::INFINITY,
            Length::Finite(l) => l,
        };
        if score > best.0 {
            best = (score, e);
        }
    }
    Ok(best.1)
}

pub const MIN_TRANSFER_STEPS: usize = 10_000;
pub const LYAPUNOV_BATCHES: usize = 32;
const RENORMALIZE_EVERY: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovEstimate {
    /// Mean log growth per site, i.e. `1 / l`.
    pub exponent: f64,
    /// Batch-means standard error of `exponent`.
    pub stderr: f64,
    pub steps: usize,
}

impl LyapunovEstimate {
    pub fn length(&self) -> Length {
        if self.exponent > 0.0 {
            Length::Finite(1.0 / self.exponent)
        } else {
            Length::Infinite
        }
    }
}

/// Lyapunov exponent of the bulk recursion
/// `psi_{j+1} = ((3 gamma + eps_j - E) / (sqrt2 gamma)) psi_j - psi_{j-1}`
/// over `steps` sites of one disorder realization.
pub fn lyapunov_exponent(
    energy: f64,
    gamma: f64,
    spec: &DisorderSpec,
    steps: usize,
    seed: u64,
) -> Result<LyapunovEstimate> {
    check_gamma_delta(gamma, spec.delta)?;
    if steps < MIN_TRANSFER_STEPS {
        return Err(Error::InvalidParameter(format!(
            "transfer-matrix estimate needs at least {MIN_TRANSFER_STEPS} steps, got {steps}"
        )));
    }
    let hop = SQRT_2 * gamma;
    let base = (3.0 * gamma - energy) / hop;
    let scale = 1.0 / hop;
    let mut disorder = spec.sampler(seed)?;

    let mut prev = 0.0_f64;
    let mut cur = 1.0_f64;
    let mut batch_logs = Vec::with_capacity(LYAPUNOV_BATCHES);
    let mut done = 0;
    for b in 0..LYAPUNOV_BATCHES {
        let end = (b + 1) * steps / LYAPUNOV_BATCHES;
        let mut log_growth = 0.0;
        while done < end {
            let chunk = RENORMALIZE_EVERY.min(end - done);
            for eps in disorder.by_ref().take(chunk) {
                let next = (base + scale * eps) * cur - prev;
                prev = cur;
                cur = next;
            }
            done += chunk;
            let norm = cur.hypot(prev);
            log_growth += norm.ln();
            cur /= norm;
            prev /= norm;
        }
        let batch_len = end - b * steps / LYAPUNOV_BATCHES;
        batch_logs.push(log_growth / batch_len as f64);
    }
    let exponent = stats::mean(&batch_logs);
    if !exponent.is_finite() {
        return Err(Error::Inconsistent(format!(
            "non-finite Lyapunov exponent at E = {energy}"
        )));
    }
    Ok(LyapunovEstimate {
        exponent,
        stderr: stats::standard_error(&batch_logs),
        steps,
    })
}

/// Exponent averaged over independent realizations; the error combines the
/// per-seed batch errors.
pub fn lyapunov_exponent_averaged(
    energy: f64,
    gamma: f64,
    spec: &DisorderSpec,
    steps: usize,
    seeds: &[u64],
) -> Result<LyapunovEstimate> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("need at least one seed".into()));
    }
    let estimates = seeds
        .iter()
        .map(|&s| lyapunov_exponent(energy, gamma, spec, steps, s))
        .collect::<Result<Vec<_>>>()?;
    let k = estimates.len() as f64;
    let exponent = estimates.iter().map(|e| e.exponent).sum::<f64>() / k;
    let stderr = estimates
        .iter()
        .map(|e| e.stderr.powi(2))
        .sum::<f64>()
        .sqrt()
        / k;
    Ok(LyapunovEstimate {
        exponent,
        stderr,
        steps: steps * estimates.len(),
    })
}

/// Amplitudes at or below this are treated as numerical noise.
pub const AMPLITUDE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationEstimate {
    pub energy: f64,
    /// Site of the largest amplitude.
    pub center: usize,
    pub length: f64,
    /// Fitted amplitude scale at the centre.
    pub prefactor: f64,
    /// RMS residual of the log-envelope fit.
    pub fit_residual: f64,
    /// Number of flanks (1 or 2) that contributed.
    pub flanks: usize,
}

struct FlankFit {
    length: f64,
    log_prefactor: f64,
    residuals: Vec<f64>,
}

/// Fit `ln env(d) = ln N - d / l` to the outward running maximum of a
/// flank. `amps[d]` is the amplitude at distance `d` from the peak.
fn fit_flank(amps: &[f64]) -> Option<FlankFit> {
    let mut env = vec![0.0; amps.len()];
    let mut running = 0.0_f64;
    for d in (0..amps.len()).rev() {
        running = running.max(amps[d]);
        env[d] = running;
    }
    let usable = env.iter().take_while(|a| **a > AMPLITUDE_FLOOR).count();
    if usable < 3 {
        return None;
    }
    let x: Vec<f64> = (0..usable).map(|d| d as f64).collect();
    let y: Vec<f64> = env[..usable].iter().map(|a| a.ln()).collect();
    let fit = stats::linear_fit(&x, &y);
    let decay = -fit.slope;
    // Require at least one decade of fitted decay across the range.
    if !(decay > 0.0) || decay * ((usable - 1) as f64) < std::f64::consts::LN_10 {
        return None;
    }
    let length = 1.0 / decay;
    // Flanks cut off by the chain end within 2 l are biased; drop them.
    if (amps.len() as f64) < 2.0 * length {
        return None;
    }
    let residuals = x
        .iter()
        .zip(&y)
        .map(|(d, v)| v - (fit.intercept + fit.slope * d))
        .collect();
    Some(FlankFit {
        length,
        log_prefactor: fit.intercept,
        residuals,
    })
}

/// Exponential envelope of eigenstate `index`. Both flanks are fitted
/// independently and averaged; a flank needs a decade of decay and must
/// extend at least `2 l` before the chain end. States with no usable flank
/// are reported as [`Error::UnreliableEnvelope`].
pub fn eigenstate_envelope(
    spectrum: &SpectralDecomposition,
    index: usize,
) -> Result<LocalizationEstimate> {
    if index >= spectrum.dim() {
        return Err(Error::InvalidParameter(format!(
            "eigenstate index {index} outside 0..{}",
            spectrum.dim()
        )));
    }
    let amps: Vec<f64> = spectrum
        .eigenvector(index)
        .iter()
        .map(|v| v.abs())
        .collect();
    envelope_of(&amps, spectrum.eigenvalues()[index])
}

/// [`eigenstate_envelope`] for an arbitrary amplitude profile.
pub fn envelope_of(amplitudes: &[f64], energy: f64) -> Result<LocalizationEstimate> {
    let center = amplitudes
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, a)| {
            if *a > best.1 {
                (j, *a)
            } else {
                best
            }
        })
        .0;
    let left: Vec<f64> = amplitudes[..=center].iter().rev().copied().collect();
    let right: Vec<f64> = amplitudes[center..].to_vec();
    let fits: Vec<FlankFit> = [left, right].iter().filter_map(|f| fit_flank(f)).collect();
    if fits.is_empty() {
        return Err(Error::UnreliableEnvelope(format!(
            "no flank of the state at E = {energy} (peak at site {center}) decays by a decade \
             within the chain"
        )));
    }
    let k = fits.len() as f64;
    let length = fits.iter().map(|f| f.length).sum::<f64>() / k;
    let log_prefactor = fits.iter().map(|f| f.log_prefactor).sum::<f64>() / k;
    let residuals: Vec<f64> = fits
        .iter()
        .flat_map(|f| f.residuals.iter().copied())
        .collect();
    let fit_residual =
        (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(LocalizationEstimate {
        energy,
        center,
        length,
        prefactor: log_prefactor.exp(),
        fit_residual,
        flanks: fits.len(),
    })
}

pub const MIN_SCALING_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub delta: f64,
    pub length: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub family: DisorderFamily,
    pub gamma: f64,
    pub points: Vec<ScalingPoint>,
    pub fit: LinearFit,
    /// False when some `l(delta)` rises with `delta` by more than twice the
    /// combined standard error.
    pub monotone: bool,
}

impl ScalingResult {
    pub fn slope(&self) -> f64 {
        self.fit.slope
    }
}

/// Band-centre localization length `l(delta) = 1 / lambda` on each grid
/// point, then a least-squares fit of `ln l` against `ln delta`.
pub fn scaling_exponent(
    family: DisorderFamily,
    gamma: f64,
    delta_grid: &[f64],
    steps: usize,
    seeds: &[u64],
) -> Result<ScalingResult> {
    if delta_grid.len() < 2 {
        return Err(Error::InvalidParameter(
            "delta grid needs at least two points".into(),
        ));
    }
    if delta_grid.windows(2).any(|w| !(w[1] > w[0])) || !(delta_grid[0] > 0.0) {
        return Err(Error::InvalidParameter(
            "delta grid must be positive and strictly increasing".into(),
        ));
    }
    if delta_grid[delta_grid.len() - 1] / delta_grid[0] < 10.0 * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(
            "delta grid must span at least one decade".into(),
        ));
    }
    if steps < MIN_SCALING_STEPS {
        return Err(Error::InvalidParameter(format!(
            "scaling runs need at least {MIN_SCALING_STEPS} steps per realization"
        )));
    }

    let mut points = Vec::with_capacity(delta_grid.len());
    for &delta in delta_grid {
        let spec = DisorderSpec::new(family, delta)?;
        let est = lyapunov_exponent_averaged(3.0 * gamma, gamma, &spec, steps, seeds)?;
        let length = est.length().finite().ok_or_else(|| {
            Error::Inconsistent(format!("non-positive Lyapunov exponent at delta = {delta}"))
        })?;
        points.push(ScalingPoint {
            delta,
            length,
            stderr: est.stderr * length * length,
        });
    }
    let monotone = points.windows(2).all(|w| {
        let noise = 2.0 * w[0].stderr.hypot(w[1].stderr);
        w[1].length <= w[0].length + noise
    });
    let x: Vec<f64> = points.iter().map(|p| p.delta.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.length.ln()).collect();
    Ok(ScalingResult {
        family,
        gamma,
        points,
        fit: stats::linear_fit(&x, &y),
        monotone,
    })
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| {
            if k == 0 {
                lo
            } else if k + 1 == count {
                hi
            } else {
                (a + (b - a) * k as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}
