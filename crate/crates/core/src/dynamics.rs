//! Exact time evolution on the line model and derived observables.
//!
//! Quantum states are propagated through the eigenbasis of the (static)
//! line Hamiltonian, `psi(t) = sum_a <E_a|psi0> e^{-i E_a t} |E_a>` with
//! `hbar = 1`. The lumped classical chain is propagated by uniformization,
//! which keeps every intermediate quantity non-negative.

use std::io::Write;
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::line::{ClassicalChain, LineHamiltonian};
use crate::tridiag;

/// Largest chain handled by [`eigendecompose`] (`n = 10 000`).
pub const MAX_LINE_LEN: usize = 20_001;

/// Tolerance on `<psi0|psi0> = 1` for initial quantum states.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Probabilities in `[-NEGATIVE_CLIP, 0)` are written as zero in exports.
pub const NEGATIVE_CLIP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    vectors: Vec<f64>,
    dim: usize,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Components `<j~|E_a>` for `j = 0..dim`.
    pub fn eigenvector(&self, a: usize) -> &[f64] {
        &self.vectors[a * self.dim..(a + 1) * self.dim]
    }

    /// `psi_a = <E_a|psi>`.
    pub fn amplitudes_of(&self, psi: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|a| {
                self.eigenvector(a)
                    .iter()
                    .zip(psi)
                    .map(|(v, z)| z * v)
                    .sum()
            })
            .collect()
    }

    /// `max |V^T V - I|`. O(dim^3); meant for tests and diagnostics.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..self.dim {
            for b in a..self.dim {
                let dot: f64 = self
                    .eigenvector(a)
                    .iter()
                    .zip(self.eigenvector(b))
                    .map(|(x, y)| x * y)
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).abs());
            }
        }
        worst
    }

    /// `max |H - V diag(E) V^T|` over the tridiagonal band and its
    /// zero complement. O(dim^3).
    pub fn reconstruction_error(&self, h: &LineHamiltonian) -> f64 {
        let dense = h.to_dense();
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let r: f64 = (0..self.dim)
                    .map(|a| self.eigenvector(a)[i] * self.eigenvalues[a] * self.eigenvector(a)[j])
                    .sum();
                worst = worst.max((dense[(i, j)] - r).abs());
            }
        }
        worst
    }
}

pub fn eigendecompose(h: &LineHamiltonian) -> Result<SpectralDecomposition> {
    if h.len() > MAX_LINE_LEN {
        return Err(Error::InvalidParameter(format!(
            "line length {} exceeds {MAX_LINE_LEN}",
            h.len()
        )));
    }
    let eig = tridiag::eigh_tridiagonal(h.diagonal(), h.off_diagonal())?;
    Ok(SpectralDecomposition {
        eigenvalues: eig.values,
        vectors: eig.vectors,
        dim: eig.dim,
    })
}

/// `|j~>` as a line state.
pub fn site_state(len: usize, j: usize) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); len];
    psi[j] = Complex64::new(1.0, 0.0);
    psi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Quantum,
    Classical,
}

/// Per-column occupation probabilities at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityProfile {
    pub time: f64,
    pub kind: ProfileKind,
    pub probabilities: Vec<f64>,
}

impl ProbabilityProfile {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// A decomposition together with the eigen-amplitudes of one initial state.
pub struct Propagator<'a> {
    spectrum: &'a SpectralDecomposition,
    coefficients: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    /// Rejects states whose squared norm differs from 1 by more than
    /// [`NORM_TOLERANCE`].
    pub fn new(spectrum: &'a SpectralDecomposition, initial: &[Complex64]) -> Result<Self> {
        if initial.len() != spectrum.dim() {
            return Err(Error::DimensionMismatch {
                expected: spectrum.dim(),
                found: initial.len(),
            });
        }
        let norm_sq: f64 = initial.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self {
            spectrum,
            coefficients: spectrum.amplitudes_of(initial),
        })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `psi(t)`; negative `t` runs backwards.
    pub fn amplitudes(&self, t: f64) -> Vec<Complex64> {
        let dim = self.spectrum.dim();
        let mut re = vec![0.0; dim];
        let mut im = vec![0.0; dim];
        for (a, c) in self.coefficients.iter().enumerate() {
            let w = c * Complex64::from_polar(1.0, -self.spectrum.eigenvalues[a] * t);
            if w.re == 0.0 && w.im == 0.0 {
                continue;
            }
            let v = self.spectrum.eigenvector(a);
            for ((r, i), x) in re.iter_mut().zip(im.iter_mut()).zip(v) {
                *r += w.re * x;
                *i += w.im * x;
            }
        }
        re.into_iter()
            .zip(im)
            .map(|(r, i)| Complex64::new(r, i))
            .collect()
    }

    /// `<site|psi(t)>` without forming the whole state.
    pub fn amplitude_at(&self, site: usize, t: f64) -> Complex64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(a, c)| {
                c * self.spectrum.eigenvector(a)[site]
                    * Complex64::from_polar(1.0, -self.spectrum.eigenvalues[a] * t)
            })
            .sum()
    }

    pub fn profile(&self, t: f64) -> ProbabilityProfile {
        ProbabilityProfile {
            time: t,
            kind: ProfileKind::Quantum,
            probabilities: self.amplitudes(t).iter().map(|z| z.norm_sqr()).collect(),
        }
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "times must be finite and non-negative, got {t}"
        )));
    }
    Ok(())
}

pub fn evolve_quantum(
    spectrum: &SpectralDecomposition,
    initial: &[Complex64],
    times: &[f64],
) -> Result<Vec<ProbabilityProfile>> {
    check_times(times)?;
    let prop = Propagator::new(spectrum, initial)?;
    Ok(times.iter().map(|&t| prop.profile(t)).collect())
}

/// Same as [`evolve_quantum`] but returns the complex amplitudes.
pub fn evolve_amplitudes(
    spectrum: &SpectralDecomposition,
    initial: &[Complex64],
    times: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    check_times(times)?;
    let prop = Propagator::new(spectrum, initial)?;
    Ok(times.iter().map(|&t| prop.amplitudes(t)).collect())
}

/// `<psi|H|psi>`.
pub fn energy(h: &LineHamiltonian, psi: &[Complex64]) -> f64 {
    h.apply(psi)
        .iter()
        .zip(psi)
        .map(|(hp, p)| (p.conj() * hp).re)
        .sum()
}

/// Poisson mass left untruncated per uniformization interval.
const UNIFORMIZATION_TAIL: f64 = 1e-17;
/// Cap on `rate * dt` per interval so that `exp(-rate dt)` stays normal.
const UNIFORMIZATION_CHUNK: f64 = 30.0;

/// `p(t) = exp(-M t) p0` on the lumped chain.
pub fn evolve_classical(
    chain: &ClassicalChain,
    initial: &[f64],
    times: &[f64],
) -> Result<Vec<ProbabilityProfile>> {
    let l = chain.len();
    if initial.len() != l {
        return Err(Error::DimensionMismatch {
            expected: l,
            found: initial.len(),
        });
    }
    if initial.iter().any(|p| *p < 0.0 || !p.is_finite()) {
        return Err(Error::InvalidParameter(
            "initial probabilities must be finite and non-negative".into(),
        ));
    }
    let total: f64 = initial.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "initial probabilities sum to {total}, not 1"
        )));
    }
    check_times(times)?;

    let rate = chain.max_exit_rate();
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let mut out = vec![None; times.len()];
    let mut state = initial.to_vec();
    let mut now = 0.0;
    for idx in order {
        let target = times[idx];
        let mut remaining = target - now;
        while remaining > 0.0 {
            let dt = remaining.min(UNIFORMIZATION_CHUNK / rate);
            state = uniformization_step(chain, rate, &state, dt);
            remaining -= dt;
        }
        now = target;
        out[idx] = Some(ProbabilityProfile {
            time: target,
            kind: ProfileKind::Classical,
            probabilities: state.clone(),
        });
    }
    Ok(out
        .into_iter()
        .map(|p| p.expect("every time visited"))
        .collect())
}

/// `exp(-M dt) p = sum_k Pois(k; rate dt) P^k p` with `P = I - M / rate`.
fn uniformization_step(chain: &ClassicalChain, rate: f64, p: &[f64], dt: f64) -> Vec<f64> {
    let l = p.len();
    let x = rate * dt;
    let mut weight = (-x).exp();
    let mut mass = weight;
    let mut term = p.to_vec();
    let mut acc: Vec<f64> = term.iter().map(|v| weight * v).collect();
    let mut next = vec![0.0; l];
    let mut k = 0u32;
    while 1.0 - mass > UNIFORMIZATION_TAIL && k < 10_000 {
        k += 1;
        for j in 0..l {
            let mut v = (1.0 - chain.exit_rate(j) / rate) * term[j];
            if j > 0 {
                v += chain.rate_up(j - 1) / rate * term[j - 1];
            }
            if j + 1 < l {
                v += chain.rate_down(j) / rate * term[j + 1];
            }
            next[j] = v;
        }
        std::mem::swap(&mut term, &mut next);
        weight *= x / k as f64;
        mass += weight;
        for (a, t) in acc.iter_mut().zip(&term) {
            *a += weight * t;
        }
    }
    acc
}

/// Smallest column `c` with `sum_{j<=c} P_j >= quantile`.
pub fn packet_extent(profile: &ProbabilityProfile, quantile: f64) -> usize {
    let mut cumulative = 0.0;
    for (j, p) in profile.probabilities.iter().enumerate() {
        cumulative += p;
        if cumulative >= quantile {
            return j;
        }
    }
    profile.probabilities.len().saturating_sub(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingResult {
    pub probability: f64,
    pub time: f64,
}

/// Largest `|<target|psi(t)>|^2` over `time_grid`, with its time. Ties keep
/// the earliest grid point.
pub fn hitting_probability(
    spectrum: &SpectralDecomposition,
    initial: &[Complex64],
    target: usize,
    time_grid: &[f64],
) -> Result<HittingResult> {
    if target >= spectrum.dim() {
        return Err(Error::InvalidParameter(format!(
            "target column {target} outside 0..{}",
            spectrum.dim()
        )));
    }
    if time_grid.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    let prop = Propagator::new(spectrum, initial)?;
    // Only the target component is needed: w_a = psi_a <target|E_a>.
    let weights: Vec<(f64, Complex64)> = prop
        .coefficients()
        .iter()
        .enumerate()
        .map(|(a, c)| {
            (
                spectrum.eigenvalues()[a],
                c * spectrum.eigenvector(a)[target],
            )
        })
        .collect();
    let mut best = HittingResult {
        probability: f64::NEG_INFINITY,
        time: f64::NAN,
    };
    for &t in time_grid {
        let amp: Complex64 = weights
            .iter()
            .map(|(e, w)| w * Complex64::from_polar(1.0, -e * t))
            .sum();
        let p = amp.norm_sqr();
        if p > best.probability {
            best = HittingResult {
                probability: p,
                time: t,
            };
        }
    }
    Ok(best)
}

/// Uniform grid `0, dt, 2 dt, ...` up to and including `horizon`.
pub fn time_grid(horizon: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "bad time grid: horizon {horizon}, spacing {dt}"
        )));
    }
    let steps = (horizon / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

pub const PROFILE_SCHEMA: &str = "# schema: glued-profile v1";

/// Export probability for CSV: tiny negative round-off becomes 0.
pub fn export_probability(p: f64) -> f64 {
    if (-NEGATIVE_CLIP..0.0).contains(&p) {
        0.0
    } else {
        p
    }
}

/// Write `time,column,probability` rows (time-major, then column) for the
/// columns in `columns`.
pub fn write_profiles_csv<W: Write>(
    mut out: W,
    profiles: &[ProbabilityProfile],
    columns: Range<usize>,
) -> Result<()> {
    writeln!(out, "{PROFILE_SCHEMA}")?;
    writeln!(out, "time,column,probability")?;
    for profile in profiles {
        for j in columns.clone() {
            let p = export_probability(profile.probabilities[j]);
            writeln!(out, "{:?},{j},{p:?}", profile.time)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line::{lumped_classical_chain, reduced_hamiltonian};

    fn delta_profile(len: usize, j: usize) -> ProbabilityProfile {
        let mut probabilities = vec![0.0; len];
        probabilities[j] = 1.0;
        ProbabilityProfile {
            time: 0.0,
            kind: ProfileKind::Quantum,
            probabilities,
        }
    }

    #[test]
    fn three_site_spectrum() {
        let h = reduced_hamiltonian(1, 1.0).unwrap();
        let s = eigendecompose(&h).unwrap();
        for (got, want) in s.eigenvalues().iter().zip([0.0, 2.0, 4.0]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn trace_is_preserved() {
        let n = 50;
        let h = reduced_hamiltonian(n, 1.0).unwrap();
        let s = eigendecompose(&h).unwrap();
        let trace: f64 = s.eigenvalues().iter().sum();
        let want = 2.0 * 3.0 + 3.0 * (2 * n - 2) as f64;
        assert!((trace - want).abs() < 1e-10);
        assert!(s.orthonormality_error() < 1e-10);
        assert!(s.reconstruction_error(&h) <= 1e-9 * 6.0);
    }

    #[test]
    fn time_zero_and_eigenstates() {
        let h = reduced_hamiltonian(6, 1.0).unwrap();
        let s = eigendecompose(&h).unwrap();
        let psi0 = site_state(13, 0);
        let profiles = evolve_quantum(&s, &psi0, &[0.0]).unwrap();
        assert!((profiles[0].probabilities[0] - 1.0).abs() < 1e-12);

        let eigen: Vec<Complex64> = s
            .eigenvector(4)
            .iter()
            .map(|x| Complex64::new(*x, 0.0))
            .collect();
        let first = evolve_quantum(&s, &eigen, &[0.0]).unwrap();
        let later = evolve_quantum(&s, &eigen, &[17.5]).unwrap();
        for (a, b) in first[0].probabilities.iter().zip(&later[0].probabilities) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn unnormalized_rejected() {
        let h = reduced_hamiltonian(2, 1.0).unwrap();
        let s = eigendecompose(&h).unwrap();
        let mut psi = site_state(5, 0);
        psi[1] = Complex64::new(0.1, 0.0);
        assert!(matches!(
            evolve_quantum(&s, &psi, &[1.0]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(evolve_quantum(&s, &site_state(5, 0), &[-1.0]).is_err());
        assert!(matches!(
            evolve_quantum(&s, &site_state(4, 0), &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn single_site_amplitude_matches_full_state() {
        let h = reduced_hamiltonian(5, 1.0).unwrap();
        let s = eigendecompose(&h).unwrap();
        let prop = Propagator::new(&s, &site_state(11, 0)).unwrap();
        let full = prop.amplitudes(2.7);
        for j in 0..11 {
            assert!((prop.amplitude_at(j, 2.7) - full[j]).norm() < 1e-14);
        }
    }

    #[test]
    fn extent_edge_cases() {
        assert_eq!(packet_extent(&delta_profile(7, 0), 0.99), 0);
        assert_eq!(packet_extent(&delta_profile(7, 0), 0.01), 0);
        let uniform = ProbabilityProfile {
            time: 0.0,
            kind: ProfileKind::Quantum,
            probabilities: vec![1.0 / 11.0; 11],
        };
        assert_eq!(packet_extent(&uniform, 0.5), 5);
    }

    #[test]
    fn hitting_start_column_is_one_at_zero() {
        let h = reduced_hamiltonian(4, 1.0).unwrap();
        let s = eigendecompose(&h).unwrap();
        let r = hitting_probability(&s, &site_state(9, 0), 0, &[0.0, 0.5, 1.0]).unwrap();
        assert!(r.probability >= 1.0 - 1e-12);
        assert_eq!(r.time, 0.0);
        assert!(hitting_probability(&s, &site_state(9, 0), 9, &[0.0]).is_err());
    }

    #[test]
    fn classical_time_zero_and_stationary() {
        let chain = lumped_classical_chain(6, 1.0).unwrap();
        let mut p0 = vec![0.0; 13];
        p0[0] = 1.0;
        let out = evolve_classical(&chain, &p0, &[0.0]).unwrap();
        assert_eq!(out[0].probabilities, p0);

        let pi = chain.stationary();
        let out = evolve_classical(&chain, &pi, &[3.0, 100.0]).unwrap();
        for prof in out {
            for (a, b) in prof.probabilities.iter().zip(&pi) {
                assert!((a - b).abs() < 1e-13);
            }
        }
        assert!(evolve_classical(&chain, &[1.0], &[1.0]).is_err());
    }

    #[test]
    fn classical_long_times_conserve() {
        let chain = lumped_classical_chain(40, 1.0).unwrap();
        let mut p0 = vec![0.0; 81];
        p0[0] = 1.0;
        for prof in evolve_classical(&chain, &p0, &[500.0, 0.3, 80.0]).unwrap() {
            assert!((prof.total() - 1.0).abs() < 1e-9);
            assert!(prof.probabilities.iter().all(|p| *p >= 0.0));
        }
    }

    #[test]
    fn grid_and_clipping() {
        let g = time_grid(1.0, 0.25).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(time_grid(1.0, 0.0).is_err());
        assert_eq!(export_probability(-5e-13), 0.0);
        assert_eq!(export_probability(0.25), 0.25);
    }

    #[test]
    fn profile_csv_rows() {
        let profiles = vec![
            ProbabilityProfile {
                time: 1.0,
                kind: ProfileKind::Quantum,
                probabilities: vec![0.5, -1e-13, 0.5],
            },
            ProbabilityProfile {
                time: 2.0,
                kind: ProfileKind::Quantum,
                probabilities: vec![0.25, 0.25, 0.5],
            },
        ];
        let mut buf = Vec::new();
        write_profiles_csv(&mut buf, &profiles, 0..2).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let want = "# schema: glued-profile v1\ntime,column,probability\n\
                    1.0,0,0.5\n1.0,1,0.0\n2.0,0,0.25\n2.0,1,0.25\n";
        assert_eq!(text, want);
    }
}
