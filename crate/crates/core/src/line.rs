//! The reduced line model.
//!
//! The uniform column states `|j~>` span a `(2n + 1)`-dimensional subspace
//! that the clean glued-trees Hamiltonian leaves invariant. Restricted to it
//! the walk is a tight-binding chain with hopping `-sqrt(2) gamma` and
//! on-site energy `2 gamma` at sites `0, n, 2n` and `3 gamma` elsewhere.
//! Disorder is modeled as random on-site shifts `eps_j` of that chain.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, GluedTreeGraph};
use crate::rng::SlotStream;

/// Uniform superpositions over each column of `G_n`.
#[derive(Debug, Clone)]
pub struct ColumnBasis {
    n: usize,
    coefficients: Vec<f64>,
}

/// `2^(-m/2)` without going through `powf`, so even `m` are exact.
fn inverse_sqrt_pow2(m: usize) -> f64 {
    let even = 0.5f64.powi((m / 2) as i32);
    if m % 2 == 1 {
        even * std::f64::consts::FRAC_1_SQRT_2
    } else {
        even
    }
}

pub fn column_basis(graph: &GluedTreeGraph) -> ColumnBasis {
    let n = graph.depth();
    let coefficients = (0..=2 * n)
        .map(|j| inverse_sqrt_pow2(j.min(2 * n - j)))
        .collect();
    ColumnBasis { n, coefficients }
}

impl ColumnBasis {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Amplitude of `|j~>` on each vertex of column `j`.
    pub fn coefficient(&self, j: usize) -> f64 {
        self.coefficients[j]
    }

    /// `|j~>` as a full-graph vector.
    pub fn vector(&self, graph: &GluedTreeGraph, j: usize) -> DVector<f64> {
        let mut v = DVector::zeros(graph.vertex_count());
        for a in graph.column_range(j) {
            v[a] = self.coefficients[j];
        }
        v
    }

    /// Map line amplitudes `c_j` to the full-graph state `sum_j c_j |j~>`.
    pub fn embed(&self, graph: &GluedTreeGraph, line: &[Complex64]) -> Result<Vec<Complex64>> {
        if line.len() != self.len() || graph.depth() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: line.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); graph.vertex_count()];
        for (j, c) in line.iter().enumerate() {
            for a in graph.column_range(j) {
                out[a] = c * self.coefficients[j];
            }
        }
        Ok(out)
    }
}

/// Max over columns of the part of `H|j~>` lying outside the column span.
///
/// Dense; limited to `n <= MAX_DENSE_DEPTH`.
pub fn verify_subspace_closure(
    graph: &GluedTreeGraph,
    basis: &ColumnBasis,
    gamma: f64,
) -> Result<f64> {
    let h = graph::quantum_hamiltonian_full(graph, gamma)?;
    let vectors: Vec<DVector<f64>> = (0..basis.len()).map(|j| basis.vector(graph, j)).collect();
    let mut worst = 0.0_f64;
    for v in &vectors {
        let hv = &h.matrix * v;
        let mut residual = hv.clone();
        for w in &vectors {
            residual -= w * w.dot(&hv);
        }
        worst = worst.max(residual.norm());
    }
    Ok(worst)
}

/// `<j~|H|k~>` for the clean full-graph Hamiltonian.
pub fn compress_hamiltonian(
    graph: &GluedTreeGraph,
    basis: &ColumnBasis,
    gamma: f64,
) -> Result<DMatrix<f64>> {
    let h = graph::quantum_hamiltonian_full(graph, gamma)?;
    let vectors: Vec<DVector<f64>> = (0..basis.len()).map(|j| basis.vector(graph, j)).collect();
    let l = vectors.len();
    let mut out = DMatrix::zeros(l, l);
    for (k, vk) in vectors.iter().enumerate() {
        let hv = &h.matrix * vk;
        for (j, vj) in vectors.iter().enumerate() {
            out[(j, k)] = vj.dot(&hv);
        }
    }
    Ok(out)
}

/// Real symmetric tridiagonal Hamiltonian on the `2n + 1` column sites.
#[derive(Debug, Clone, PartialEq)]
pub struct LineHamiltonian {
    n: usize,
    gamma: f64,
    clean_diagonal: Vec<f64>,
    epsilon: Vec<f64>,
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
}

impl LineHamiltonian {
    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// On-site energies including disorder.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn clean_diagonal(&self) -> &[f64] {
        &self.clean_diagonal
    }

    /// `off_diagonal()[j]` couples sites `j` and `j + 1`.
    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn epsilon(&self) -> &[f64] {
        &self.epsilon
    }

    pub fn is_clean(&self) -> bool {
        self.epsilon.iter().all(|e| *e == 0.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let l = self.len();
        let mut m = DMatrix::from_diagonal(&DVector::from_column_slice(&self.diagonal));
        for j in 0..l - 1 {
            m[(j, j + 1)] = self.off_diagonal[j];
            m[(j + 1, j)] = self.off_diagonal[j];
        }
        m
    }

    /// `H psi` for a complex state.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let l = self.len();
        (0..l)
            .map(|j| {
                let mut acc = psi[j] * self.diagonal[j];
                if j > 0 {
                    acc += psi[j - 1] * self.off_diagonal[j - 1];
                }
                if j + 1 < l {
                    acc += psi[j + 1] * self.off_diagonal[j];
                }
                acc
            })
            .collect()
    }

    /// Write the disorder field as `site,epsilon` rows.
    pub fn write_disorder_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# schema: glued-disorder v1")?;
        writeln!(out, "site,epsilon")?;
        for (j, e) in self.epsilon.iter().enumerate() {
            writeln!(out, "{j},{e:?}")?;
        }
        Ok(())
    }
}

fn check_rate(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive and finite, got {gamma}"
        )));
    }
    Ok(())
}

pub fn reduced_hamiltonian(n: usize, gamma: f64) -> Result<LineHamiltonian> {
    if n == 0 {
        return Err(Error::InvalidParameter("depth n must be at least 1".into()));
    }
    check_rate(gamma)?;
    let l = 2 * n + 1;
    let clean_diagonal: Vec<f64> = (0..l)
        .map(|j| {
            if j == 0 || j == n || j == 2 * n {
                2.0 * gamma
            } else {
                3.0 * gamma
            }
        })
        .collect();
    Ok(LineHamiltonian {
        n,
        gamma,
        diagonal: clean_diagonal.clone(),
        clean_diagonal,
        epsilon: vec![0.0; l],
        off_diagonal: vec![-SQRT_2 * gamma; l - 1],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisorderFamily {
    /// Density `(1/pi) delta / (eps^2 + delta^2)`.
    Cauchy,
    /// Standard deviation `delta`.
    Gaussian,
    /// Flat on `[-sqrt(3) delta, sqrt(3) delta]` (standard deviation `delta`).
    Uniform,
}

impl DisorderFamily {
    pub const ALL: [DisorderFamily; 3] = [Self::Cauchy, Self::Gaussian, Self::Uniform];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cauchy => "cauchy",
            Self::Gaussian => "gaussian",
            Self::Uniform => "uniform",
        }
    }
}

impl fmt::Display for DisorderFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DisorderFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cauchy" | "lorentzian" => Ok(Self::Cauchy),
            "gaussian" | "normal" => Ok(Self::Gaussian),
            "uniform" | "box" => Ok(Self::Uniform),
            other => Err(Error::InvalidParameter(format!(
                "unknown disorder family {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub family: DisorderFamily,
    pub delta: f64,
}

impl DisorderSpec {
    pub fn new(family: DisorderFamily, delta: f64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "disorder width must be finite and non-negative, got {delta}"
            )));
        }
        Ok(Self { family, delta })
    }

    pub fn cauchy(delta: f64) -> Result<Self> {
        Self::new(DisorderFamily::Cauchy, delta)
    }

    /// Stream of on-site energies; site `j` always uses slot `j` of `seed`.
    pub fn sampler(&self, seed: u64) -> Result<DisorderSampler> {
        Self::new(self.family, self.delta)?;
        Ok(DisorderSampler {
            spec: *self,
            stream: SlotStream::new(seed, 0),
        })
    }

    /// Map one slot's pair of uniforms to a sample.
    #[inline]
    pub fn transform(&self, u: f64, v: f64) -> f64 {
        match self.family {
            DisorderFamily::Cauchy => self.delta * (PI * (u - 0.5)).tan(),
            DisorderFamily::Gaussian => self.delta * (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos(),
            DisorderFamily::Uniform => self.delta * 3f64.sqrt() * (2.0 * u - 1.0),
        }
    }
}

pub struct DisorderSampler {
    spec: DisorderSpec,
    stream: SlotStream,
}

impl Iterator for DisorderSampler {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        let (u, v) = self.stream.next_uniform_pair();
        Some(self.spec.transform(u, v))
    }
}

pub fn sample_disorder(spec: &DisorderSpec, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter(
            "sample count must be positive".into(),
        ));
    }
    Ok(spec.sampler(seed)?.take(count).collect())
}

/// Replace the disorder field of `h` with a fresh realization.
pub fn apply_disorder(
    h: &LineHamiltonian,
    spec: &DisorderSpec,
    seed: u64,
) -> Result<LineHamiltonian> {
    let epsilon = sample_disorder(spec, h.len(), seed)?;
    let diagonal = h
        .clean_diagonal
        .iter()
        .zip(&epsilon)
        .map(|(c, e)| c + e)
        .collect();
    Ok(LineHamiltonian {
        epsilon,
        diagonal,
        ..h.clone()
    })
}

/// Birth-death chain obtained by lumping the classical walk on `G_n` by
/// column. Convention `dp/dt = -M p` as for the full generator.
#[derive(Debug, Clone)]
pub struct ClassicalChain {
    n: usize,
    gamma: f64,
    rate_up: Vec<f64>,
    rate_down: Vec<f64>,
}

pub fn lumped_classical_chain(n: usize, gamma: f64) -> Result<ClassicalChain> {
    if n == 0 {
        return Err(Error::InvalidParameter("depth n must be at least 1".into()));
    }
    check_rate(gamma)?;
    let l = 2 * n + 1;
    // Edges from a column-j vertex into column j+1: 2 while the tree
    // deepens (j < n), 1 afterwards. Into column j: 1 for j <= n, else 2.
    let rate_up = (0..l - 1)
        .map(|j| if j < n { 2.0 * gamma } else { gamma })
        .collect();
    let rate_down = (0..l - 1)
        .map(|j| if j < n { gamma } else { 2.0 * gamma })
        .collect();
    Ok(ClassicalChain {
        n,
        gamma,
        rate_up,
        rate_down,
    })
}

impl ClassicalChain {
    pub fn len(&self) -> usize {
        2 * self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Rate of the jump `j -> j + 1`.
    pub fn rate_up(&self, j: usize) -> f64 {
        self.rate_up[j]
    }

    /// Rate of the jump `j + 1 -> j`.
    pub fn rate_down(&self, j: usize) -> f64 {
        self.rate_down[j]
    }

    pub fn exit_rate(&self, j: usize) -> f64 {
        let up = if j + 1 < self.len() {
            self.rate_up[j]
        } else {
            0.0
        };
        let down = if j > 0 { self.rate_down[j - 1] } else { 0.0 };
        up + down
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let l = self.len();
        let mut m = DMatrix::zeros(l, l);
        for j in 0..l {
            m[(j, j)] = self.exit_rate(j);
        }
        for j in 0..l - 1 {
            m[(j + 1, j)] = -self.rate_up[j];
            m[(j, j + 1)] = -self.rate_down[j];
        }
        m
    }

    /// `M p`.
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        let l = self.len();
        (0..l)
            .map(|j| {
                let mut acc = self.exit_rate(j) * p[j];
                if j > 0 {
                    acc -= self.rate_up[j - 1] * p[j - 1];
                }
                if j + 1 < l {
                    acc -= self.rate_down[j] * p[j + 1];
                }
                acc
            })
            .collect()
    }

    /// Stationary law: proportional to column sizes.
    pub fn stationary(&self) -> Vec<f64> {
        let sizes: Vec<f64> = (0..self.len())
            .map(|j| graph::column_size(self.n, j) as f64)
            .collect();
        let total: f64 = sizes.iter().sum();
        sizes.into_iter().map(|s| s / total).collect()
    }

    pub fn max_exit_rate(&self) -> f64 {
        (0..self.len())
            .map(|j| self.exit_rate(j))
            .fold(0.0, f64::max)
    }
}
