//! The glued binary trees graph and its full-dimensional dynamics.
//!
//! Two complete binary trees of depth `n` share their `2^n` leaves, giving
//! `2n + 1` columns. Vertices are numbered column by column; inside a column
//! they follow binary-heap order, so vertex `k` of column `j < n` has
//! children `2k` and `2k + 1` in column `j + 1`, and vertex `k` of column
//! `j > n` has children `2k` and `2k + 1` in column `j - 1`. Every center
//! vertex `k` is joined to vertex `k / 2` on both sides.
//!
//! The full graph exists here to validate the reduced line model; dense
//! operations are capped at [`MAX_DENSE_DEPTH`].

use std::ops::Range;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest depth accepted by [`GluedTreeGraph::build`] (49 150 vertices).
pub const MAX_DEPTH: usize = 14;

/// Largest depth for which dense matrices are formed (766 vertices).
pub const MAX_DENSE_DEPTH: usize = 8;

#[derive(Debug, Clone)]
pub struct GluedTreeGraph {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    column: Vec<usize>,
    offsets: Vec<usize>,
}

impl GluedTreeGraph {
    pub fn build(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DEPTH {
            return Err(Error::SizeLimit { n, max: MAX_DEPTH });
        }
        let columns = 2 * n + 1;
        let mut offsets = Vec::with_capacity(columns + 1);
        offsets.push(0);
        for j in 0..columns {
            offsets.push(offsets[j] + column_size(n, j));
        }
        let vertex_count = offsets[columns];

        let mut column = Vec::with_capacity(vertex_count);
        for j in 0..columns {
            column.extend(std::iter::repeat_n(j, column_size(n, j)));
        }

        let mut adjacency = vec![Vec::with_capacity(3); vertex_count];
        let mut link = |a: usize, b: usize| {
            adjacency[a].push(b);
            adjacency[b].push(a);
        };
        // Left tree: column j (shallow) to column j + 1 (deep).
        for j in 0..n {
            for k in 0..column_size(n, j) {
                let parent = offsets[j] + k;
                link(parent, offsets[j + 1] + 2 * k);
                link(parent, offsets[j + 1] + 2 * k + 1);
            }
        }
        // Right tree: column j (shallow) to column j - 1 (deep).
        for j in n + 1..columns {
            for k in 0..column_size(n, j) {
                let parent = offsets[j] + k;
                link(parent, offsets[j - 1] + 2 * k);
                link(parent, offsets[j - 1] + 2 * k + 1);
            }
        }
        for neighbors in &mut adjacency {
            neighbors.sort_unstable();
        }

        Ok(Self {
            n,
            adjacency,
            column,
            offsets,
        })
    }

    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn column_count(&self) -> usize {
        2 * self.n + 1
    }

    pub fn vertex_count(&self) -> usize {
        self.column.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn column_of(&self, v: usize) -> usize {
        self.column[v]
    }

    pub fn column_size(&self, j: usize) -> usize {
        column_size(self.n, j)
    }

    /// Vertex indices of column `j`.
    pub fn column_range(&self, j: usize) -> Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    pub fn leftmost(&self) -> usize {
        0
    }

    pub fn rightmost(&self) -> usize {
        self.vertex_count() - 1
    }

    /// Sum a per-vertex vector over each column.
    pub fn column_sums(&self, values: &[f64]) -> Vec<f64> {
        (0..self.column_count())
            .map(|j| values[self.column_range(j)].iter().sum())
            .collect()
    }

    /// Per-column probability `sum |psi_a|^2` of a full-graph state.
    pub fn column_probabilities(&self, state: &[Complex64]) -> Vec<f64> {
        (0..self.column_count())
            .map(|j| {
                state[self.column_range(j)]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum()
            })
            .collect()
    }

    fn require_dense(&self) -> Result<()> {
        if self.n > MAX_DENSE_DEPTH {
            return Err(Error::SizeLimit {
                n: self.n,
                max: MAX_DENSE_DEPTH,
            });
        }
        Ok(())
    }
}

/// Number of vertices in column `j` of the depth-`n` graph.
pub fn column_size(n: usize, j: usize) -> usize {
    1 << j.min(2 * n - j)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixRole {
    MarkovGenerator,
    Hamiltonian,
}

/// The matrix `M` with `M_ii = d_i gamma` and `M_ij = -gamma` on edges.
///
/// Used either as a classical generator (`dp/dt = -M p`) or as a quantum
/// Hamiltonian; the two are the same matrix.
#[derive(Debug, Clone)]
pub struct DenseGenerator {
    pub matrix: DMatrix<f64>,
    pub gamma: f64,
    pub role: MatrixRole,
}

impl DenseGenerator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive and finite, got {gamma}"
        )));
    }
    Ok(())
}

fn dense_matrix(graph: &GluedTreeGraph, gamma: f64, role: MatrixRole) -> Result<DenseGenerator> {
    check_gamma(gamma)?;
    graph.require_dense()?;
    let dim = graph.vertex_count();
    let mut matrix = DMatrix::zeros(dim, dim);
    for v in 0..dim {
        matrix[(v, v)] = graph.degree(v) as f64 * gamma;
        for &w in graph.neighbors(v) {
            matrix[(v, w)] = -gamma;
        }
    }
    Ok(DenseGenerator {
        matrix,
        gamma,
        role,
    })
}

pub fn classical_generator(graph: &GluedTreeGraph, gamma: f64) -> Result<DenseGenerator> {
    dense_matrix(graph, gamma, MatrixRole::MarkovGenerator)
}

pub fn quantum_hamiltonian_full(graph: &GluedTreeGraph, gamma: f64) -> Result<DenseGenerator> {
    dense_matrix(graph, gamma, MatrixRole::Hamiltonian)
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "times must be finite and non-negative, got {t}"
        )));
    }
    Ok(())
}

fn check_probability(p: &[f64], dim: usize) -> Result<()> {
    if p.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.len(),
        });
    }
    if p.iter().any(|x| *x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidParameter(
            "probability vector has negative or non-finite entries".into(),
        ));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "probability vector sums to {total}, not 1"
        )));
    }
    Ok(())
}

/// `p(t) = exp(-M t) p0` by diagonalizing the symmetric generator once.
pub fn classical_evolve_full(
    generator: &DenseGenerator,
    p0: &[f64],
    times: &[f64],
) -> Result<Vec<Vec<f64>>> {
    check_probability(p0, generator.dim())?;
    check_times(times)?;
    let eig = SymmetricEigen::new(generator.matrix.clone());
    let coeffs = eig.eigenvectors.transpose() * DVector::from_column_slice(p0);
    Ok(times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return p0.to_vec();
            }
            let weighted = DVector::from_iterator(
                coeffs.len(),
                coeffs
                    .iter()
                    .zip(eig.eigenvalues.iter())
                    .map(|(c, lambda)| c * (-lambda * t).exp()),
            );
            (&eig.eigenvectors * weighted).iter().copied().collect()
        })
        .collect())
}

/// `|psi(t)> = exp(-i H t) |psi0>` on the full graph (hbar = 1).
pub fn quantum_evolve_full(
    hamiltonian: &DenseGenerator,
    psi0: &[Complex64],
    times: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    let dim = hamiltonian.dim();
    if psi0.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: psi0.len(),
        });
    }
    let eig = SymmetricEigen::new(hamiltonian.matrix.clone());
    let vectors = &eig.eigenvectors;
    let coeffs: Vec<Complex64> = (0..dim)
        .map(|a| vectors.column(a).iter().zip(psi0).map(|(v, z)| z * v).sum())
        .collect();
    Ok(times
        .iter()
        .map(|&t| {
            let mut out = vec![Complex64::new(0.0, 0.0); dim];
            for (a, c) in coeffs.iter().enumerate() {
                let phase = Complex64::from_polar(1.0, -eig.eigenvalues[a] * t) * c;
                for (o, v) in out.iter_mut().zip(vectors.column(a).iter()) {
                    *o += phase * v;
                }
            }
            out
        })
        .collect())
}

/// Classical evolution on graphs too large for dense matrices: adaptive
/// step-doubling RK4 on the sparse generator, local tolerance `tol`.
pub fn classical_evolve_sparse(
    graph: &GluedTreeGraph,
    gamma: f64,
    p0: &[f64],
    times: &[f64],
    tol: f64,
) -> Result<Vec<Vec<f64>>> {
    check_gamma(gamma)?;
    check_probability(p0, graph.vertex_count())?;
    check_times(times)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }

    let rhs = |p: &[f64], out: &mut [f64]| {
        for (v, o) in out.iter_mut().enumerate() {
            let inflow: f64 = graph.neighbors(v).iter().map(|&w| p[w]).sum();
            *o = gamma * (inflow - graph.degree(v) as f64 * p[v]);
        }
    };

    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let mut results = vec![Vec::new(); times.len()];
    let mut state = p0.to_vec();
    let mut now = 0.0;
    let mut h = 0.1 / (6.0 * gamma);
    let mut stepper = Rk4::new(state.len());
    for idx in order {
        let target = times[idx];
        while target - now > 1e-14 * target.max(1.0) {
            let step = h.min(target - now);
            let (next, err) = stepper.doubled_step(&rhs, &state, step);
            let scale = (tol / err.max(f64::MIN_POSITIVE)).powf(0.2);
            if err <= tol {
                state = next;
                now += step;
                h = step * scale.clamp(0.2, 2.0) * 0.9;
            } else {
                h = step * (0.9 * scale).max(0.2);
            }
        }
        results[idx] = state.clone();
    }
    Ok(results)
}

struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(dim: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            tmp: vec![0.0; dim],
        }
    }

    fn step<F: Fn(&[f64], &mut [f64])>(&mut self, f: &F, y: &[f64], h: f64) -> Vec<f64> {
        let [k1, k2, k3, k4] = &mut self.k;
        f(y, k1);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        f(&self.tmp, k2);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        f(&self.tmp, k3);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + h * k3[i];
        }
        f(&self.tmp, k4);
        (0..y.len())
            .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect()
    }

    /// One step of size `h` against two of size `h / 2`; returns the
    /// Richardson-extrapolated state and the max-norm error estimate.
    fn doubled_step<F: Fn(&[f64], &mut [f64])>(
        &mut self,
        f: &F,
        y: &[f64],
        h: f64,
    ) -> (Vec<f64>, f64) {
        let full = self.step(f, y, h);
        let half = self.step(f, y, 0.5 * h);
        let two_half = self.step(f, &half, 0.5 * h);
        let mut err = 0.0_f64;
        let out = two_half
            .iter()
            .zip(&full)
            .map(|(a, b)| {
                let diff = (a - b) / 15.0;
                err = err.max(diff.abs());
                a + diff
            })
            .collect();
        (out, err)
    }
}
