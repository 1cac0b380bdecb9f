//! Symmetric tridiagonal eigensolvers.
//!
//! Eigenvalues always come from implicit-shift QL. Eigenvectors are obtained
//! either by accumulating the QL rotations ([`eigh_tridiagonal_ql`], O(n^3))
//! or by inverse iteration on the converged eigenvalues
//! ([`eigh_tridiagonal`], O(n^2) plus reorthogonalization inside clusters of
//! close eigenvalues). The second is the production path; the first is kept
//! as an independent reference.

use crate::error::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Components below this fraction of the peak are treated as zero when
/// fixing eigenvector signs. Localized states have leading components at
/// round-off level whose sign is not reproducible between algorithms.
pub const SIGN_THRESHOLD: f64 = 1e-6;

/// Eigenvalues in ascending order together with the matching orthonormal
/// eigenvectors, stored row-major: row `a` is the eigenvector of `values[a]`.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub dim: usize,
}

impl TridiagonalEigen {
    pub fn vector(&self, index: usize) -> &[f64] {
        &self.vectors[index * self.dim..(index + 1) * self.dim]
    }
}

/// Diagonalize by implicit QL with accumulated rotations.
///
/// Each eigenvector's sign is fixed so that its first component of
/// magnitude above `SIGN_THRESHOLD * max|v|` is positive.
pub fn eigh_tridiagonal_ql(diag: &[f64], off: &[f64]) -> Result<TridiagonalEigen> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: off.len(),
        });
    }

    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);

    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::NoConvergence { index: l });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;

            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let (lo, hi) = z.split_at_mut((i + 1) * n);
                let row_i = &mut lo[i * n..];
                let row_next = &mut hi[..n];
                rotate_rows(&mut row_i[..n], row_next, c, s);
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        values.push(d[k]);
        let row = &z[k * n..(k + 1) * n];
        let sign = leading_sign(row);
        vectors.extend(row.iter().map(|v| sign * v));
    }

    Ok(TridiagonalEigen {
        values,
        vectors,
        dim: n,
    })
}

/// Diagonalize the real symmetric tridiagonal matrix with diagonal `diag`
/// and sub/super-diagonal `off` (`off[i]` couples sites `i` and `i + 1`).
///
/// Eigenvalues come from QL; each eigenvector from inverse iteration with a
/// pivoted LU of `T - lambda I`, reorthogonalized against every earlier
/// vector whose eigenvalue lies within `CLUSTER_TOL * ||T||`. Sign
/// convention as in [`eigh_tridiagonal_ql`].
pub fn eigh_tridiagonal(diag: &[f64], off: &[f64]) -> Result<TridiagonalEigen> {
    let values = eigvals_tridiagonal(diag, off)?;
    let n = diag.len();
    let norm = diag
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { off[i].abs() } else { 0.0 };
            d.abs() + left + right
        })
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let cluster_width = CLUSTER_TOL * norm;
    let separation = 10.0 * f64::EPSILON * norm;
    let tiny = f64::EPSILON * norm;

    let mut vectors = vec![0.0; n * n];
    let mut lu = TridiagonalLu::with_capacity(n);
    let mut shift_prev = f64::NEG_INFINITY;
    let mut cluster_start = 0;
    let mut x = vec![0.0; n];

    for a in 0..n {
        let lambda = values[a];
        while values[a] - values[cluster_start] > cluster_width {
            cluster_start += 1;
        }
        // Coincident eigenvalues would give identical iterates; nudge apart.
        let shift = if lambda - shift_prev < separation {
            shift_prev + separation
        } else {
            lambda
        };
        shift_prev = shift;

        lu.factor(diag, off, shift, tiny);
        start_vector(a, &mut x);
        let (done, _) = vectors.split_at_mut(a * n);
        for _ in 0..INVERSE_ITERATIONS {
            lu.solve(&mut x);
            for k in cluster_start..a {
                let v = &done[k * n..(k + 1) * n];
                let proj: f64 = dot(v, &x);
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi -= proj * vi;
                }
            }
            let norm_x = dot(&x, &x).sqrt();
            if !(norm_x.is_finite() && norm_x > 0.0) {
                return Err(Error::NoConvergence { index: a });
            }
            x.iter_mut().for_each(|xi| *xi /= norm_x);
        }
        let sign = leading_sign(&x);
        for (dst, xi) in vectors[a * n..(a + 1) * n].iter_mut().zip(&x) {
            *dst = sign * xi;
        }
    }

    Ok(TridiagonalEigen {
        values,
        vectors,
        dim: n,
    })
}

/// Relative eigenvalue window inside which inverse-iteration vectors are
/// explicitly reorthogonalized. Pairs further apart than this are orthogonal
/// to roughly `eps / CLUSTER_TOL`.
const CLUSTER_TOL: f64 = 1e-4;
const INVERSE_ITERATIONS: usize = 4;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Deterministic pseudo-random start vector in [-1, 1).
fn start_vector(index: usize, x: &mut [f64]) {
    let mut state = 0x9E37_79B9_7F4A_7C15_u64 ^ (index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    for xi in x.iter_mut() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        *xi = (state >> 11) as f64 * (2.0 / (1u64 << 53) as f64) - 1.0;
    }
}

/// Gaussian elimination with partial pivoting for `T - shift I`.
///
/// Row `i` of `U` is `(u0[i], u1[i], u2[i])` at columns `i, i+1, i+2`; the
/// multiplier `mult[i]` eliminates below row `i`, after swapping rows `i` and
/// `i+1` when `swapped[i]`.
struct TridiagonalLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn with_capacity(n: usize) -> Self {
        Self {
            u0: vec![0.0; n],
            u1: vec![0.0; n],
            u2: vec![0.0; n],
            mult: vec![0.0; n],
            swapped: vec![false; n],
        }
    }

    fn factor(&mut self, diag: &[f64], off: &[f64], shift: f64, tiny: f64) {
        let n = diag.len();
        let mut p = diag[0] - shift;
        let mut q = if n > 1 { off[0] } else { 0.0 };
        for i in 0..n - 1 {
            let below = off[i];
            let next_diag = diag[i + 1] - shift;
            let next_off = if i + 2 < n { off[i + 1] } else { 0.0 };
            if p.abs() >= below.abs() {
                let pivot = if p.abs() < tiny { tiny.copysign(p) } else { p };
                let m = below / pivot;
                self.u0[i] = pivot;
                self.u1[i] = q;
                self.u2[i] = 0.0;
                self.mult[i] = m;
                self.swapped[i] = false;
                p = next_diag - m * q;
                q = next_off;
            } else {
                let m = p / below;
                self.u0[i] = below;
                self.u1[i] = next_diag;
                self.u2[i] = next_off;
                self.mult[i] = m;
                self.swapped[i] = true;
                p = q - m * next_diag;
                q = -m * next_off;
            }
        }
        self.u0[n - 1] = if p.abs() < tiny { tiny.copysign(p) } else { p };
        self.u1[n - 1] = 0.0;
        self.u2[n - 1] = 0.0;
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.mult[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            if i + 1 < n {
                acc -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * x[i + 2];
            }
            x[i] = acc / self.u0[i];
        }
    }
}

/// Only the eigenvalues, ascending. O(n^2).
pub fn eigvals_tridiagonal(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Apply the plane rotation `(a, b) <- (c a - s b, s a + c b)` elementwise.
///
/// On x86_64 hosts with AVX2 the same scalar code is compiled a second time
/// with 256-bit vectors enabled. No FMA is enabled, so both paths round
/// identically and results do not depend on the host.
fn rotate_rows(a: &mut [f64], b: &mut [f64], c: f64, s: f64) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was detected at runtime just above.
            unsafe { rotate_rows_avx2(a, b, c, s) };
            return;
        }
    }
    rotate_rows_generic(a, b, c, s);
}

#[inline(always)]
fn rotate_rows_generic(a: &mut [f64], b: &mut [f64], c: f64, s: f64) {
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let f = *y;
        *y = s * *x + c * f;
        *x = c * *x - s * f;
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn rotate_rows_avx2(a: &mut [f64], b: &mut [f64], c: f64, s: f64) {
    rotate_rows_generic(a, b, c, s);
}

fn leading_sign(v: &[f64]) -> f64 {
    let max = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let floor = SIGN_THRESHOLD * max;
    match v.iter().find(|x| x.abs() > floor) {
        Some(x) if *x < 0.0 => -1.0,
        _ => 1.0,
    }
}
