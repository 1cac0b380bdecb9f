//! Independent oracles: matrix exponentials by scaling and squaring of a
//! Taylor series, no eigendecomposition involved.

#![allow(dead_code)]

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

fn expm<T>(a: &DMatrix<T>) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let dim = a.nrows();
    let norm = a.iter().map(|x| x.modulus()).fold(0.0, f64::max) * dim as f64;
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.map(|x| x * T::from_real(0.5f64.powi(squarings)));
    let mut term = DMatrix::<T>::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..=24 {
        term = &term * &scaled * T::from_real(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(-M t)` for a real generator.
pub fn expm_real(m: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    expm(&(m * -t))
}

/// `exp(-i H t)` for a real symmetric Hamiltonian.
pub fn propagator(h: &DMatrix<f64>, t: f64) -> DMatrix<Complex64> {
    expm(&h.map(|x| Complex64::new(0.0, -x * t)))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
