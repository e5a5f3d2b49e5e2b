//! Dense complex linear algebra helpers. Matrices are nalgebra types; the
//! decompositions run through faer.

use std::sync::atomic::{AtomicUsize, Ordering};

use faer::{Mat, MatRef, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Default cap on the number of qubits a dense matrix may span.
pub const DEFAULT_DENSE_CAP: usize = 12;

static DENSE_CAP: AtomicUsize = AtomicUsize::new(0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Current dense cap: an explicit [`set_dense_cap`] wins, then `LG_DENSE_CAP`,
/// then [`DEFAULT_DENSE_CAP`].
pub fn dense_cap() -> usize {
    match DENSE_CAP.load(Ordering::Relaxed) {
        0 => std::env::var("LG_DENSE_CAP")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_DENSE_CAP),
        v => v,
    }
}

pub fn set_dense_cap(qubits: usize) {
    DENSE_CAP.store(qubits, Ordering::Relaxed);
}

pub fn check_dense(qubits: usize) -> Result<()> {
    let cap = dense_cap();
    if qubits > cap {
        Err(Error::Capacity { qubits, cap })
    } else {
        Ok(())
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// `‖U†U − I‖_max`.
pub fn unitarity_error(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let id = ComplexMatrix::identity(u.nrows(), u.ncols());
    max_abs_diff(&(u.adjoint() * u), &id)
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Row-major flattening: entry `(i, j)` lands at `i·d + j`.
pub fn vec_row_major(m: &ComplexMatrix) -> ComplexVector {
    let (r, cols) = m.shape();
    ComplexVector::from_iterator(r * cols, m.transpose().iter().copied())
}

pub fn unvec_row_major(v: &ComplexVector, d: usize) -> ComplexMatrix {
    assert_eq!(v.len(), d * d);
    ComplexMatrix::from_row_slice(d, d, v.as_slice())
}

fn to_faer(m: &ComplexMatrix) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: MatRef<'_, Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    if m.nrows() == 0 {
        return (Vec::new(), m.clone());
    }
    let herm = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = to_faer(&herm).self_adjoint_eigen(Side::Lower).expect("Hermitian eigensolver converges");
    let raw: Vec<f64> = eig.S().column_vector().iter().map(|v| v.re).collect();
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
    let u = eig.U();
    let values = order.iter().map(|&k| raw[k]).collect();
    let vectors = ComplexMatrix::from_fn(m.nrows(), order.len(), |r, col| u[(r, order[col])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Eigenvalues and unit-norm right eigenvectors (columns) of a general complex matrix.
pub fn eigen(m: &ComplexMatrix) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    if m.nrows() == 0 {
        return Ok((Vec::new(), m.clone()));
    }
    let eig = to_faer(m).eigen().map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))?;
    let values: Vec<Complex64> = eig.S().column_vector().iter().copied().collect();
    let mut v = from_faer(eig.U());
    for mut col in v.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= c(nrm, 0.0);
        }
    }
    Ok((values, v))
}

/// 2-norm condition number from singular values.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let sv = singular_values(m);
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD converges")
}

pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Orthonormal basis of the right null space: right singular vectors with
/// `σ < rel_tol · σ_max`, plus the `cols − rows` directions a wide matrix
/// cannot see. A zero matrix has the whole space as null space.
pub fn null_space(m: &ComplexMatrix, rel_tol: f64) -> Vec<ComplexVector> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    let svd = to_faer(m).svd().expect("SVD converges");
    let s: Vec<f64> = svd.S().column_vector().iter().map(|v| v.re).collect();
    let v = svd.V();
    let smax = s.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_tol * smax;
    (0..cols)
        .filter(|&k| smax == 0.0 || s.get(k).is_none_or(|&sk| sk < cutoff))
        .map(|k| ComplexVector::from_fn(cols, |r, _| v[(r, k)]))
        .collect()
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).into_iter().sum()
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    let d = m.nrows();
    let norm = m.iter().map(|v| v.norm()).sum::<f64>().max(max_abs(m));
    let mut s = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        s += 1;
    }
    let a = m * c(scale, 0.0);
    let mut result = ComplexMatrix::identity(d, d);
    let mut term = ComplexMatrix::identity(d, d);
    for k in 1..=18 {
        term = &term * &a * c(1.0 / k as f64, 0.0);
        result += &term;
        if max_abs(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// Roots of `Σ coeffs[k] x^k`; leading zeros are trimmed.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let scale = coeffs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].abs() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    if deg == 1 {
        return vec![c(-coeffs[0] / lead, 0.0)];
    }
    if deg == 2 {
        let (a, b, cc) = (lead, coeffs[1], coeffs[0]);
        let disc = Complex64::new(b * b - 4.0 * a * cc, 0.0).sqrt();
        // Numerically stable pair.
        let q = if b >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
        if q.norm() == 0.0 {
            return vec![c(0.0, 0.0), c(0.0, 0.0)];
        }
        return vec![q / a, cc / q];
    }
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for k in 0..deg {
        comp[(0, k)] = -coeffs[deg - 1 - k] / lead;
    }
    for k in 1..deg {
        comp[(k, k - 1)] = 1.0;
    }
    comp.complex_eigenvalues().iter().copied().collect()
}
