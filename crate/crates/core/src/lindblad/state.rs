use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_eigenvalues, max_abs_diff, trace, unvec_row_major, vec_row_major, ComplexMatrix, ComplexVector,
};

/// Slack allowed on negative eigenvalues of a density matrix.
pub const PSD_SLACK: f64 = 1e-9;
const HERMITIAN_SLACK: f64 = 1e-10;

/// A `2^n x 2^n` Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and trace-normalizes `m`.
    pub fn new(n: usize, m: ComplexMatrix) -> Result<Self> {
        let d = 1usize << n;
        if m.shape() != (d, d) {
            return Err(Error::Shape(format!("expected {d}x{d}, got {}x{}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Validation("density matrix has non-finite entries".into()));
        }
        let tr = trace(&m);
        if tr.re <= 0.0 || tr.norm() < 1e-300 {
            return Err(Error::Normalization);
        }
        let m = m / c(tr.re, 0.0);
        if max_abs_diff(&m, &m.adjoint()) > HERMITIAN_SLACK {
            return Err(Error::Validation("density matrix is not Hermitian".into()));
        }
        let min = hermitian_eigenvalues(&m)[0];
        if min < -PSD_SLACK {
            return Err(Error::Validation(format!("density matrix has eigenvalue {min}")));
        }
        Ok(DensityMatrix { n, matrix: m })
    }

    /// Wraps a matrix without validation; used for integrator output.
    pub(crate) fn from_raw(n: usize, matrix: ComplexMatrix) -> Self {
        DensityMatrix { n, matrix }
    }

    pub fn pure(n: usize, psi: &ComplexVector) -> Result<Self> {
        DensityMatrix::new(n, psi * psi.adjoint())
    }

    /// Computational basis projector `|k><k|`.
    pub fn basis(n: usize, k: usize) -> Self {
        let d = 1 << n;
        let mut m = ComplexMatrix::zeros(d, d);
        m[(k, k)] = c(1.0, 0.0);
        DensityMatrix { n, matrix: m }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1 << n;
        DensityMatrix { n, matrix: ComplexMatrix::identity(d, d) / c(d as f64, 0.0) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = &self.matrix - &other.matrix;
        0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>()
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }
}

/// Normalized vectorization `|ρ⟩ = vec(ρ)/C_ρ` with `C_ρ = ‖ρ‖_F`.
#[derive(Clone, Debug, PartialEq)]
pub struct DmVector {
    n: usize,
    amplitudes: ComplexVector,
    norm_factor: f64,
}

impl DmVector {
    pub fn from_matrix(n: usize, m: &ComplexMatrix) -> Result<Self> {
        let d = 1usize << n;
        if m.shape() != (d, d) {
            return Err(Error::Shape(format!("expected {d}x{d}, got {}x{}", m.nrows(), m.ncols())));
        }
        let v = vec_row_major(m);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Normalization);
        }
        Ok(DmVector { n, amplitudes: v / c(norm, 0.0), norm_factor: norm })
    }

    /// Wraps a raw vector of length `4^n`, normalizing it.
    pub fn from_amplitudes(n: usize, v: ComplexVector) -> Result<Self> {
        if v.len() != 1 << (2 * n) {
            return Err(Error::DimensionMismatch { expected: 1 << (2 * n), found: v.len() });
        }
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Normalization);
        }
        Ok(DmVector { n, amplitudes: v / c(norm, 0.0), norm_factor: norm })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn norm_factor(&self) -> f64 {
        self.norm_factor
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DmVector) -> num_complex::Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &DmVector) -> f64 {
        self.inner(other).norm()
    }

    /// The source matrix, rescaled by `C_ρ`.
    pub fn restore(&self) -> ComplexMatrix {
        devectorize(self) * c(self.norm_factor, 0.0)
    }
}

pub fn vectorize(rho: &DensityMatrix) -> DmVector {
    DmVector::from_matrix(rho.n, &rho.matrix).expect("density matrix has unit trace")
}

/// Unit-Frobenius-norm matrix whose row-major entries are the amplitudes.
pub fn devectorize(v: &DmVector) -> ComplexMatrix {
    unvec_row_major(&v.amplitudes, 1 << v.n)
}
