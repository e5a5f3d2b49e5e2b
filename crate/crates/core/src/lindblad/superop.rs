use crate::error::{Error, Result};
use crate::linalg::{c, check_dense, kron, max_abs, ComplexMatrix, ComplexVector};
use crate::pauli::PauliSum;

use super::spec::LmeSpec;
use super::state::{DensityMatrix, DmVector};

/// A dense superoperator of dimension `4^n` on vectorized `n`-qubit matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp {
    n: usize,
    matrix: ComplexMatrix,
}

impl SuperOp {
    pub fn new(n: usize, matrix: ComplexMatrix) -> Result<Self> {
        let d = 1usize << (2 * n);
        if matrix.shape() != (d, d) {
            return Err(Error::Shape(format!(
                "superoperator must be {d}x{d}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(SuperOp { n, matrix })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        &self.matrix * v
    }

    pub fn adjoint(&self) -> SuperOp {
        SuperOp { n: self.n, matrix: self.matrix.adjoint() }
    }

    /// `‖·‖_∞`, the largest absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.matrix.row_iter().map(|r| r.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// `‖L·|ρ⟩‖` for a normalized vectorized state.
    pub fn residual(&self, v: &DmVector) -> f64 {
        self.apply(v.amplitudes()).norm()
    }
}

/// Vectorized Liouvillian, row-major: `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)`.
pub fn build_liouvillian(spec: &LmeSpec) -> Result<SuperOp> {
    let n = spec.n();
    check_dense(2 * n)?;
    let d = 1usize << n;
    let id = ComplexMatrix::identity(d, d);
    let h = spec.hamiltonian().to_matrix()?;
    let mut l = (kron(&h, &id) - kron(&id, &h.transpose())) * c(0.0, -1.0);
    for j in spec.jumps() {
        if j.rate == 0.0 {
            continue;
        }
        let f = j.op.to_matrix()?;
        let fdf = f.adjoint() * &f;
        let term =
            kron(&f, &f.map(|v| v.conj())) - kron(&fdf, &id) * c(0.5, 0.0) - kron(&id, &fdf.transpose()) * c(0.5, 0.0);
        l += term * c(j.rate, 0.0);
    }
    SuperOp::new(n, l)
}

/// The Liouvillian as a Pauli sum on `2n` qubits (row qubits first).
pub fn liouvillian_pauli(spec: &LmeSpec) -> PauliSum {
    let n = spec.n();
    let id = PauliSum::identity(n);
    let h = spec.hamiltonian();
    let k = &h.tensor(&id) - &id.tensor(&h.transpose());
    let mut l = k.scale(c(0.0, -1.0));
    for j in spec.jumps() {
        let f = &j.op;
        let fdf = &f.adjoint() * f;
        let mut d = f.tensor(&f.conj());
        d = &d - &fdf.tensor(&id).scale_real(0.5);
        d = &d - &id.tensor(&fdf.transpose()).scale_real(0.5);
        l = &l + &d.scale_real(j.rate);
    }
    l
}

/// Right-hand side of the master equation applied directly to `ρ`.
pub fn lindblad_rhs(spec: &LmeSpec, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = spec.hamiltonian().to_matrix()?;
    let mut out = (&h * rho - rho * &h) * c(0.0, -1.0);
    for j in spec.jumps() {
        let f = j.op.to_matrix()?;
        let fd = f.adjoint();
        let fdf = &fd * &f;
        let anti = &fdf * rho + rho * &fdf;
        out += (&f * rho * &fd - anti * c(0.5, 0.0)) * c(j.rate, 0.0);
    }
    Ok(out)
}

/// Applies `L` to a density matrix and returns the devectorized result.
pub fn apply_to_density(l: &SuperOp, rho: &DensityMatrix) -> ComplexMatrix {
    let v = crate::linalg::vec_row_major(rho.matrix());
    crate::linalg::unvec_row_major(&l.apply(&v), rho.dim())
}
