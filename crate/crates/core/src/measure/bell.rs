use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, vec_row_major, ComplexVector};
use crate::lindblad::{vectorize, DensityMatrix};
use crate::pauli::PauliString;

use super::substitute::pauli_trace;

/// Amplitude of `|ρ⟩` on the Pauli-indexed Bell vector: `Tr(Pρ) / (2^{n/2} √Tr ρ²)`.
pub fn bell_amplitude(rho: &DensityMatrix, p: &PauliString) -> Result<Complex64> {
    if p.n() != rho.n() {
        return Err(Error::DimensionMismatch { expected: rho.n(), found: p.n() });
    }
    let scale = (rho.dim() as f64).sqrt() * rho.purity().sqrt();
    Ok(pauli_trace(p, rho.matrix()) / scale)
}

/// `(P ⊗ I)|Φ⁺⟩` in the row-major vectorization, i.e. `vec(P)/√(2^n)`.
pub fn bell_vector(p: &PauliString) -> Result<ComplexVector> {
    let m = p.to_matrix()?;
    let d = m.nrows() as f64;
    Ok(vec_row_major(&m) / c(d.sqrt(), 0.0))
}

/// `⟨b_P|ρ⟩` by a direct inner product on the vectorized state.
pub fn bell_amplitude_direct(rho: &DensityMatrix, p: &PauliString) -> Result<Complex64> {
    if p.n() != rho.n() {
        return Err(Error::DimensionMismatch { expected: rho.n(), found: p.n() });
    }
    Ok(bell_vector(p)?.dotc(vectorize(rho).amplitudes()))
}
