//! Seeded random instances: matrices, states, unitaries and Lindblad problems.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, ComplexMatrix, ComplexVector};
use crate::lindblad::{DensityMatrix, Jump, LmeSpec};
use crate::pauli::{Pauli, PauliString, PauliSum};

fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Ginibre matrix with standard complex Gaussian entries.
pub fn complex_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| c(gauss(rng), gauss(rng)))
}

pub fn hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = complex_matrix(d, rng);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// Haar-random unitary from the QR of a Ginibre matrix with phase fix.
pub fn unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = complex_matrix(d, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let v = r[(k, k)];
        let phase = if v.norm() > 0.0 { v / v.norm() } else { c(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

pub fn pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| c(gauss(rng), gauss(rng)));
    let n = v.norm();
    v / c(n, 0.0)
}

/// Full-rank mixed state `G G† / Tr(G G†)`.
pub fn density_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let d = 1 << n;
    let g = complex_matrix(d, rng);
    let m = &g * g.adjoint();
    DensityMatrix::new(n, m).expect("random density matrix is valid")
}

pub fn pure_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let v = pure_state(1 << n, rng);
    DensityMatrix::new(n, &v * v.adjoint()).expect("pure state is valid")
}

pub fn pauli_string<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliString {
    let letters: Vec<Pauli> = (0..n).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect();
    PauliString::from_letters(&letters).expect("width within limit")
}

/// Hermitian sum of `terms` random strings with real weights in `[-1, 1)`.
pub fn hermitian_sum<R: Rng + ?Sized>(n: usize, terms: usize, rng: &mut R) -> PauliSum {
    let mut s = PauliSum::zero(n);
    for _ in 0..terms {
        s.add_term(pauli_string(n, rng), c(rng.random_range(-1.0..1.0), 0.0));
    }
    s
}

/// General complex sum of `terms` random strings.
pub fn complex_sum<R: Rng + ?Sized>(n: usize, terms: usize, rng: &mut R) -> PauliSum {
    let mut s = PauliSum::zero(n);
    for _ in 0..terms {
        s.add_term(pauli_string(n, rng), c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    }
    s
}

/// Random Lindblad problem: Hermitian `H` plus `jumps` generic complex channels.
/// Generic channels almost surely give a unique steady state.
pub fn lme_spec<R: Rng + ?Sized>(n: usize, jumps: usize, rng: &mut R) -> LmeSpec {
    let terms = 1 << (2 * n).min(4);
    let hamiltonian = hermitian_sum(n, terms.min(6), rng);
    let jumps = (0..jumps).map(|_| Jump { rate: rng.random_range(0.1..1.0), op: complex_sum(n, 3, rng) }).collect();
    LmeSpec::new(n, hamiltonian, jumps).expect("random spec is valid")
}
