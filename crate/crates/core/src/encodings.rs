//! Concrete problem instances: the clock-register circuit LME, the block
//! Hamiltonian, the row/column exchange operator and conjugated observables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, check_dense, kron, unitarity_error, ComplexMatrix, ComplexVector};
use crate::lindblad::{exchange_matrix, DensityMatrix, Jump, LmeSpec, LmeSpecFile, SuperOp};
use crate::measure::{estimate_expectation, exact_expectation, MeasurementPlan};
use crate::pauli::{ladder, pauli_decompose, PauliSum};

const UNITARY_TOL: f64 = 1e-10;

/// A circuit `U_T ⋯ U_1` acting on `|0…0⟩`, each layer an explicit unitary.
#[derive(Clone, Debug)]
pub struct CircuitSpec {
    n: usize,
    layers: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct CircuitFile {
    n: usize,
    layers: Vec<Vec<Vec<(f64, f64)>>>,
}

impl CircuitSpec {
    pub fn new(n: usize, layers: Vec<ComplexMatrix>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("circuit needs at least one qubit".into()));
        }
        if layers.is_empty() {
            return Err(Error::Validation("circuit needs at least one layer".into()));
        }
        check_dense(n)?;
        let d = 1usize << n;
        for (t, u) in layers.iter().enumerate() {
            if u.shape() != (d, d) {
                return Err(Error::DimensionMismatch { expected: d, found: u.nrows() });
            }
            let err = unitarity_error(u);
            if !(err <= UNITARY_TOL) {
                return Err(Error::Validation(format!("layer {} is not unitary (error {err:e})", t + 1)));
            }
        }
        Ok(CircuitSpec { n, layers })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of layers `T`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[ComplexMatrix] {
        &self.layers
    }

    /// `|ψ_0⟩, …, |ψ_T⟩` with `|ψ_t⟩ = U_t|ψ_{t−1}⟩`.
    pub fn states(&self) -> Vec<ComplexVector> {
        let d = 1usize << self.n;
        let mut psi = ComplexVector::zeros(d);
        psi[0] = c(1.0, 0.0);
        let mut out = vec![psi.clone()];
        for u in &self.layers {
            psi = u * psi;
            out.push(psi.clone());
        }
        out
    }

    /// Probability that qubit 0 reads `1` in the final state.
    pub fn final_p1(&self) -> f64 {
        let psi = self.states().pop().expect("at least one state");
        let half = psi.len() / 2;
        psi.iter().skip(half).map(|a| a.norm_sqr()).sum()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: CircuitFile = serde_json::from_str(text)?;
        let layers = f
            .layers
            .iter()
            .map(|rows| {
                let d = rows.len();
                if rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Shape("layer matrix must be square".into()));
                }
                Ok(ComplexMatrix::from_fn(d, d, |i, j| c(rows[i][j].0, rows[i][j].1)))
            })
            .collect::<Result<Vec<_>>>()?;
        CircuitSpec::new(f.n, layers)
    }

    pub fn to_json(&self) -> String {
        let layers = self
            .layers
            .iter()
            .map(|u| (0..u.nrows()).map(|i| (0..u.ncols()).map(|j| (u[(i, j)].re, u[(i, j)].im)).collect()).collect())
            .collect();
        serde_json::to_string_pretty(&CircuitFile { n: self.n, layers }).expect("plain data serializes")
    }

    pub fn read(path: &Path) -> Result<Self> {
        CircuitSpec::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Qubits needed for a register of dimension `dim` (at least one).
pub fn clock_qubits(dim: usize) -> usize {
    (usize::BITS - (dim.max(2) - 1).leading_zeros()) as usize
}

/// Circuit LME on system qubits `0..n` followed by the clock qubits.
#[derive(Clone, Debug)]
pub struct ClockLme {
    spec: LmeSpec,
    n_system: usize,
    depth: usize,
}

impl ClockLme {
    pub fn spec(&self) -> &LmeSpec {
        &self.spec
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn clock_qubits(&self) -> usize {
        clock_qubits(self.depth + 1)
    }

    /// `T + 1`.
    pub fn clock_dim(&self) -> usize {
        self.depth + 1
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn to_file(&self) -> LmeSpecFile {
        LmeSpecFile::from_spec(&self.spec, Some(self.clock_dim()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("plain data serializes")
    }
}

/// `|a⟩⟨b|` on the qubits `first..first+width` of an `n`-qubit register.
fn clock_outer(n: usize, first: usize, width: usize, a: usize, b: usize) -> PauliSum {
    let mut out = PauliSum::identity(n);
    for k in 0..width {
        let bit = |v: usize| (v >> (width - 1 - k)) & 1 == 1;
        let q = first + k;
        let factor = match (bit(a), bit(b)) {
            (false, false) => ladder::projector(n, q, false),
            (true, true) => ladder::projector(n, q, true),
            (false, true) => ladder::lowering(n, q),
            (true, false) => ladder::raising(n, q),
        };
        out = &out * &factor;
    }
    out
}

/// Jumps: a reset `|0⟩⟨1|_i ⊗ |0⟩⟨0|` per system qubit, a forward hop
/// `U_{t+1} ⊗ |t+1⟩⟨t|` and its adjoint as a separate backward hop for
/// `t = 0..T−1`, and `I ⊗ |0⟩⟨p|` for every padding clock state `p > T`.
/// No Hamiltonian; all rates 1.
///
/// Summing the two hops into one Hermitian operator leaves the history state
/// `Σ_t |ψ_t⟩|t⟩` dark when `T = 1`, so the steady state would not be unique.
pub fn circuit_to_lme(circuit: &CircuitSpec) -> Result<ClockLme> {
    let n = circuit.n;
    let depth = circuit.depth();
    let q = clock_qubits(depth + 1);
    let total = n + q;
    check_dense(2 * total)?;
    let sys_id = PauliSum::identity(n);
    let outer = |a, b| clock_outer(q, 0, q, a, b);

    let mut jumps = Vec::new();
    for i in 0..n {
        jumps.push(Jump { rate: 1.0, op: ladder::lowering(n, i).tensor(&outer(0, 0)) });
    }
    for (t, u) in circuit.layers.iter().enumerate() {
        let up = pauli_decompose(u)?;
        jumps.push(Jump { rate: 1.0, op: up.tensor(&outer(t + 1, t)) });
        jumps.push(Jump { rate: 1.0, op: up.adjoint().tensor(&outer(t, t + 1)) });
    }
    for p in depth + 1..1usize << q {
        jumps.push(Jump { rate: 1.0, op: sys_id.tensor(&outer(0, p)) });
    }
    let spec = LmeSpec::new(total, PauliSum::zero(total), jumps)?;
    Ok(ClockLme { spec, n_system: n, depth })
}

/// `(1/(T+1)) Σ_t |ψ_t⟩⟨ψ_t| ⊗ |t⟩⟨t|` from direct statevector simulation.
pub fn feynman_steady_state(circuit: &CircuitSpec) -> Result<DensityMatrix> {
    let depth = circuit.depth();
    let q = clock_qubits(depth + 1);
    check_dense(circuit.n + q)?;
    let dc = 1usize << q;
    let mut rho = ComplexMatrix::zeros((1 << circuit.n) * dc, (1 << circuit.n) * dc);
    for (t, psi) in circuit.states().iter().enumerate() {
        let mut tag = ComplexMatrix::zeros(dc, dc);
        tag[(t, t)] = c(1.0 / (depth + 1) as f64, 0.0);
        rho += kron(&(psi * psi.adjoint()), &tag);
    }
    DensityMatrix::new(circuit.n + q, rho)
}

/// `O = Z_0 ⊗ |T⟩⟨T|` on the row register, identity on the column register.
pub fn p1_observable(n_system: usize, depth: usize) -> PauliSum {
    let q = clock_qubits(depth + 1);
    let total = n_system + q;
    let z0 = PauliSum::from_string(
        crate::pauli::PauliString::with_letters(n_system, &[(0, crate::pauli::Pauli::Z)]),
        c(1.0, 0.0),
    );
    let row = z0.tensor(&clock_outer(q, 0, q, depth, depth));
    row.tensor(&PauliSum::identity(total))
}

/// Plan for the sampled `p₁` path, sized with the known purity `1/(T+1)`.
pub fn p1_plan(n_system: usize, depth: usize, epsilon: f64, seed: u64) -> Result<MeasurementPlan> {
    MeasurementPlan::with_budget(p1_observable(n_system, depth), 1.0 / (depth + 1) as f64, epsilon, seed)
}

#[derive(Clone, Copy, Debug)]
pub enum P1Method<'a> {
    Exact,
    Sampled(&'a MeasurementPlan),
}

/// `p₁ = (1 − (T+1)⟨ρ|O|ρ⟩)/2` for a clock steady state.
pub fn p1_from_steady(rho: &DensityMatrix, depth: usize, via: P1Method<'_>) -> Result<f64> {
    let q = clock_qubits(depth + 1);
    if rho.n() <= q {
        return Err(Error::DimensionMismatch { expected: q + 1, found: rho.n() });
    }
    let expectation = match via {
        P1Method::Exact => exact_expectation(&p1_observable(rho.n() - q, depth), rho)?,
        P1Method::Sampled(plan) => {
            if plan.observable().n() != 2 * rho.n() {
                return Err(Error::DimensionMismatch { expected: 2 * rho.n(), found: plan.observable().n() });
            }
            estimate_expectation(plan, rho, 1.0 / (depth + 1) as f64)?.value
        }
    };
    Ok((1.0 - (depth + 1) as f64 * expectation) / 2.0)
}

/// `[[0, L], [L†, 0]]`.
pub fn block_hamiltonian(l: &SuperOp) -> Result<ComplexMatrix> {
    check_dense(2 * l.n() + 1)?;
    let d = l.dim();
    let mut h = ComplexMatrix::zeros(2 * d, 2 * d);
    h.view_mut((0, d), (d, d)).copy_from(l.matrix());
    h.view_mut((d, 0), (d, d)).copy_from(&l.matrix().adjoint());
    Ok(h)
}

/// Swap of row qubit `k` with column qubit `k` for every `k`: `S vec(M) = vec(Mᵀ)`.
pub fn exchange_operator(n: usize) -> Result<SuperOp> {
    check_dense(2 * n)?;
    SuperOp::new(n, exchange_matrix(n))
}

/// `U†AU` re-expressed as a Pauli sum.
pub fn clifford_conjugate_observable(a: &PauliSum, u: &ComplexMatrix) -> Result<PauliSum> {
    check_dense(a.n())?;
    let d = 1usize << a.n();
    if u.shape() != (d, d) {
        return Err(Error::DimensionMismatch { expected: d, found: u.nrows() });
    }
    let err = unitarity_error(u);
    if !(err <= UNITARY_TOL) {
        return Err(Error::Validation(format!("conjugating matrix is not unitary (error {err:e})")));
    }
    pauli_decompose(&(u.adjoint() * a.to_matrix()? * u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, max_abs_diff, singular_values, vec_row_major};
    use crate::lindblad::{build_ldl, build_liouvillian, steady_state, vectorize, verify_ldl_properties};
    use rand::SeedableRng;

    fn x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    fn hadamard() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
    }

    fn cnot() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            m[(r, col)] = c(1.0, 0.0);
        }
        m
    }

    #[test]
    fn clock_qubit_counts() {
        assert_eq!(clock_qubits(2), 1);
        assert_eq!(clock_qubits(3), 2);
        assert_eq!(clock_qubits(4), 2);
        assert_eq!(clock_qubits(5), 3);
    }

    #[test]
    fn x_circuit_steady_state() {
        let circ = CircuitSpec::new(1, vec![x()]).unwrap();
        let lme = circuit_to_lme(&circ).unwrap();
        assert_eq!(lme.spec().jumps().len(), 3);
        let l = build_liouvillian(lme.spec()).unwrap();
        let ss = steady_state(&l).unwrap();
        let rho = ss.unique().unwrap();
        let mut expect = ComplexMatrix::zeros(4, 4);
        expect[(0, 0)] = c(0.5, 0.0);
        expect[(3, 3)] = c(0.5, 0.0);
        assert!(max_abs_diff(rho.matrix(), &expect) < 1e-8);
        assert!((rho.purity() - 0.5).abs() < 1e-12);
        assert!((p1_from_steady(rho, 1, P1Method::Exact).unwrap() - 1.0).abs() < 1e-10);
        let o = p1_observable(1, 1);
        assert!((exact_expectation(&o, rho).unwrap() + 0.5).abs() < 1e-10);
    }

    #[test]
    fn identity_circuit() {
        let circ = CircuitSpec::new(1, vec![ComplexMatrix::identity(2, 2)]).unwrap();
        let rho = feynman_steady_state(&circ).unwrap();
        let mut expect = ComplexMatrix::zeros(4, 4);
        expect[(0, 0)] = c(0.5, 0.0);
        expect[(1, 1)] = c(0.5, 0.0);
        assert!(max_abs_diff(rho.matrix(), &expect) < 1e-15);
        assert!(p1_from_steady(&rho, 1, P1Method::Exact).unwrap().abs() < 1e-10);
    }

    #[test]
    fn hadamard_gives_half() {
        let circ = CircuitSpec::new(1, vec![hadamard()]).unwrap();
        let rho = feynman_steady_state(&circ).unwrap();
        assert!((p1_from_steady(&rho, 1, P1Method::Exact).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn bell_pattern_with_padding() {
        let h1 = kron(&hadamard(), &ComplexMatrix::identity(2, 2));
        let circ = CircuitSpec::new(2, vec![h1, cnot()]).unwrap();
        let lme = circuit_to_lme(&circ).unwrap();
        // 2 resets, 2 hop pairs, 1 padding state.
        assert_eq!(lme.spec().jumps().len(), 7);
        let l = build_liouvillian(lme.spec()).unwrap();
        let ss = steady_state(&l).unwrap();
        assert_eq!(ss.dim(), 1);
        let rho = ss.unique().unwrap();
        let feyn = feynman_steady_state(&circ).unwrap();
        assert!(rho.trace_distance(&feyn) < 1e-8);
        assert!((feyn.purity() - 1.0 / 3.0).abs() < 1e-12);
        assert!(l.residual(&vectorize(&feyn)) < 1e-9);
        let p1 = p1_from_steady(&feyn, 2, P1Method::Exact).unwrap();
        assert!((p1 - circ.final_p1()).abs() < 1e-10);
    }

    #[test]
    fn random_depth_three_purity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let layers = (0..3).map(|_| crate::random::unitary(4, &mut rng)).collect();
        let circ = CircuitSpec::new(2, layers).unwrap();
        let rho = feynman_steady_state(&circ).unwrap();
        assert!((rho.purity() - 0.25).abs() < 1e-12);
        let p1 = p1_from_steady(&rho, 3, P1Method::Exact).unwrap();
        assert!((p1 - circ.final_p1()).abs() < 1e-10);
    }

    #[test]
    fn random_circuits_have_unique_steady_state() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for (n, depth) in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 3)] {
            let layers = (0..depth).map(|_| crate::random::unitary(1 << n, &mut rng)).collect();
            let circ = CircuitSpec::new(n, layers).unwrap();
            let l = build_liouvillian(circuit_to_lme(&circ).unwrap().spec()).unwrap();
            let ss = steady_state(&l).unwrap();
            assert_eq!(ss.dim(), 1, "n = {n}, T = {depth}");
            let feyn = feynman_steady_state(&circ).unwrap();
            assert!(ss.unique().unwrap().trace_distance(&feyn) < 1e-8);
        }
    }

    #[test]
    fn clock_ldl_properties() {
        let circ = CircuitSpec::new(1, vec![x()]).unwrap();
        let lme = circuit_to_lme(&circ).unwrap();
        let ldl = build_ldl(lme.spec()).unwrap();
        assert!(verify_ldl_properties(&ldl.dense, Some(1)).passed());
    }

    #[test]
    fn rejects_bad_circuits() {
        let bad = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(CircuitSpec::new(1, vec![bad]), Err(Error::Validation(_))));
        assert!(CircuitSpec::new(1, vec![]).is_err());
        assert!(CircuitSpec::new(2, vec![x()]).is_err());
    }

    #[test]
    fn circuit_json_round_trip() {
        let circ = CircuitSpec::new(1, vec![hadamard(), x()]).unwrap();
        let back = CircuitSpec::from_json(&circ.to_json()).unwrap();
        assert_eq!(back.depth(), 2);
        assert!(max_abs_diff(&back.layers()[0], &hadamard()) < 1e-15);
        let lme = circuit_to_lme(&circ).unwrap();
        assert!(lme.to_json().contains("\"clock_dim\": 3"));
    }

    #[test]
    fn block_hamiltonian_zero_mode() {
        let spec = LmeSpec::new(1, PauliSum::zero(1), vec![Jump { rate: 1.0, op: ladder::lowering(1, 0) }]).unwrap();
        let l = build_liouvillian(&spec).unwrap();
        let h = block_hamiltonian(&l).unwrap();
        let rho = DensityMatrix::basis(1, 0);
        let mut v = ComplexVector::zeros(8);
        v.rows_mut(4, 4).copy_from(&vec_row_major(rho.matrix()));
        assert!((&h * &v).norm() < 1e-9);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let l = build_liouvillian(&crate::random::lme_spec(1, 2, &mut rng)).unwrap();
        let h = block_hamiltonian(&l).unwrap();
        let ev = hermitian_eigenvalues(&h);
        let mut sv: Vec<f64> = singular_values(l.matrix()).into_iter().flat_map(|s| [s, -s]).collect();
        sv.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&sv) {
            assert!((a - b).abs() < 1e-10);
        }
        let zero = SuperOp::new(1, ComplexMatrix::zeros(4, 4)).unwrap();
        assert_eq!(crate::linalg::max_abs(&block_hamiltonian(&zero).unwrap()), 0.0);
    }

    #[test]
    fn exchange_operator_transposes() {
        let s = exchange_operator(1).unwrap();
        let mut e01 = ComplexMatrix::zeros(2, 2);
        e01[(0, 1)] = c(1.0, 0.0);
        assert_eq!(s.apply(&vec_row_major(&e01)), vec_row_major(&e01.transpose()));

        let s2 = exchange_operator(2).unwrap();
        assert_eq!(s2.matrix() * s2.matrix(), ComplexMatrix::identity(16, 16));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let m = crate::random::complex_matrix(4, &mut rng);
        assert_eq!(s2.apply(&vec_row_major(&m)), vec_row_major(&m.transpose()));
    }

    #[test]
    fn conjugated_observables() {
        let a = PauliSum::from_labels(2, [(1.0, "ZI"), (0.5, "XY")]).unwrap();
        let same = clifford_conjugate_observable(&a, &ComplexMatrix::identity(4, 4)).unwrap();
        assert!(same.max_abs_diff(&a) < 1e-15);

        let z = PauliSum::from_labels(2, [(1.0, "ZI")]).unwrap();
        let xi = PauliSum::from_labels(2, [(1.0, "XI")]).unwrap().to_matrix().unwrap();
        let flipped = clifford_conjugate_observable(&z, &xi).unwrap();
        assert!(flipped.max_abs_diff(&z.scale_real(-1.0)) < 1e-15);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let u = crate::random::unitary(4, &mut rng);
        let a = crate::random::hermitian_sum(2, 5, &mut rng);
        let rho = crate::random::density_matrix(1, &mut rng);
        let ap = clifford_conjugate_observable(&a, &u).unwrap();
        let lhs = exact_expectation(&ap, &rho).unwrap();
        let w = u * vectorize(&rho).amplitudes();
        let rhs = w.dotc(&(a.to_matrix().unwrap() * &w)).re;
        assert!((lhs - rhs).abs() < 1e-10);

        let bad = ComplexMatrix::from_element(4, 4, c(1.0, 0.0));
        assert!(clifford_conjugate_observable(&a, &bad).is_err());
    }
}
