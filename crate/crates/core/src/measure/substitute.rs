use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, kron, ComplexMatrix};
use crate::lindblad::{vectorize, DensityMatrix};
use crate::pauli::{PauliString, PauliSum};

use super::table::{build_table, SubstituteTable};

/// Shared, lazily built copy of the 2-qubit table.
pub fn table() -> &'static SubstituteTable {
    static TABLE: OnceLock<SubstituteTable> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

/// One observable term `g·P` and its unitary substitute `Q`.
#[derive(Clone, Debug)]
pub struct SubstituteTerm {
    pub weight: Complex64,
    pub source: PauliString,
    pub q: PauliSum,
}

/// Term-by-term substitute `B = Σ g_i Q_i` of an observable on `2n` qubits.
#[derive(Clone, Debug)]
pub struct Substitution {
    n: usize,
    terms: Vec<SubstituteTerm>,
}

impl Substitution {
    /// System size; the substitutes act on `2n` qubits (copy 1, then copy 2).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[SubstituteTerm] {
        &self.terms
    }

    pub fn total(&self) -> PauliSum {
        let mut out = PauliSum::zero(2 * self.n);
        for t in &self.terms {
            out = &out + &t.q.scale(t.weight);
        }
        out
    }
}

/// Substitute of a single `2n`-qubit Pauli word. Row qubit `k` pairs with
/// column qubit `k`; the pair's table entry acts on qubit `k` of each copy.
pub fn substitute_string(p: &PauliString) -> Result<PauliSum> {
    if !p.n().is_multiple_of(2) {
        return Err(Error::Shape(format!("substitution pairs row and column qubits; got {} qubits", p.n())));
    }
    let n = p.n() / 2;
    let t = table();
    // Partial products over the first k pairs: (weight, copy-1 word, copy-2 word).
    let mut partial: Vec<(Complex64, PauliString, PauliString)> =
        vec![(c(1.0, 0.0), PauliString::identity(0), PauliString::identity(0))];
    for k in 0..n {
        let b = t.pair(p.letter(k), p.letter(n + k));
        let mut next = Vec::with_capacity(partial.len() * b.len());
        for (w, s1, s2) in &partial {
            for (pair, v) in b.iter() {
                let (l1, l2) = pair.split_at(1);
                next.push((w * v, s1.tensor(&l1), s2.tensor(&l2)));
            }
        }
        partial = next;
    }
    let mut out = PauliSum::zero(2 * n);
    for (w, s1, s2) in partial {
        out.add_term(s1.tensor(&s2), w);
    }
    Ok(out)
}

pub fn substitute(a: &PauliSum) -> Result<Substitution> {
    if !a.n().is_multiple_of(2) {
        return Err(Error::Shape(format!("substitution pairs row and column qubits; got {} qubits", a.n())));
    }
    let terms = a
        .iter()
        .map(|(p, g)| Ok(SubstituteTerm { weight: *g, source: *p, q: substitute_string(p)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(Substitution { n: a.n() / 2, terms })
}

/// `Tr(P ρ)` for a Pauli word, from its single nonzero entry per column.
pub fn pauli_trace(p: &PauliString, rho: &ComplexMatrix) -> Complex64 {
    (0..rho.nrows())
        .map(|col| {
            let (row, v) = p.action(col);
            v * rho[(col, row)]
        })
        .sum()
}

/// `Tr(Q ρ⊗ρ)` for a sum on two copies, factorized per term.
pub fn pair_trace(q: &PauliSum, rho: &ComplexMatrix) -> Complex64 {
    let n = q.n() / 2;
    q.iter()
        .map(|(s, w)| {
            let (s1, s2) = s.split_at(n);
            w * pauli_trace(&s1, rho) * pauli_trace(&s2, rho)
        })
        .sum()
}

fn check_observable(a: &PauliSum, rho: &DensityMatrix) -> Result<()> {
    if a.n() != 2 * rho.n() {
        return Err(Error::DimensionMismatch { expected: 2 * rho.n(), found: a.n() });
    }
    if !a.is_hermitian(1e-12) {
        return Err(Error::Validation("observable must be Hermitian".into()));
    }
    Ok(())
}

/// `Tr(B ρ⊗ρ)` evaluated with the dense substitute and dense `ρ⊗ρ`.
pub fn exact_numerator(a: &PauliSum, rho: &DensityMatrix) -> Result<Complex64> {
    check_observable(a, rho)?;
    let b = substitute(a)?.total().to_matrix()?;
    let rr = kron(rho.matrix(), rho.matrix());
    Ok(b.iter().zip(rr.transpose().iter()).map(|(x, y)| x * y).sum())
}

/// `⟨ρ|A|ρ⟩` computed from `ρ` alone as `Tr(B ρ⊗ρ) / Tr(ρ²)`.
pub fn exact_expectation(a: &PauliSum, rho: &DensityMatrix) -> Result<f64> {
    let num = exact_numerator(a, rho)?;
    if num.im.abs() > 1e-11 * num.norm().max(1.0) {
        return Err(Error::Consistency(format!("numerator has imaginary part {:e}", num.im)));
    }
    Ok(num.re / rho.purity())
}

/// `⟨ρ|A|ρ⟩` on the normalized vectorized state.
pub fn direct_expectation(a: &PauliSum, rho: &DensityMatrix) -> Result<f64> {
    check_observable(a, rho)?;
    let v = vectorize(rho);
    let amp = v.amplitudes();
    Ok(amp.dotc(&(a.to_matrix()? * amp)).re)
}
