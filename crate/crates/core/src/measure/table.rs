//! The substitute map `B_{il,jk} = A_{ij,kl}` and its 16-entry 2-qubit table.

use num_complex::Complex64;

use crate::linalg::{c, eigen, unitarity_error, ComplexMatrix};
use crate::pauli::{pauli_decompose, Pauli, PauliString, PauliSum};

/// Dense substitute of an operator on a `2n`-qubit (row ⊗ column) register.
/// The result acts on two copies of the `n`-qubit system.
pub fn substitute_matrix(a: &ComplexMatrix) -> ComplexMatrix {
    let dd = a.nrows();
    assert!(a.is_square() && dd.is_power_of_two() && dd.trailing_zeros().is_multiple_of(2), "need a 2n-qubit operator");
    let n = dd.trailing_zeros() as usize / 2;
    let d = 1usize << n;
    let mut b = ComplexMatrix::zeros(dd, dd);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    b[((i << n) | l, (j << n) | k)] = a[((i << n) | j, (k << n) | l)];
                }
            }
        }
    }
    b
}

#[derive(Clone, Debug)]
pub struct TableEntry {
    pub a: PauliString,
    pub b: PauliSum,
    pub matrix: ComplexMatrix,
    pub eigenvalues: Vec<Complex64>,
}

/// Substitutes of all 16 two-qubit Pauli words, in canonical order of `A`.
#[derive(Clone, Debug)]
pub struct SubstituteTable {
    entries: Vec<TableEntry>,
}

impl SubstituteTable {
    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn get(&self, a: &PauliString) -> &TableEntry {
        assert_eq!(a.n(), 2, "table keys are 2-qubit words");
        &self.entries[code(a.letter(0)) * 4 + code(a.letter(1))]
    }

    /// Substitute of the pair `(row letter, column letter)`.
    pub fn pair(&self, row: Pauli, col: Pauli) -> &PauliSum {
        &self.entries[code(row) * 4 + code(col)].b
    }

    /// Largest `‖B†B − I‖` over the table.
    pub fn max_unitarity_error(&self) -> f64 {
        self.entries.iter().map(|e| unitarity_error(&e.matrix)).fold(0.0, f64::max)
    }
}

fn code(p: Pauli) -> usize {
    match p {
        Pauli::I => 0,
        Pauli::X => 1,
        Pauli::Y => 2,
        Pauli::Z => 3,
    }
}

pub fn build_table() -> SubstituteTable {
    let mut entries = Vec::with_capacity(16);
    for r in Pauli::ALL {
        for col in Pauli::ALL {
            let a = PauliString::from_letters(&[r, col]).expect("two letters");
            let matrix = substitute_matrix(&a.to_matrix().expect("2 qubits"));
            let b = pauli_decompose(&matrix).expect("4x4");
            let mut eigenvalues: Vec<Complex64> =
                eigen(&matrix).expect("4x4 eigen-decomposition").0.into_iter().map(snap).collect();
            eigenvalues.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
            entries.push(TableEntry { a, b, matrix, eigenvalues });
        }
    }
    SubstituteTable { entries }
}

/// Rounds values within 1e-12 of a unit of `{±1, ±i}` or of 0.
fn snap(z: Complex64) -> Complex64 {
    let r = |v: f64| if (v - v.round()).abs() < 1e-12 { v.round() + 0.0 } else { v };
    c(r(z.re), r(z.im))
}
