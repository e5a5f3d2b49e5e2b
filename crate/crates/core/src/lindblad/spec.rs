use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Tolerance on the imaginary part of Hamiltonian coefficients.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// One dissipative channel `λ D[F]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jump {
    pub rate: f64,
    pub op: PauliSum,
}

/// A Lindblad problem on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct LmeSpec {
    n: usize,
    hamiltonian: PauliSum,
    jumps: Vec<Jump>,
}

impl LmeSpec {
    pub fn new(n: usize, hamiltonian: PauliSum, jumps: Vec<Jump>) -> Result<Self> {
        if hamiltonian.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: hamiltonian.n() });
        }
        if !hamiltonian.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::Validation("Hamiltonian is not Hermitian".into()));
        }
        for (k, j) in jumps.iter().enumerate() {
            if !j.rate.is_finite() || j.rate < 0.0 {
                return Err(Error::Validation(format!("jump {k} has invalid rate {}", j.rate)));
            }
            if j.op.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: j.op.n() });
            }
        }
        Ok(LmeSpec { n, hamiltonian, jumps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: LmeSpecFile = serde_json::from_str(text)?;
        raw.into_spec()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&LmeSpecFile::from_spec(self, None)).expect("plain data serializes")
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk JSON layout of an [`LmeSpec`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LmeSpecFile {
    pub n: usize,
    pub hamiltonian: Vec<(f64, f64, String)>,
    pub jumps: Vec<JumpFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock_dim: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JumpFile {
    pub rate: f64,
    pub op: Vec<(f64, f64, String)>,
}

impl LmeSpecFile {
    pub fn from_spec(spec: &LmeSpec, clock_dim: Option<usize>) -> Self {
        LmeSpecFile {
            n: spec.n,
            hamiltonian: spec.hamiltonian.to_triples(),
            jumps: spec.jumps.iter().map(|j| JumpFile { rate: j.rate, op: j.op.to_triples() }).collect(),
            clock_dim,
        }
    }

    pub fn into_spec(self) -> Result<LmeSpec> {
        let h = PauliSum::from_triples(self.n, &self.hamiltonian)?;
        let jumps = self
            .jumps
            .iter()
            .map(|j| Ok(Jump { rate: j.rate, op: PauliSum::from_triples(self.n, &j.op)? }))
            .collect::<Result<Vec<_>>>()?;
        LmeSpec::new(self.n, h, jumps)
    }
}
