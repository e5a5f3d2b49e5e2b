//! Structured Liouvillians with unknown coefficients.

use std::collections::HashSet;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::c;
use crate::lindblad::{ldl_pauli, Jump, LmeSpec};
use crate::pauli::{ladder, Pauli, PauliString, PauliSum};

/// A named operator multiplying one unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzTerm {
    pub name: String,
    pub op: PauliSum,
}

/// `H = Σ h_a P_a` and channels `λ_i D[F_i]` with fixed `P_a`, `F_i` and
/// unknown `h_a`, `λ_i`. Each channel also carries a slack `w_i` with `w_i² = λ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiouvillianAnsatz {
    n: usize,
    locality: usize,
    hamiltonian: Vec<AnsatzTerm>,
    channels: Vec<AnsatzTerm>,
}

#[derive(Serialize, Deserialize)]
struct TermFile {
    name: String,
    op: Vec<(f64, f64, String)>,
}

#[derive(Serialize, Deserialize)]
struct AnsatzFile {
    n: usize,
    locality: usize,
    hamiltonian: Vec<TermFile>,
    channels: Vec<TermFile>,
}

impl LiouvillianAnsatz {
    pub fn new(n: usize, locality: usize, hamiltonian: Vec<AnsatzTerm>, channels: Vec<AnsatzTerm>) -> Result<Self> {
        let mut names = HashSet::new();
        for t in hamiltonian.iter().chain(&channels) {
            if !names.insert(t.name.clone()) {
                return Err(Error::Validation(format!("duplicate ansatz term {}", t.name)));
            }
            if t.op.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.op.n() });
            }
            if t.op.locality() > locality {
                return Err(Error::Validation(format!(
                    "term {} acts on {} qubits, above the declared locality {locality}",
                    t.name,
                    t.op.locality()
                )));
            }
        }
        if let Some(t) = hamiltonian.iter().find(|t| !t.op.is_hermitian(1e-12)) {
            return Err(Error::Validation(format!("Hamiltonian term {} is not Hermitian", t.name)));
        }
        Ok(LiouvillianAnsatz { n, locality, hamiltonian, channels })
    }

    /// Open 1-D XXZ chain with one `ZZ` and one `XX+YY` coupling per bond and
    /// `σ⁺ = |1⟩⟨0|` decay on every site.
    pub fn xxz_chain(sites: usize) -> Result<Self> {
        if sites < 2 {
            return Err(Error::Validation(format!("an XXZ chain needs at least 2 sites, got {sites}")));
        }
        let mut hamiltonian = Vec::new();
        for b in 0..sites - 1 {
            let zz = PauliString::with_letters(sites, &[(b, Pauli::Z), (b + 1, Pauli::Z)]);
            let xx = PauliString::with_letters(sites, &[(b, Pauli::X), (b + 1, Pauli::X)]);
            let yy = PauliString::with_letters(sites, &[(b, Pauli::Y), (b + 1, Pauli::Y)]);
            hamiltonian.push(AnsatzTerm { name: format!("jz{b}"), op: PauliSum::from_string(zz, c(1.0, 0.0)) });
            let mut hop = PauliSum::from_string(xx, c(1.0, 0.0));
            hop.add_term(yy, c(1.0, 0.0));
            hamiltonian.push(AnsatzTerm { name: format!("jxy{b}"), op: hop });
        }
        let channels =
            (0..sites).map(|i| AnsatzTerm { name: format!("g{i}"), op: ladder::raising(sites, i) }).collect();
        LiouvillianAnsatz::new(sites, 2, hamiltonian, channels)
    }

    /// Every Pauli word of weight at most `k` as a Hamiltonian term and every
    /// word over `{X, Y, Z, σ⁺, σ⁻}` of weight at most `k` as a channel,
    /// identities included, so the unknown count is `2N(n,k,5) + N(n,k,3)`.
    pub fn full_local(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::Validation(format!("locality {k} exceeds qubit count {n}")));
        }
        let hamiltonian = words(n, k, 3)
            .into_iter()
            .map(|w| {
                let letters: Vec<Pauli> = w.iter().map(|&l| Pauli::ALL[l]).collect();
                let s = PauliString::from_letters(&letters).expect("width fits");
                AnsatzTerm { name: format!("h_{s}"), op: PauliSum::from_string(s, c(1.0, 0.0)) }
            })
            .collect();
        const LETTERS: [char; 6] = ['I', 'X', 'Y', 'Z', '+', '-'];
        let channels = words(n, k, 5)
            .into_iter()
            .map(|w| {
                let mut op = PauliSum::identity(n);
                for (q, &l) in w.iter().enumerate() {
                    let factor = match l {
                        0 => continue,
                        1..=3 => {
                            PauliSum::from_string(PauliString::with_letters(n, &[(q, Pauli::ALL[l])]), c(1.0, 0.0))
                        }
                        4 => ladder::raising(n, q),
                        _ => ladder::lowering(n, q),
                    };
                    op = &op * &factor;
                }
                let name: String = w.iter().map(|&l| LETTERS[l]).collect();
                AnsatzTerm { name: format!("f_{name}"), op }
            })
            .collect();
        LiouvillianAnsatz::new(n, k, hamiltonian, channels)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn locality(&self) -> usize {
        self.locality
    }

    pub fn hamiltonian_terms(&self) -> &[AnsatzTerm] {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[AnsatzTerm] {
        &self.channels
    }

    /// `h` count plus `λ` count, i.e. the parameters of [`Self::instantiate`].
    pub fn num_params(&self) -> usize {
        self.hamiltonian.len() + self.channels.len()
    }

    /// `N_u = #h + 2·#λ`.
    pub fn num_unknowns(&self) -> usize {
        self.hamiltonian.len() + 2 * self.channels.len()
    }

    /// Builds the concrete LME from `[h…, λ…]`, optionally followed by `w…`.
    pub fn instantiate(&self, params: &[f64]) -> Result<LmeSpec> {
        let (nh, nc) = (self.hamiltonian.len(), self.channels.len());
        if params.len() != nh + nc && params.len() != nh + 2 * nc {
            return Err(Error::DimensionMismatch { expected: nh + nc, found: params.len() });
        }
        let mut h = PauliSum::zero(self.n);
        for (t, &v) in self.hamiltonian.iter().zip(params) {
            h = &h + &t.op.scale_real(v);
        }
        let mut jumps = Vec::with_capacity(nc);
        for (k, (t, &rate)) in self.channels.iter().zip(&params[nh..nh + nc]).enumerate() {
            if !(rate >= 0.0) {
                return Err(Error::Validation(format!("rate {} (channel {k}) is negative", rate)));
            }
            jumps.push(Jump { rate, op: t.op.clone() });
        }
        LmeSpec::new(self.n, h, jumps)
    }

    /// Symbolic `L†L` at the given parameters.
    pub fn target(&self, params: &[f64]) -> Result<PauliSum> {
        Ok(ldl_pauli(&self.instantiate(params)?))
    }

    /// `[h…, λ…]` with every entry uniform in `(0, 1)`.
    pub fn random_params<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.num_params()).map(|_| rng.random_range(f64::EPSILON..1.0)).collect()
    }

    /// `[h…, λ…, √λ…]`.
    pub fn full_assignment(&self, params: &[f64]) -> Vec<f64> {
        let nh = self.hamiltonian.len();
        let mut out = params.to_vec();
        out.extend(params[nh..].iter().map(|l| l.max(0.0).sqrt()));
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: AnsatzFile = serde_json::from_str(text)?;
        let conv = |ts: Vec<TermFile>| -> Result<Vec<AnsatzTerm>> {
            ts.into_iter().map(|t| Ok(AnsatzTerm { op: PauliSum::from_triples(f.n, &t.op)?, name: t.name })).collect()
        };
        LiouvillianAnsatz::new(f.n, f.locality, conv(f.hamiltonian)?, conv(f.channels)?)
    }

    pub fn to_json(&self) -> String {
        let conv =
            |ts: &[AnsatzTerm]| ts.iter().map(|t| TermFile { name: t.name.clone(), op: t.op.to_triples() }).collect();
        let f = AnsatzFile {
            n: self.n,
            locality: self.locality,
            hamiltonian: conv(&self.hamiltonian),
            channels: conv(&self.channels),
        };
        serde_json::to_string_pretty(&f).expect("plain data serializes")
    }

    pub fn read(path: &Path) -> Result<Self> {
        LiouvillianAnsatz::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Words of length `n` over `0..=m` with at most `k` nonzero letters.
fn words(n: usize, k: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * (m + 1));
        for w in &out {
            let weight = w.iter().filter(|&&l| l != 0).count();
            for l in 0..=m {
                if l == 0 || weight < k {
                    let mut v: Vec<usize> = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out
}
