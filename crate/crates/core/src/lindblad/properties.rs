use serde::Serialize;

use crate::linalg::{c, hermitian_eigen, spectral_norm, ComplexMatrix};

use super::superop::SuperOp;

/// Relative threshold below which an `L†L` eigenvalue counts as ground energy.
pub const GROUND_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct LdlProperties {
    pub min_eigenvalue: f64,
    pub ground_energy: f64,
    pub ground_dim: usize,
    pub st_commutator_norm: f64,
    pub spectrum_nonnegative: bool,
    pub st_symmetric: bool,
    /// Present when a steady-space dimension was supplied for comparison.
    pub ground_dim_matches: Option<bool>,
}

impl LdlProperties {
    pub fn passed(&self) -> bool {
        self.spectrum_nonnegative && self.st_symmetric && self.ground_dim_matches.unwrap_or(true)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Index permutation `i·d + j ↦ j·d + i`, i.e. `vec(M) ↦ vec(Mᵀ)`.
pub fn exchange_matrix(n: usize) -> ComplexMatrix {
    let d = 1usize << n;
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = c(1.0, 0.0);
        }
    }
    s
}

/// `‖M·(ST) − (ST)·M‖₂` where `ST v = S·conj(v)`; as matrices this is `M S − S M*`.
pub fn st_commutator_norm(m: &ComplexMatrix, s: &ComplexMatrix) -> f64 {
    let diff = m * s - s * m.map(|v| v.conj());
    spectral_norm(&diff)
}

pub fn verify_ldl_properties(ldl: &SuperOp, steady_dim: Option<usize>) -> LdlProperties {
    let (vals, _) = hermitian_eigen(ldl.matrix());
    let min = vals[0];
    let scale = vals.last().copied().unwrap_or(0.0).abs().max(1.0);
    let ground_dim = vals.iter().filter(|v| v.abs() <= GROUND_TOL * scale).count();
    let s = exchange_matrix(ldl.n());
    let st = st_commutator_norm(ldl.matrix(), &s);
    LdlProperties {
        min_eigenvalue: min,
        ground_energy: min.abs(),
        ground_dim,
        st_commutator_norm: st,
        spectrum_nonnegative: min >= -1e-9,
        st_symmetric: st < 1e-9,
        ground_dim_matches: steady_dim.map(|d| d == ground_dim),
    }
}
