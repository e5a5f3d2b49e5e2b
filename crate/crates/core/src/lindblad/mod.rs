//! Lindblad dynamics on vectorized density matrices.

mod evolve;
mod ldl;
mod properties;
mod runtime;
mod spec;
mod spectral;
mod state;
mod steady;
mod superop;

pub use evolve::{auto_steps, convergence_check, evolve, evolve_vector};
pub use ldl::{
    build_ldl, cross_block, dissipator_block, exchange_symmetry_violation, hamiltonian_block, ldl_pauli, Ldl,
};
pub use properties::{exchange_matrix, st_commutator_norm, verify_ldl_properties, LdlProperties};
pub use runtime::{runtime_bound, RelaxationScale};
pub use spec::{Jump, JumpFile, LmeSpec, LmeSpecFile};
pub use spectral::{spectral_diagnostics, SpectralReport};
pub use state::{devectorize, vectorize, DensityMatrix, DmVector, PSD_SLACK};
pub use steady::{steady_state, SteadyStates, NULL_TOL};
pub use superop::{apply_to_density, build_liouvillian, lindblad_rhs, liouvillian_pauli, SuperOp};
