//! Measuring vectorized states through their density matrices.

mod bell;
mod estimator;
mod sampling;
mod substitute;
mod table;

pub use bell::{bell_amplitude, bell_amplitude_direct, bell_vector};
pub use estimator::{
    estimate_expectation, shot_budget, spectral_norm_hermitian, EstimateReport, MeasurementPlan, ShotBudget,
};
pub use sampling::{hadamard_probability, hadamard_sample, sample_pm, stream_rng, swap_sample, SWAP_STREAM};
pub use substitute::{
    direct_expectation, exact_expectation, exact_numerator, pair_trace, pauli_trace, substitute, substitute_string,
    table, SubstituteTerm, Substitution,
};
pub use table::{build_table, substitute_matrix, SubstituteTable, TableEntry};
