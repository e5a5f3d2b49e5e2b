//! Lindbladians in the vectorization picture.
//!
//! * [`pauli`]: Pauli strings and sums, dense conversion and decomposition.
//! * [`lindblad`]: Liouvillians, `L†L`, steady states, evolution and spectra.
//! * [`measure`]: substitute operators and simulated Hadamard/swap-test estimation.
//! * [`xl`]: recovering Liouvillian coefficients from `L†L` with XL.
//! * [`encodings`]: clock-register LMEs whose steady state stores a circuit history.
//!
//! Qubit 0 is the most significant bit; vectorization is row-major, so a
//! vectorized operator on `n` qubits lives on `2n` qubits with the row register first.

// `!(x <= tol)` style guards are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod encodings;
pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod measure;
pub mod pauli;
pub mod random;
pub mod xl;

pub use encodings::{circuit_to_lme, CircuitSpec, ClockLme};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use lindblad::{build_ldl, build_liouvillian, DensityMatrix, DmVector, Jump, LmeSpec, SpectralReport, SuperOp};
pub use measure::{EstimateReport, MeasurementPlan, SubstituteTable};
pub use pauli::{Pauli, PauliString, PauliSum};
pub use xl::{LinearizedSystem, LiouvillianAnsatz, Monomial, QuadraticSystem, XlReport, XlSolution};
