//! Recovering Liouvillian coefficients from `L†L` by solving the resulting
//! quadratic system with eXtended Linearization.

mod ansatz;
mod counting;
mod eliminate;
mod poly;
mod solve;
mod system;

pub use ansatz::{AnsatzTerm, LiouvillianAnsatz};
pub use counting::{asymptotic_ratio, count_terms, ratio_at, RatioReport};
pub use eliminate::{
    xl_round, xl_round_with, ElimMode, LinearizedSystem, Univariate, XlRound, CONSISTENCY_TOL, DROP_TOL,
    EXACT_MAX_COLUMNS,
};
pub use poly::{Monomial, Polynomial, QuadraticSystem, VarRole, Variable, COEFF_EPS};
pub use solve::{verify_solution, xl_solve, xl_solve_with, XlOptions, XlReport, XlSolution};
pub use system::{ansatz_variables, build_mq_system, STRUCTURE_TOL};
