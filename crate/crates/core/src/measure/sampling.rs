use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::lindblad::DensityMatrix;
use crate::pauli::PauliSum;

use super::substitute::pair_trace;

/// Stream id reserved for the swap test; term `i` uses stream `i`.
pub const SWAP_STREAM: u64 = u64::MAX;

/// Generator for one named stream of a seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mean of `shots` ±1 outcomes with `P(+1) = p`. The number of `+1` outcomes
/// is drawn in one binomial sample.
pub fn sample_pm<R: Rng + ?Sized>(p: f64, shots: u64, rng: &mut R) -> Result<f64> {
    if shots == 0 {
        return Err(Error::Validation("shots must be positive".into()));
    }
    let p = p.clamp(0.0, 1.0);
    let hits = Binomial::new(shots, p).map_err(|e| Error::Numerical(e.to_string()))?.sample(rng);
    Ok((2.0 * hits as f64 - shots as f64) / shots as f64)
}

/// Success probability of the Hadamard test for `Re Tr(Q ρ⊗ρ)`.
pub fn hadamard_probability(q: &PauliSum, rho: &DensityMatrix) -> Result<f64> {
    if q.n() != 2 * rho.n() {
        return Err(Error::DimensionMismatch { expected: 2 * rho.n(), found: q.n() });
    }
    let re = pair_trace(q, rho.matrix()).re;
    if re.abs() > 1.0 + 1e-9 {
        return Err(Error::Consistency(format!("|Re Tr(Qρ⊗ρ)| = {re} exceeds 1")));
    }
    Ok((1.0 + re) / 2.0)
}

pub(crate) fn hadamard_sample_rng<R: Rng + ?Sized>(
    q: &PauliSum,
    rho: &DensityMatrix,
    shots: u64,
    rng: &mut R,
) -> Result<f64> {
    sample_pm(hadamard_probability(q, rho)?, shots, rng)
}

/// Simulated Hadamard test: sample mean of ±1 outcomes estimating `Re Tr(Q ρ⊗ρ)`.
pub fn hadamard_sample(q: &PauliSum, rho: &DensityMatrix, shots: u64, seed: u64) -> Result<f64> {
    let err = (&q.adjoint() * q).max_abs_diff(&PauliSum::identity(q.n()));
    if err > 1e-10 {
        return Err(Error::Validation(format!("Q is not unitary (error {err:e})")));
    }
    hadamard_sample_rng(q, rho, shots, &mut stream_rng(seed, 0))
}

pub(crate) fn swap_sample_rng<R: Rng + ?Sized>(rho: &DensityMatrix, shots: u64, rng: &mut R) -> Result<f64> {
    sample_pm((1.0 + rho.purity()) / 2.0, shots, rng)
}

/// Simulated swap test: `2·P(0) − 1` estimating `Tr ρ²`.
pub fn swap_sample(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<f64> {
    swap_sample_rng(rho, shots, &mut stream_rng(seed, SWAP_STREAM))
}
