use crate::error::{Error, Result};

/// Which relaxation scale drives the bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RelaxationScale {
    /// Spectral gap of a Hermitian Liouvillian.
    Gap(f64),
    /// Mixing time of a general Liouvillian.
    MixingTime(f64),
}

/// Sufficient evolution time to reach overlap `1 − ε` with the steady state.
///
/// Gap branch: `(n·ln2/2 + ln ε^{-1/2}) / Δ`. Mixing branch:
/// `t_mix·(n + log₂ ε⁻¹)/2`.
pub fn runtime_bound(scale: RelaxationScale, n: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Validation(format!("eps must lie in (0, 1], got {eps}")));
    }
    match scale {
        RelaxationScale::Gap(gap) if gap > 0.0 && gap.is_finite() => {
            Ok((std::f64::consts::LN_2 * n as f64 / 2.0 + 0.5 * (1.0 / eps).ln()) / gap)
        }
        RelaxationScale::MixingTime(t) if t > 0.0 && t.is_finite() => Ok(t * (n as f64 + (1.0 / eps).log2()) / 2.0),
        other => Err(Error::Validation(format!("relaxation scale must be positive, got {other:?}"))),
    }
}
