//! Term counts for `k`-local operators and the equations-to-unknowns ratio.

use serde::Serialize;

use crate::error::{Error, Result};

/// `N(n, k, m) = Σ_{l=0}^{k} C(n, l)·m^l`: words of weight at most `k` over
/// `m` non-identity letters on `n` sites.
pub fn count_terms(n: usize, k: usize, m: u64) -> Result<u128> {
    if k > n {
        return Err(Error::Validation(format!("locality {k} exceeds site count {n}")));
    }
    if m == 0 {
        return Err(Error::Validation("letter count must be at least 1".into()));
    }
    let overflow = || Error::Numerical(format!("N({n}, {k}, {m}) overflows u128"));
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    let mut power: u128 = 1;
    for l in 0..=k {
        if l > 0 {
            binom = binom.checked_mul((n - l + 1) as u128).ok_or_else(overflow)? / l as u128;
            power = power.checked_mul(m as u128).ok_or_else(overflow)?;
        }
        total = binom.checked_mul(power).and_then(|t| total.checked_add(t)).ok_or_else(overflow)?;
    }
    Ok(total)
}

/// `N_e / N_u²` at `n` qubits of `L†L` (`n/2` qubits of `L`), with
/// `N_e = N(n,k,3)/2 + N(n/2,k/2,5)` and `N_u = 2N(n/2,k/2,5) + N(n/2,k/2,3)`.
pub fn ratio_at(k: usize, n: usize) -> Result<f64> {
    check_even_k(k)?;
    if !n.is_multiple_of(2) || n < k {
        return Err(Error::Validation(format!("need an even n ≥ k, got n = {n}")));
    }
    let ne = count_terms(n, k, 3)? as f64 / 2.0 + count_terms(n / 2, k / 2, 5)? as f64;
    let nu = 2.0 * count_terms(n / 2, k / 2, 5)? as f64 + count_terms(n / 2, k / 2, 3)? as f64;
    Ok(ne / (nu * nu))
}

fn check_even_k(k: usize) -> Result<()> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::Validation(format!("locality must be even and at least 2, got {k}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RatioReport {
    pub k: usize,
    pub n_max: usize,
    /// Ratio evaluated at `n_max`.
    pub at_n_max: f64,
    /// Large-`n` limit extrapolated from a geometric ladder of sizes.
    pub limit: f64,
    /// `1/√limit`, the exponent in the XL running time `N_u^{O(1/√r)}`.
    pub exponent: f64,
}

/// Ratio at `n_max` plus its `n → ∞` limit by polynomial extrapolation in `1/n`
/// over `n_max, n_max/2, n_max/4, …`.
pub fn asymptotic_ratio(k: usize, n_max: usize) -> Result<RatioReport> {
    check_even_k(k)?;
    let mut sizes = Vec::new();
    let mut n = n_max - n_max % 2;
    while n >= 4 * k && sizes.len() < 6 {
        sizes.push(n);
        n /= 2;
        n -= n % 2;
    }
    if sizes.len() < 2 {
        return Err(Error::Validation(format!("n_max = {n_max} is too small for k = {k}; need at least {}", 8 * k)));
    }
    let h: Vec<f64> = sizes.iter().map(|&n| 1.0 / n as f64).collect();
    let mut p: Vec<f64> = sizes.iter().map(|&n| ratio_at(k, n)).collect::<Result<_>>()?;
    // Neville's scheme evaluated at h = 0.
    let m = p.len();
    for level in 1..m {
        for i in 0..m - level {
            p[i] = (h[i + level] * p[i] - h[i] * p[i + 1]) / (h[i + level] - h[i]);
        }
    }
    let limit = p[0];
    Ok(RatioReport { k, n_max: sizes[0], at_n_max: ratio_at(k, sizes[0])?, limit, exponent: 1.0 / limit.sqrt() })
}
