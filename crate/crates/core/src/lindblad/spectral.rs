use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{
    c, condition_number, eigen, expm, hermitian_eigenvalues, null_space, unvec_row_major, vec_row_major, ComplexMatrix,
};

use super::steady::NULL_TOL;
use super::superop::SuperOp;

/// Eigenvalues with `|Re| ≤ ZERO_RE` count as stationary.
pub const ZERO_RE: f64 = 1e-9;
/// Eigenvector matrices with a larger condition number are called defective.
pub const DIAGONALIZABLE_COND: f64 = 1e8;

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<Complex64>,
    /// Smallest `|Re η|` over eigenvalues with `|Re η| > 1e-9`.
    pub gap: Option<f64>,
    pub steady_dim: usize,
    pub diagonalizable: bool,
    pub eigenvector_condition: f64,
    /// Largest probe half-distance time; a lower bound on the mixing time.
    pub mixing_time_estimate: Option<f64>,
}

impl SpectralReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

pub fn spectral_diagnostics(l: &SuperOp, mixing_probes: usize, seed: u64) -> Result<SpectralReport> {
    let (eigenvalues, vecs) = eigen(l.matrix())?;
    let gap = eigenvalues
        .iter()
        .map(|v| v.re.abs())
        .filter(|&r| r > ZERO_RE)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.min(r))));
    let steady_dim = null_space(l.matrix(), NULL_TOL).len();
    let cond = condition_number(&vecs);
    let diagonalizable = cond < DIAGONALIZABLE_COND;

    let mixing_time_estimate = if mixing_probes > 0 && steady_dim == 1 && gap.is_some() {
        let prop = Propagator::new(l, &eigenvalues, &vecs, diagonalizable);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 1usize << l.n();
        let mut worst: Option<f64> = None;
        for _ in 0..mixing_probes {
            let a = crate::random::pure_state(d, &mut rng);
            let b = crate::random::pure_state(d, &mut rng);
            let delta = &a * a.adjoint() - &b * b.adjoint();
            if let Some(t) = half_distance_time(&prop, &delta, gap.unwrap_or(1.0)) {
                worst = Some(worst.map_or(t, |w: f64| w.max(t)));
            }
        }
        worst
    } else {
        None
    };

    Ok(SpectralReport {
        eigenvalues,
        gap,
        steady_dim,
        diagonalizable,
        eigenvector_condition: cond,
        mixing_time_estimate,
    })
}

/// `exp(Lt)` through the eigen-decomposition when it is well conditioned,
/// otherwise by dense exponentiation.
struct Propagator<'a> {
    l: &'a SuperOp,
    eig: Option<(Vec<Complex64>, ComplexMatrix, ComplexMatrix)>,
}

impl<'a> Propagator<'a> {
    fn new(l: &'a SuperOp, vals: &[Complex64], vecs: &ComplexMatrix, diagonalizable: bool) -> Self {
        let eig = if diagonalizable {
            vecs.clone().try_inverse().map(|inv| (vals.to_vec(), vecs.clone(), inv))
        } else {
            None
        };
        Propagator { l, eig }
    }

    fn apply(&self, m: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let d = m.nrows();
        let v = vec_row_major(m);
        let out = match &self.eig {
            Some((vals, vecs, inv)) => {
                let mut w = inv * v;
                for (k, z) in w.iter_mut().enumerate() {
                    *z *= (vals[k] * t).exp();
                }
                vecs * w
            }
            None => expm(&(self.l.matrix() * c(t, 0.0))) * v,
        };
        unvec_row_major(&out, d)
    }
}

fn trace_norm_herm(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
}

fn half_distance_time(prop: &Propagator, delta: &ComplexMatrix, gap: f64) -> Option<f64> {
    let d0 = trace_norm_herm(delta);
    if d0 < 1e-12 {
        return None;
    }
    let ratio = |t: f64| trace_norm_herm(&prop.apply(delta, t)) / d0;
    let mut hi = 0.1 / gap;
    let mut lo = 0.0;
    let mut tries = 0;
    while ratio(hi) > 0.5 {
        lo = hi;
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return None;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * hi {
            break;
        }
    }
    Some(hi)
}
