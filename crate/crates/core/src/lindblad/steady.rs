use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_eigen, max_abs_diff, null_space, spectral_norm, trace, unvec_row_major, ComplexMatrix,
};

use super::state::{DensityMatrix, PSD_SLACK};
use super::superop::SuperOp;

/// Relative singular-value cutoff for the null space of `L`.
pub const NULL_TOL: f64 = 1e-10;

/// Steady states of a Liouvillian.
#[derive(Clone, Debug)]
pub struct SteadyStates {
    /// Physical steady states, one per null-space dimension. Empty when the
    /// basis could not be made positive; see `warning`.
    pub states: Vec<DensityMatrix>,
    /// Orthonormal null-space basis, devectorized.
    pub raw_basis: Vec<ComplexMatrix>,
    /// Largest entry change made while repairing states into density matrices.
    pub repair: f64,
    pub warning: Option<String>,
}

impl SteadyStates {
    pub fn dim(&self) -> usize {
        self.raw_basis.len()
    }

    /// The steady state, when it is unique.
    pub fn unique(&self) -> Result<&DensityMatrix> {
        match (self.dim(), self.states.first()) {
            (1, Some(s)) => Ok(s),
            (1, None) => {
                Err(Error::Numerical(self.warning.clone().unwrap_or_else(|| "steady state repair failed".into())))
            }
            (d, _) => Err(Error::NonUniqueSteadyState(d)),
        }
    }
}

pub fn steady_state(l: &SuperOp) -> Result<SteadyStates> {
    let d = 1usize << l.n();
    let basis: Vec<ComplexMatrix> =
        null_space(l.matrix(), NULL_TOL).into_iter().map(|v| unvec_row_major(&v, d)).collect();
    match basis.len() {
        0 => Err(Error::NoSteadyState),
        1 => {
            let m = &basis[0];
            let tr = trace(m);
            if tr.norm() < 1e-12 {
                return Ok(SteadyStates {
                    states: vec![],
                    raw_basis: basis,
                    repair: 0.0,
                    warning: Some("null vector is traceless".into()),
                });
            }
            let phased = m * (tr.conj() / tr.norm());
            let (state, repair, min_eig) = repair_state(l.n(), &phased);
            let warning =
                (min_eig < -PSD_SLACK).then(|| format!("steady state needed a PSD repair (eigenvalue {min_eig:e})"));
            Ok(SteadyStates { states: vec![state], raw_basis: basis, repair, warning })
        }
        _ => Ok(degenerate(l.n(), basis)),
    }
}

/// Hermitize, trace-normalize, clip negative eigenvalues.
fn repair_state(n: usize, m: &ComplexMatrix) -> (DensityMatrix, f64, f64) {
    let herm = (m + m.adjoint()) * c(0.5, 0.0);
    let herm = &herm / c(trace(&herm).re, 0.0);
    let (vals, vecs) = hermitian_eigen(&herm);
    let min = vals[0];
    let clipped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let mut out = ComplexMatrix::zeros(herm.nrows(), herm.ncols());
    for (k, v) in clipped.iter().enumerate() {
        if *v > 0.0 {
            let col = vecs.column(k);
            out += col * col.adjoint() * c(v / total, 0.0);
        }
    }
    let out = (&out + out.adjoint()) * c(0.5, 0.0);
    let repair = max_abs_diff(&out, &herm);
    (DensityMatrix::from_raw(n, out), repair, min)
}

/// Builds `dim` linearly independent states from a degenerate null space: one
/// trace-carrying element `ρ₁` plus `ρ₁ + c·H_j` for traceless Hermitian `H_j`.
fn degenerate(n: usize, basis: Vec<ComplexMatrix>) -> SteadyStates {
    let k = basis.len();
    // The null space is closed under adjoint, so the Hermitian parts span it.
    let mut herm: Vec<ComplexMatrix> = Vec::with_capacity(k);
    for m in &basis {
        for cand in [(m + m.adjoint()) * c(0.5, 0.0), (m - m.adjoint()) * c(0.0, -0.5)] {
            let mut v = cand;
            for h in &herm {
                let proj = hs_real(h, &v);
                v -= h * c(proj, 0.0);
            }
            let norm = hs_real(&v, &v).sqrt();
            if norm > 1e-8 && herm.len() < k {
                herm.push(v / c(norm, 0.0));
            }
        }
    }
    let fallback = |msg: &str| SteadyStates {
        states: vec![],
        raw_basis: basis.clone(),
        repair: 0.0,
        warning: Some(msg.to_string()),
    };
    if herm.len() < k {
        return fallback("could not build a Hermitian basis of the steady space");
    }
    let traces: Vec<f64> = herm.iter().map(|h| trace(h).re).collect();
    let tnorm = traces.iter().map(|t| t * t).sum::<f64>().sqrt();
    if tnorm < 1e-12 {
        return fallback("steady space is traceless");
    }
    // Trace-carrying direction first, then an orthonormal traceless complement.
    let mut rho1 = ComplexMatrix::zeros(herm[0].nrows(), herm[0].ncols());
    for (h, t) in herm.iter().zip(&traces) {
        rho1 += h * c(*t / tnorm, 0.0);
    }
    let mut traceless: Vec<ComplexMatrix> = vec![];
    for h in &herm {
        let mut v = h - &rho1 * c(hs_real(&rho1, h), 0.0);
        for t in &traceless {
            v -= t * c(hs_real(t, &v), 0.0);
        }
        let norm = hs_real(&v, &v).sqrt();
        if norm > 1e-8 && traceless.len() < k - 1 {
            traceless.push(v / c(norm, 0.0));
        }
    }
    let rho1 = &rho1 / c(trace(&rho1).re, 0.0);
    let (vals, _) = hermitian_eigen(&rho1);
    let lmin = vals[0];
    if lmin <= PSD_SLACK || traceless.len() < k - 1 {
        return fallback("degenerate steady space has no full-rank trace-carrying element; returning the raw basis");
    }
    let mut states = vec![DensityMatrix::from_raw(n, rho1.clone())];
    for h in &traceless {
        let coef = lmin / spectral_norm(h);
        let m = &rho1 + h * c(coef, 0.0);
        let m = (&m + m.adjoint()) * c(0.5, 0.0);
        states.push(DensityMatrix::from_raw(n, m));
    }
    SteadyStates { states, raw_basis: basis, repair: 0.0, warning: None }
}

fn hs_real(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;
    use crate::lindblad::spec::{Jump, LmeSpec};
    use crate::lindblad::state::vectorize;
    use crate::lindblad::superop::build_liouvillian;
    use crate::pauli::{ladder, PauliSum};
    use rand::SeedableRng;

    #[test]
    fn damping_relaxes_to_ground() {
        let spec = LmeSpec::new(1, PauliSum::zero(1), vec![Jump { rate: 1.0, op: ladder::lowering(1, 0) }]).unwrap();
        let l = build_liouvillian(&spec).unwrap();
        let ss = steady_state(&l).unwrap();
        let rho = ss.unique().unwrap();
        assert!((rho.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(l.residual(&vectorize(rho)) < 1e-9);
    }

    #[test]
    fn depolarizing_relaxes_to_maximally_mixed() {
        let jumps = ["X", "Y", "Z"]
            .iter()
            .map(|p| Jump { rate: 0.25, op: PauliSum::from_labels(1, [(1.0, *p)]).unwrap() })
            .collect();
        let l = build_liouvillian(&LmeSpec::new(1, PauliSum::zero(1), jumps).unwrap()).unwrap();
        let rho = steady_state(&l).unwrap().unique().unwrap().clone();
        assert!(rho.trace_distance(&DensityMatrix::maximally_mixed(1)) < 1e-12);
    }

    #[test]
    fn closed_z_dynamics_is_degenerate() {
        let h = PauliSum::from_labels(1, [(1.0, "Z")]).unwrap();
        let l = build_liouvillian(&LmeSpec::new(1, h, vec![]).unwrap()).unwrap();
        let ss = steady_state(&l).unwrap();
        assert_eq!(ss.dim(), 2);
        assert_eq!(ss.states.len(), 2);
        for s in &ss.states {
            assert!((s.trace() - 1.0).abs() < 1e-12);
            assert!(hermitian_eigenvalues(s.matrix())[0] > -1e-12);
            assert!(s.matrix()[(0, 1)].norm() < 1e-12);
            assert!(l.residual(&vectorize(s)) < 1e-9);
        }
        assert!(matches!(ss.unique(), Err(Error::NonUniqueSteadyState(2))));
    }

    #[test]
    fn random_specs_have_unique_physical_states() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let spec = crate::random::lme_spec(2, 2, &mut rng);
            let l = build_liouvillian(&spec).unwrap();
            let ss = steady_state(&l).unwrap();
            let rho = ss.unique().unwrap();
            assert!(ss.warning.is_none());
            assert!(l.residual(&vectorize(rho)) < 1e-9);
        }
    }
}
