use faer::sparse::linalg::matmul::sparse_dense_matmul;
use faer::sparse::{SparseRowMat, Triplet};
use faer::{Accum, Col, Par};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, max_abs_diff, unvec_row_major, vec_row_major, ComplexVector};

use super::state::DensityMatrix;
use super::superop::SuperOp;

/// Integrates `dv/dt = L v` with `steps` classical RK4 steps. `L` is applied
/// in sparse row form; Pauli-structured Liouvillians have few nonzeros per row.
pub fn evolve_vector(l: &SuperOp, v0: &ComplexVector, t: f64, steps: usize) -> Result<ComplexVector> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Validation(format!("evolution time must be finite and non-negative, got {t}")));
    }
    if steps == 0 {
        return Err(Error::Validation("steps must be positive".into()));
    }
    if l.dim() != v0.len() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: v0.len() });
    }
    let m = l.matrix();
    let d = l.dim();
    let triplets: Vec<Triplet<usize, usize, Complex64>> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .filter(|&(i, j)| m[(i, j)] != Complex64::default())
        .map(|(i, j)| Triplet::new(i, j, m[(i, j)]))
        .collect();
    let sparse = SparseRowMat::<usize, Complex64>::try_new_from_triplets(d, d, &triplets)
        .map_err(|e| Error::Numerical(format!("sparse Liouvillian: {e:?}")))?;
    let apply = |v: &Col<Complex64>, out: &mut Col<Complex64>| {
        sparse_dense_matmul(out.as_mat_mut(), Accum::Replace, sparse.as_ref(), v.as_mat(), c(1.0, 0.0), Par::Seq);
    };
    let stage = |out: &mut Col<Complex64>, v: &Col<Complex64>, k: &Col<Complex64>, a: Complex64| {
        for i in 0..out.nrows() {
            out[i] = v[i] + a * k[i];
        }
    };
    let h = t / steps as f64;
    let (h2, h6) = (c(h / 2.0, 0.0), c(h / 6.0, 0.0));
    let hc = c(h, 0.0);
    let two = c(2.0, 0.0);
    let mut v = Col::<Complex64>::from_fn(d, |i| v0[i]);
    let (mut k1, mut k2, mut k3, mut k4) = (Col::zeros(d), Col::zeros(d), Col::zeros(d), Col::zeros(d));
    let mut tmp = Col::<Complex64>::zeros(d);
    for step in 0..steps {
        apply(&v, &mut k1);
        stage(&mut tmp, &v, &k1, h2);
        apply(&tmp, &mut k2);
        stage(&mut tmp, &v, &k2, h2);
        apply(&tmp, &mut k3);
        stage(&mut tmp, &v, &k3, hc);
        apply(&tmp, &mut k4);
        for i in 0..d {
            v[i] += (k1[i] + two * (k2[i] + k3[i]) + k4[i]) * h6;
        }
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Instability { step });
        }
    }
    Ok(ComplexVector::from_fn(d, |i, _| v[i]))
}

/// `exp(Lt)` applied to `ρ₀` by fixed-step RK4.
pub fn evolve(l: &SuperOp, rho0: &DensityMatrix, t: f64, steps: usize) -> Result<DensityMatrix> {
    if rho0.n() != l.n() {
        return Err(Error::DimensionMismatch { expected: l.n(), found: rho0.n() });
    }
    let v = evolve_vector(l, &vec_row_major(rho0.matrix()), t, steps)?;
    Ok(DensityMatrix::from_raw(l.n(), unvec_row_major(&v, rho0.dim())))
}

/// Largest entry change when the step count is doubled.
pub fn convergence_check(l: &SuperOp, rho0: &DensityMatrix, t: f64, steps: usize) -> Result<f64> {
    let a = evolve(l, rho0, t, steps)?;
    let b = evolve(l, rho0, t, 2 * steps)?;
    Ok(max_abs_diff(a.matrix(), b.matrix()))
}

/// Step count keeping `h·‖L‖_∞ ≤ 1/32`.
pub fn auto_steps(l: &SuperOp, t: f64) -> usize {
    ((32.0 * t * l.inf_norm()).ceil() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::spec::{Jump, LmeSpec};
    use crate::lindblad::steady::steady_state;
    use crate::lindblad::superop::build_liouvillian;
    use crate::pauli::{ladder, PauliSum};
    use rand::SeedableRng;

    fn damping() -> SuperOp {
        let spec = LmeSpec::new(1, PauliSum::zero(1), vec![Jump { rate: 1.0, op: ladder::lowering(1, 0) }]).unwrap();
        build_liouvillian(&spec).unwrap()
    }

    #[test]
    fn amplitude_damping_half_life() {
        let l = damping();
        let rho = evolve(&l, &DensityMatrix::basis(1, 1), std::f64::consts::LN_2, 400).unwrap();
        assert!((rho.matrix()[(1, 1)].re - 0.5).abs() < 1e-10);
        assert!(convergence_check(&l, &DensityMatrix::basis(1, 1), 1.0, 400).unwrap() < 1e-8);
    }

    #[test]
    fn zero_time_is_identity() {
        let l = damping();
        let rho0 = DensityMatrix::maximally_mixed(1);
        assert_eq!(evolve(&l, &rho0, 0.0, 3).unwrap(), rho0);
    }

    #[test]
    fn long_time_reaches_steady_state() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let spec = crate::random::lme_spec(2, 3, &mut rng);
        let l = build_liouvillian(&spec).unwrap();
        let report = crate::lindblad::spectral::spectral_diagnostics(&l, 0, 0).unwrap();
        let t = 20.0 / report.gap.unwrap();
        let rho = evolve(&l, &DensityMatrix::basis(2, 0), t, auto_steps(&l, t)).unwrap();
        let ss = steady_state(&l).unwrap();
        assert!(rho.trace_distance(ss.unique().unwrap()) < 1e-6);
        assert!((rho.trace() - 1.0).abs() < 1e-8);
        assert!(rho.hermiticity_error() < 1e-8);
    }

    #[test]
    fn semigroup_property() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let spec = crate::random::lme_spec(1, 2, &mut rng);
        let l = build_liouvillian(&spec).unwrap();
        let rho0 = crate::random::density_matrix(1, &mut rng);
        let whole = evolve(&l, &rho0, 1.5, 3000).unwrap();
        let half = evolve(&l, &rho0, 0.5, 1000).unwrap();
        let rest = evolve(&l, &half, 1.0, 2000).unwrap();
        assert!(max_abs_diff(whole.matrix(), rest.matrix()) < 1e-8);
    }

    #[test]
    fn rejects_negative_time() {
        assert!(evolve(&damping(), &DensityMatrix::basis(1, 0), -1.0, 10).is_err());
    }
}
