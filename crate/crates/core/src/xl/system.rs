//! Quadratic equations matching an ansatz's `L†L` against a target, coefficient by coefficient.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::{cross_block, dissipator_block, exchange_symmetry_violation, hamiltonian_block};
use crate::pauli::{PauliString, PauliSum};

use super::ansatz::LiouvillianAnsatz;
use super::poly::{Monomial, Polynomial, QuadraticSystem, VarRole, Variable};

/// Largest tolerated deviation from the exchange symmetry of `L†L`.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Variable order: `h…`, then `λ…`, then `w…`.
pub fn ansatz_variables(ansatz: &LiouvillianAnsatz) -> Vec<Variable> {
    let mut vars: Vec<Variable> = ansatz
        .hamiltonian_terms()
        .iter()
        .map(|t| Variable { name: t.name.clone(), role: VarRole::Hamiltonian })
        .collect();
    for t in ansatz.channels() {
        vars.push(Variable { name: format!("l_{}", t.name), role: VarRole::Rate });
    }
    for t in ansatz.channels() {
        vars.push(Variable { name: format!("w_{}", t.name), role: VarRole::Slack });
    }
    vars
}

/// Coefficient of each degree-2 monomial in the symbolic `L†L`.
fn coefficient_blocks(ansatz: &LiouvillianAnsatz) -> Vec<(Monomial, PauliSum)> {
    let hs = ansatz.hamiltonian_terms();
    let fs = ansatz.channels();
    let nh = hs.len();
    let mut jobs: Vec<(usize, usize, u8)> = Vec::new();
    for a in 0..nh {
        for b in a..nh {
            jobs.push((a, b, 0));
        }
        for i in 0..fs.len() {
            jobs.push((a, i, 1));
        }
    }
    for i in 0..fs.len() {
        for j in i..fs.len() {
            jobs.push((i, j, 2));
        }
    }
    jobs.into_par_iter()
        .map(|(p, q, kind)| match kind {
            0 => {
                let mut blk = hamiltonian_block(&hs[p].op, &hs[q].op);
                if p != q {
                    blk = &blk + &hamiltonian_block(&hs[q].op, &hs[p].op);
                }
                (Monomial::from_vars([p, q]), blk)
            }
            1 => (Monomial::from_vars([p, nh + q]), cross_block(&hs[p].op, &fs[q].op)),
            _ => {
                let mut blk = dissipator_block(&fs[p].op, &fs[q].op);
                if p != q {
                    blk = &blk + &dissipator_block(&fs[q].op, &fs[p].op);
                }
                (Monomial::from_vars([nh + p, nh + q]), blk)
            }
        })
        .collect()
}

/// One equation per exchange-symmetry class of Pauli strings `P_i ⊗ P_j`,
/// equating the ansatz's `L†L` coefficient to the target's, followed by
/// `w_i² − λ_i = 0` for every channel. With `include_ground_energy = false`
/// the identity equation is left out.
pub fn build_mq_system(
    ansatz: &LiouvillianAnsatz,
    target: &PauliSum,
    include_ground_energy: bool,
) -> Result<QuadraticSystem> {
    let n = ansatz.n();
    if target.n() != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, found: target.n() });
    }
    if !target.is_hermitian(STRUCTURE_TOL) {
        return Err(Error::StructuralRejection("target has complex Pauli weights".into()));
    }
    let violation = exchange_symmetry_violation(target)?;
    if violation > STRUCTURE_TOL {
        return Err(Error::StructuralRejection(format!(
            "target breaks the row/column exchange symmetry by {violation:e}"
        )));
    }

    let canonical = |s: &PauliString| -> bool {
        let (a, b) = s.split_at(n);
        *s <= b.tensor(&a)
    };
    let mut rows: BTreeMap<PauliString, Polynomial> = BTreeMap::new();
    for (mono, blk) in coefficient_blocks(ansatz) {
        for (s, v) in blk.iter() {
            if !canonical(s) {
                continue;
            }
            if v.im.abs() > 1e-9 * v.norm().max(1.0) {
                return Err(Error::Consistency(format!("complex L†L weight {v} on {s}")));
            }
            rows.entry(*s).or_default().add_term(mono.clone(), v.re);
        }
    }
    for (s, v) in target.iter() {
        if canonical(s) {
            rows.entry(*s).or_default().add_term(Monomial::one(), -v.re);
        }
    }
    if !include_ground_energy {
        rows.remove(&PauliString::identity(2 * n));
    }

    let mut sys = QuadraticSystem::new(ansatz_variables(ansatz))?;
    for (_, eq) in rows {
        sys.push(eq)?;
    }
    let nh = ansatz.hamiltonian_terms().len();
    let nc = ansatz.channels().len();
    for i in 0..nc {
        let (l, w) = (nh + i, nh + nc + i);
        sys.push(Polynomial::from_terms([(Monomial::from_vars([w, w]), 1.0), (Monomial::var(l), -1.0)]))?;
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::ladder;
    use crate::xl::ansatz::AnsatzTerm;
    use rand::SeedableRng;

    fn single_site() -> LiouvillianAnsatz {
        let z = PauliSum::from_labels(1, [(1.0, "Z")]).unwrap();
        LiouvillianAnsatz::new(
            1,
            1,
            vec![AnsatzTerm { name: "h".into(), op: z }],
            vec![AnsatzTerm { name: "up".into(), op: ladder::raising(1, 0) }],
        )
        .unwrap()
    }

    #[test]
    fn forward_solution_satisfies_system() {
        let a = single_site();
        let params = [0.7, 0.3];
        let target = a.target(&params).unwrap();
        let sys = build_mq_system(&a, &target, true).unwrap();
        assert_eq!(sys.num_vars(), 3);
        assert!(sys.residual(&a.full_assignment(&params)) < 1e-12);
        assert!(sys.residual(&[0.7, 0.3, -(0.3f64.sqrt())]) < 1e-12);
        assert!(sys.residual(&[0.5, 0.3, 0.3f64.sqrt()]) > 1e-3);
        sys.check_slack_pattern().unwrap();
    }

    #[test]
    fn xxz_forward_and_counts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let a = LiouvillianAnsatz::xxz_chain(5).unwrap();
        let params = a.random_params(&mut rng);
        let target = a.target(&params).unwrap();
        let sys = build_mq_system(&a, &target, true).unwrap();
        assert_eq!(sys.num_vars(), 2 * 4 + 2 * 5);
        assert!(sys.residual(&a.full_assignment(&params)) < 1e-12);
        let dropped = build_mq_system(&a, &target, false).unwrap();
        assert_eq!(dropped.num_equations() + 1, sys.num_equations());
        // Roughly half the target strings survive the exchange deduplication.
        assert!(sys.num_equations() < target.len());
    }

    #[test]
    fn zero_target_solved_by_zero() {
        let a = LiouvillianAnsatz::xxz_chain(3).unwrap();
        let sys = build_mq_system(&a, &PauliSum::zero(6), true).unwrap();
        assert_eq!(sys.residual(&vec![0.0; sys.num_vars()]), 0.0);
    }

    #[test]
    fn structural_rejection() {
        let a = single_site();
        let bad = PauliSum::from_labels(2, [(1.0, "XZ")]).unwrap();
        assert!(matches!(build_mq_system(&a, &bad, true), Err(Error::StructuralRejection(_))));
        let complex = PauliSum::from_labels(2, [(crate::linalg::c(0.0, 1.0), "ZZ")]).unwrap();
        assert!(matches!(build_mq_system(&a, &complex, true), Err(Error::StructuralRejection(_))));
        assert!(build_mq_system(&a, &PauliSum::zero(4), true).is_err());
    }
}
