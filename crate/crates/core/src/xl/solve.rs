//! XL with a depth-first search over the roots of extracted univariates.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::poly_roots;
use crate::lindblad::ldl_pauli;
use crate::pauli::PauliSum;

use super::ansatz::LiouvillianAnsatz;
use super::eliminate::{xl_round_with, ElimMode, Univariate};
use super::poly::{Polynomial, QuadraticSystem, VarRole};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XlOptions {
    pub d_max: usize,
    pub node_budget: usize,
    pub mode: ElimMode,
    /// Largest accepted residual of the final assignment.
    pub accept_tol: f64,
}

impl Default for XlOptions {
    fn default() -> Self {
        XlOptions { d_max: 4, node_budget: 10_000, mode: ElimMode::Float, accept_tol: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XlReport {
    pub n_e: usize,
    pub n_u: usize,
    pub d_used: usize,
    pub rounds: usize,
    pub nodes: usize,
    pub free_vars: usize,
    pub residual: f64,
    pub wall_time_ms: f64,
    /// Density of the first linearized matrix.
    pub matrix_density: f64,
}

#[derive(Clone, Debug)]
pub struct XlSolution {
    pub assignment: Vec<f64>,
    pub report: XlReport,
}

impl XlSolution {
    /// Assignment keyed by variable name.
    pub fn named(&self, sys: &QuadraticSystem) -> BTreeMap<String, f64> {
        sys.vars().iter().zip(&self.assignment).map(|(v, &x)| (v.name.clone(), x)).collect()
    }
}

pub fn xl_solve(sys: &QuadraticSystem, d_max: usize) -> Result<XlSolution> {
    xl_solve_with(sys, &XlOptions { d_max, ..XlOptions::default() })
}

pub fn xl_solve_with(sys: &QuadraticSystem, opts: &XlOptions) -> Result<XlSolution> {
    if opts.d_max < 2 {
        return Err(Error::Validation(format!("d_max must be at least 2, got {}", opts.d_max)));
    }
    let start = Instant::now();
    let mut search = Search { sys, opts, nodes: 0, rounds: 0, d_used: 0, density: None, free: 0 };
    let found = search.visit(sys.equations().to_vec(), vec![None; sys.num_vars()])?;
    let Some(assignment) = found else {
        return Err(Error::Unsolvable { d_max: opts.d_max });
    };
    let report = XlReport {
        n_e: sys.num_equations(),
        n_u: sys.num_vars(),
        d_used: search.d_used,
        rounds: search.rounds,
        nodes: search.nodes,
        free_vars: search.free,
        residual: sys.residual(&assignment),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        matrix_density: search.density.unwrap_or(0.0),
    };
    Ok(XlSolution { assignment, report })
}

struct Search<'a> {
    sys: &'a QuadraticSystem,
    opts: &'a XlOptions,
    nodes: usize,
    rounds: usize,
    d_used: usize,
    density: Option<f64>,
    free: usize,
}

/// Tolerance for a substituted equation that has become a bare constant.
fn constant_tol(original_scale: f64) -> f64 {
    1e-7 * original_scale.max(1.0)
}

impl Search<'_> {
    fn visit(&mut self, eqs: Vec<Polynomial>, mut fixed: Vec<Option<f64>>) -> Result<Option<Vec<f64>>> {
        self.nodes += 1;
        if self.nodes > self.opts.node_budget {
            let partial = fixed.iter().enumerate().filter_map(|(i, v)| v.map(|x| (i, x))).collect();
            return Err(Error::BudgetExceeded { budget: self.opts.node_budget, partial });
        }
        let mut active = vec![false; fixed.len()];
        for e in &eqs {
            for v in e.vars() {
                active[v] = true;
            }
        }
        for (v, slot) in fixed.iter_mut().enumerate() {
            if slot.is_none() && !active[v] {
                *slot = Some(0.0);
                self.free += 1;
            }
        }
        if eqs.is_empty() {
            return Ok(self.leaf(&fixed));
        }

        let mut sub = QuadraticSystem::new(self.sys.vars().to_vec())?;
        for e in eqs.iter().cloned() {
            sub.push(e)?;
        }
        let mut unis = None;
        for d in 2..=self.opts.d_max {
            match xl_round_with(&sub, d, self.opts.mode) {
                Ok(round) => {
                    self.rounds += 1;
                    self.d_used = self.d_used.max(d);
                    self.density.get_or_insert(round.linearized.density());
                    if round.inconsistent {
                        return Ok(None);
                    }
                    unis = Some(round.univariates);
                    break;
                }
                Err(Error::NeedHigherD { .. }) => {
                    self.rounds += 1;
                    self.d_used = self.d_used.max(d);
                }
                Err(e) => return Err(e),
            }
        }
        let Some(unis) = unis else { return Ok(None) };

        let mut by_var: BTreeMap<usize, Vec<&Univariate>> = BTreeMap::new();
        for u in &unis {
            by_var.entry(u.var).or_default().push(u);
        }
        let mut options: Vec<(usize, Vec<f64>)> = Vec::new();
        for (v, us) in by_var {
            let c = candidates(&us, self.sys.vars()[v].role);
            if c.is_empty() {
                return Ok(None);
            }
            options.push((v, c));
        }

        let unique: Vec<(usize, f64)> = options.iter().filter(|(_, c)| c.len() == 1).map(|(v, c)| (*v, c[0])).collect();
        if !unique.is_empty() {
            return match substitute_all(&eqs, &unique) {
                Some(next) => {
                    for &(v, x) in &unique {
                        fixed[v] = Some(x);
                    }
                    self.visit(next, fixed)
                }
                None => Ok(None),
            };
        }

        let (v, cands) = options.into_iter().min_by_key(|(v, c)| (c.len(), *v)).expect("nonempty");
        let mut branches: Vec<(f64, f64, Vec<Polynomial>)> = cands
            .into_iter()
            .filter_map(|x| substitute_all(&eqs, &[(v, x)]).map(|next| (branch_residual(&eqs, v, x), x, next)))
            .collect();
        branches.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        for (_, x, next) in branches {
            let mut f = fixed.clone();
            f[v] = Some(x);
            if let Some(sol) = self.visit(next, f)? {
                return Ok(Some(sol));
            }
        }
        Ok(None)
    }

    fn leaf(&self, fixed: &[Option<f64>]) -> Option<Vec<f64>> {
        let mut x: Vec<f64> = fixed.iter().map(|v| v.unwrap_or(0.0)).collect();
        gauss_newton(self.sys, &mut x, 8);
        for (w, l) in self.sys.slack_pairs() {
            x[w] = x[w].abs();
            x[l] = x[w] * x[w];
        }
        (self.sys.residual(&x) <= self.opts.accept_tol).then_some(x)
    }
}

/// Largest constant left over after fixing `var = x`.
fn branch_residual(eqs: &[Polynomial], var: usize, x: f64) -> f64 {
    eqs.iter().map(|e| e.substitute(var, x)).filter(|e| e.is_constant()).map(|e| e.max_abs_coeff()).fold(0.0, f64::max)
}

/// Substitutes every pair; `None` when some equation becomes a nonzero constant.
fn substitute_all(eqs: &[Polynomial], values: &[(usize, f64)]) -> Option<Vec<Polynomial>> {
    let mut out = Vec::with_capacity(eqs.len());
    for e in eqs {
        let scale = e.max_abs_coeff();
        let mut s = e.clone();
        for &(v, x) in values {
            s = s.substitute(v, x);
        }
        let cut = 1e-12 * s.max_abs_coeff().max(scale);
        let s = Polynomial::from_terms(s.terms().filter(|(_, c)| c.abs() > cut).map(|(m, &c)| (m.clone(), c)));
        if s.is_constant() {
            if s.max_abs_coeff() > constant_tol(scale) {
                return None;
            }
        } else {
            out.push(s);
        }
    }
    Some(out)
}

fn horner(coeffs: &[f64], x: f64) -> (f64, f64) {
    let (mut p, mut dp) = (0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

fn relative_value(coeffs: &[f64], x: f64) -> f64 {
    let scale = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs())) * x.abs().max(1.0).powi(coeffs.len() as i32 - 1);
    horner(coeffs, x).0.abs() / scale.max(f64::MIN_POSITIVE)
}

/// Real roots of the lowest-degree univariate, Newton-polished, kept if every
/// other univariate of the same variable vanishes there and the value fits
/// the variable's sign constraint.
fn candidates(us: &[&Univariate], role: VarRole) -> Vec<f64> {
    let base = us.iter().min_by_key(|u| u.coeffs.len()).expect("nonempty");
    let mut out: Vec<f64> = Vec::new();
    for z in poly_roots(&base.coeffs) {
        let near_real = z.im.abs() <= 1e-8 * z.norm().max(1.0);
        // A double root splits into a pair with small imaginary parts.
        let near_double = z.im.abs() <= 1e-4 * z.norm().max(1.0) && relative_value(&base.coeffs, z.re) < 1e-10;
        if !near_real && !near_double {
            continue;
        }
        let mut x = z.re;
        for _ in 0..4 {
            let (p, dp) = horner(&base.coeffs, x);
            if dp.abs() <= f64::EPSILON * p.abs() || dp == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() || step.abs() > 1e-3 * x.abs().max(1.0) {
                break;
            }
            x -= step;
        }
        if us.iter().any(|u| relative_value(&u.coeffs, x) > 1e-6) {
            continue;
        }
        match role {
            VarRole::Hamiltonian => {}
            VarRole::Rate | VarRole::Slack => {
                if x < -1e-9 {
                    continue;
                }
                x = x.max(0.0);
            }
        }
        if !out.iter().any(|&y| (y - x).abs() <= 1e-9 * x.abs().max(1.0)) {
            out.push(x);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Least-squares Newton steps on the full system.
fn gauss_newton(sys: &QuadraticSystem, x: &mut [f64], iters: usize) {
    let n = x.len();
    let m = sys.num_equations();
    if m == 0 || n == 0 {
        return;
    }
    for _ in 0..iters {
        let f = DVector::from_iterator(m, sys.equations().iter().map(|e| e.eval(x)));
        let before = f.amax();
        if before == 0.0 {
            return;
        }
        let mut j = DMatrix::<f64>::zeros(m, n);
        for (r, e) in sys.equations().iter().enumerate() {
            for (v, g) in e.gradient(x) {
                j[(r, v)] += g;
            }
        }
        let Ok(step) = j.svd(true, true).solve(&f, 1e-12) else { return };
        let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - s).collect();
        if sys.residual(&trial) >= before {
            return;
        }
        x.copy_from_slice(&trial);
    }
}

/// `max |L†L(assignment) − target|` over Pauli weights.
pub fn verify_solution(ansatz: &LiouvillianAnsatz, assignment: &[f64], target: &PauliSum) -> Result<f64> {
    let spec = ansatz.instantiate(assignment)?;
    Ok(ldl_pauli(&spec).max_abs_diff(target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xl::poly::{Monomial, Variable};
    use crate::xl::system::build_mq_system;

    fn system(roles: &[VarRole], eqs: Vec<Vec<(Vec<usize>, f64)>>) -> QuadraticSystem {
        let vars = roles.iter().enumerate().map(|(i, &role)| Variable { name: format!("x{i}"), role }).collect();
        let mut s = QuadraticSystem::new(vars).unwrap();
        for e in eqs {
            s.push(Polynomial::from_terms(e.into_iter().map(|(m, c)| (Monomial::from_vars(m), c)))).unwrap();
        }
        s
    }

    #[test]
    fn branches_over_square_roots() {
        use VarRole::Hamiltonian as H;
        // x² = 1, xy = y + 2: x = 1 is dead, x = −1 gives y = −1.
        let s = system(
            &[H, H],
            vec![vec![(vec![0, 0], 1.0), (vec![], -1.0)], vec![(vec![0, 1], 1.0), (vec![1], -1.0), (vec![], -2.0)]],
        );
        let sol = xl_solve(&s, 4).unwrap();
        assert!((sol.assignment[0] + 1.0).abs() < 1e-10);
        assert!((sol.assignment[1] + 1.0).abs() < 1e-10);
        assert!(sol.report.residual < 1e-12);
        assert!(sol.report.nodes >= 2);
    }

    #[test]
    fn inconsistent_is_unsolvable() {
        let s = system(
            &[VarRole::Hamiltonian],
            vec![vec![(vec![0, 0], 1.0), (vec![], -1.0)], vec![(vec![0, 0], 1.0), (vec![], -2.0)]],
        );
        assert!(matches!(xl_solve(&s, 4), Err(Error::Unsolvable { d_max: 4 })));
    }

    #[test]
    fn free_variables_default_to_zero() {
        let s = system(&[VarRole::Hamiltonian, VarRole::Hamiltonian], vec![vec![(vec![0, 0], 1.0), (vec![], -4.0)]]);
        let sol = xl_solve(&s, 2).unwrap();
        assert_eq!(sol.assignment[1], 0.0);
        assert_eq!(sol.report.free_vars, 1);
        assert!((sol.assignment[0].abs() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        use VarRole::Hamiltonian as H;
        let s = system(
            &[H, H],
            vec![vec![(vec![0, 0], 1.0), (vec![], -1.0)], vec![(vec![0, 1], 1.0), (vec![1], -1.0), (vec![], -2.0)]],
        );
        let opts = XlOptions { node_budget: 1, ..XlOptions::default() };
        assert!(matches!(xl_solve_with(&s, &opts), Err(Error::BudgetExceeded { budget: 1, .. })));
    }

    #[test]
    fn slack_takes_nonnegative_root() {
        use VarRole::*;
        // λ = 0.25, w² = λ.
        let s = system(
            &[Rate, Slack],
            vec![vec![(vec![0], 1.0), (vec![], -0.25)], vec![(vec![1, 1], 1.0), (vec![0], -1.0)]],
        );
        let sol = xl_solve(&s, 2).unwrap();
        assert!((sol.assignment[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_site_recovery() {
        let z = PauliSum::from_labels(1, [(1.0, "Z")]).unwrap();
        let a = LiouvillianAnsatz::new(
            1,
            1,
            vec![super::super::ansatz::AnsatzTerm { name: "h".into(), op: z }],
            vec![super::super::ansatz::AnsatzTerm { name: "up".into(), op: crate::pauli::ladder::raising(1, 0) }],
        )
        .unwrap();
        let params = [0.7, 0.3];
        let target = a.target(&params).unwrap();
        let sys = build_mq_system(&a, &target, true).unwrap();
        let sol = xl_solve(&sys, 4).unwrap();
        assert!(verify_solution(&a, &sol.assignment, &target).unwrap() < 1e-8);
        assert!((sol.assignment[1] - 0.3).abs() < 1e-8);
    }

    #[test]
    fn xxz_recovery() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a = LiouvillianAnsatz::xxz_chain(5).unwrap();
        let params = a.random_params(&mut rng);
        let target = a.target(&params).unwrap();
        let sys = build_mq_system(&a, &target, true).unwrap();
        let sol = xl_solve(&sys, 4).unwrap();
        assert!(verify_solution(&a, &sol.assignment, &target).unwrap() < 1e-8);
        let err = sol.assignment.iter().zip(&params).map(|(x, p)| (x - p).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "parameter error {err}");
    }

    #[test]
    fn verify_rejects_negative_rate() {
        let a = LiouvillianAnsatz::xxz_chain(2).unwrap();
        let target = a.target(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(verify_solution(&a, &[0.1, 0.2, -0.3, 0.4], &target).is_err());
        assert!(verify_solution(&a, &[0.1, 0.2, 0.3, 0.4], &target).unwrap() < 1e-14);
    }
}
