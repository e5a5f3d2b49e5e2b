use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::lindblad::DensityMatrix;
use crate::pauli::PauliSum;

use super::sampling::{hadamard_sample_rng, stream_rng, swap_sample_rng, SWAP_STREAM};
use super::substitute::{substitute, Substitution};

/// Shot totals: `n = n_h + n_s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotBudget {
    pub n: u64,
    pub n_h: u64,
    pub n_s: u64,
}

/// `‖A‖₂` for a Hermitian observable, computed densely.
pub fn spectral_norm_hermitian(a: &PauliSum) -> Result<f64> {
    let ev = hermitian_eigenvalues(&a.to_matrix()?);
    Ok(ev.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// `m‖A‖_F² / 2^{2n}`, which for Pauli weights is `m Σ g_i²`.
fn frobenius_term(a: &PauliSum) -> f64 {
    a.len() as f64 * a.coeff_norm_sqr()
}

/// Total shots for accuracy `ε` given a purity floor `γ`:
/// `N ≥ (2/(γ²ε²))(‖A‖₂² + m‖A‖_F²/2^{2n})`, split evenly between the two tests.
pub fn shot_budget(a: &PauliSum, gamma: f64, epsilon: f64) -> Result<ShotBudget> {
    if a.is_empty() {
        return Err(Error::DegenerateObservable);
    }
    for (name, v) in [("gamma", gamma), ("epsilon", epsilon)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::Validation(format!("{name} must lie in (0, 1], got {v}")));
        }
    }
    let norm2 = spectral_norm_hermitian(a)?;
    Ok(budget_from_norms(norm2, frobenius_term(a), gamma, epsilon))
}

fn budget_from_norms(norm2: f64, frob: f64, gamma: f64, epsilon: f64) -> ShotBudget {
    let exact = 2.0 / (gamma * gamma * epsilon * epsilon) * (norm2 * norm2 + frob);
    // Shave floating-point dust so exact integers do not round up by one.
    let n = (exact * (1.0 - 1e-12)).ceil().max(2.0) as u64;
    let half = n.div_ceil(2);
    ShotBudget { n: 2 * half, n_h: half, n_s: half }
}

/// Observable, its substitute and the shot allocation.
#[derive(Clone, Debug)]
pub struct MeasurementPlan {
    observable: PauliSum,
    substitution: Substitution,
    norm2: f64,
    n_h: u64,
    n_s: u64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct PlanFile {
    n: usize,
    observable: Vec<(f64, f64, String)>,
    n_h: u64,
    n_s: u64,
    seed: u64,
}

impl MeasurementPlan {
    pub fn new(observable: PauliSum, n_h: u64, n_s: u64, seed: u64) -> Result<Self> {
        if observable.is_empty() {
            return Err(Error::DegenerateObservable);
        }
        if !observable.is_hermitian(1e-12) {
            return Err(Error::Validation("observable weights must be real".into()));
        }
        let m = observable.len() as u64;
        if n_h < m || n_s == 0 {
            return Err(Error::Validation(format!(
                "need n_h ≥ {m} (one shot per term) and n_s ≥ 1; got n_h = {n_h}, n_s = {n_s}"
            )));
        }
        let substitution = substitute(&observable)?;
        let norm2 = spectral_norm_hermitian(&observable)?;
        Ok(MeasurementPlan { observable, substitution, norm2, n_h, n_s, seed })
    }

    /// Plan sized by [`shot_budget`].
    pub fn with_budget(observable: PauliSum, gamma: f64, epsilon: f64, seed: u64) -> Result<Self> {
        let b = shot_budget(&observable, gamma, epsilon)?;
        let m = observable.len() as u64;
        MeasurementPlan::new(observable, b.n_h.max(m), b.n_s, seed)
    }

    pub fn observable(&self) -> &PauliSum {
        &self.observable
    }

    pub fn substitution(&self) -> &Substitution {
        &self.substitution
    }

    pub fn n_h(&self) -> u64 {
        self.n_h
    }

    pub fn n_s(&self) -> u64 {
        self.n_s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        MeasurementPlan { seed, ..self.clone() }
    }

    pub fn norm2(&self) -> f64 {
        self.norm2
    }

    /// Hadamard shots per term: `n_h / m` each, remainder to the largest `|g|`.
    pub fn term_shots(&self) -> Vec<u64> {
        let terms = self.substitution.terms();
        let m = terms.len() as u64;
        let mut shots = vec![self.n_h / m; terms.len()];
        let mut order: Vec<usize> = (0..terms.len()).collect();
        order.sort_by(|&a, &b| terms[b].weight.norm().total_cmp(&terms[a].weight.norm()).then(a.cmp(&b)));
        for &k in order.iter().take((self.n_h % m) as usize) {
            shots[k] += 1;
        }
        shots
    }

    /// Predicted bias, variance and MSE bounds for a purity floor `γ`.
    pub fn bounds(&self, gamma: f64) -> (f64, f64, f64) {
        let g2 = gamma * gamma;
        let bias = self.norm2 / (g2 * self.n_s as f64);
        let var = self.norm2 * self.norm2 / (g2 * self.n_s as f64)
            + frobenius_term(&self.observable) / (g2 * self.n_h as f64);
        (bias, var, bias * bias + var)
    }

    pub fn to_json(&self) -> String {
        let file = PlanFile {
            n: self.observable.n(),
            observable: self.observable.to_triples(),
            n_h: self.n_h,
            n_s: self.n_s,
            seed: self.seed,
        };
        serde_json::to_string_pretty(&file).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: PlanFile = serde_json::from_str(text)?;
        MeasurementPlan::new(PauliSum::from_triples(f.n, &f.observable)?, f.n_h, f.n_s, f.seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub value: f64,
    pub numerator: f64,
    pub purity: f64,
    pub bias_bound: f64,
    pub var_bound: f64,
    pub mse_bound: f64,
    pub shots: u64,
}

impl EstimateReport {
    pub const CSV_HEADER: &'static str = "value,numerator,purity,bias_bound,var_bound,mse_bound,shots";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.value, self.numerator, self.purity, self.bias_bound, self.var_bound, self.mse_bound, self.shots
        )
    }
}

/// Ratio estimate of `⟨ρ|A|ρ⟩` from simulated Hadamard and swap tests.
pub fn estimate_expectation(plan: &MeasurementPlan, rho: &DensityMatrix, gamma_floor: f64) -> Result<EstimateReport> {
    if !(gamma_floor > 0.0 && gamma_floor <= 1.0) {
        return Err(Error::Validation(format!("gamma must lie in (0, 1], got {gamma_floor}")));
    }
    if plan.substitution.n() != rho.n() {
        return Err(Error::DimensionMismatch { expected: 2 * rho.n(), found: plan.observable.n() });
    }
    let mut numerator = 0.0;
    for (k, (term, shots)) in plan.substitution.terms().iter().zip(plan.term_shots()).enumerate() {
        let mut rng = stream_rng(plan.seed, k as u64);
        numerator += term.weight.re * hadamard_sample_rng(&term.q, rho, shots, &mut rng)?;
    }
    let purity = swap_sample_rng(rho, plan.n_s, &mut stream_rng(plan.seed, SWAP_STREAM))?;
    if purity <= 0.0 {
        return Err(Error::IllConditionedRatio { purity });
    }
    let (bias_bound, var_bound, mse_bound) = plan.bounds(gamma_floor);
    Ok(EstimateReport {
        value: numerator / purity,
        numerator,
        purity,
        bias_bound,
        var_bound,
        mse_bound,
        shots: plan.n_h + plan.n_s,
    })
}
