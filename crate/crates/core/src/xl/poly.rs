//! Sparse real polynomials and quadratic systems with a line-oriented text form.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients at or below this magnitude are discarded.
pub const COEFF_EPS: f64 = 1e-14;

/// Product of variables, stored as a sorted multiset of indices.
///
/// `Ord` is graded lexicographic: lower degree first, and among equal degrees
/// the monomial with the larger exponent on the lowest-index variable is larger.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Monomial(vec![i as u32])
    }

    pub fn from_vars(vars: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<u32> = vars.into_iter().map(|i| i as u32).collect();
        v.sort_unstable();
        Monomial(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn vars(&self) -> &[u32] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            if j == other.0.len() || (i < self.0.len() && self.0[i] <= other.0[j]) {
                v.push(self.0[i]);
                i += 1;
            } else {
                v.push(other.0[j]);
                j += 1;
            }
        }
        Monomial(v)
    }

    /// `Some(v)` when every factor is variable `v`.
    pub fn single_var(&self) -> Option<usize> {
        let first = *self.0.first()?;
        self.0.iter().all(|&v| v == first).then_some(first as usize)
    }

    pub fn exponent(&self, var: usize) -> usize {
        self.0.iter().filter(|&&v| v as usize == var).count()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0.iter().map(|&v| x[v as usize]).product()
    }

    /// All monomials of degree at most `d` over `vars`, ascending.
    pub fn all_up_to(vars: &[usize], d: usize) -> Vec<Monomial> {
        let mut out = vec![Monomial::one()];
        let mut layer = vec![Monomial::one()];
        for _ in 0..d {
            let mut next = Vec::new();
            for m in &layer {
                let last = m.0.last().map(|&v| v as usize);
                for &v in vars {
                    if last.is_none_or(|l| v >= l) {
                        let mut w = m.0.clone();
                        w.push(v as u32);
                        next.push(Monomial(w));
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out.sort();
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with real coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, f64)>) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: f64) {
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().abs() <= COEFF_EPS {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                if c.abs() > COEFF_EPS {
                    v.insert(c);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &f64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| c * m.eval(x)).sum()
    }

    pub fn mul_monomial(&self, g: &Monomial) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.mul(g), *c)).collect() }
    }

    /// Variables that occur with a nonzero coefficient, ascending.
    pub fn vars(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().flat_map(|m| m.vars().iter().map(|&i| i as usize)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Substitute `x_var = value`.
    pub fn substitute(&self, var: usize, value: f64) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                out.add_term(m.clone(), *c);
            } else {
                let rest = Monomial(m.0.iter().copied().filter(|&v| v as usize != var).collect());
                out.add_term(rest, c * value.powi(e as i32));
            }
        }
        out
    }

    /// Gradient entries `∂p/∂x_v` at `x`.
    pub fn gradient(&self, x: &[f64]) -> Vec<(usize, f64)> {
        let mut g: BTreeMap<usize, f64> = BTreeMap::new();
        for (m, c) in &self.terms {
            for (pos, &v) in m.0.iter().enumerate() {
                if pos > 0 && m.0[pos - 1] == v {
                    continue;
                }
                let e = m.exponent(v as usize) as f64;
                let mut rest = 1.0;
                let mut skipped = false;
                for &u in &m.0 {
                    if u == v && !skipped {
                        skipped = true;
                    } else {
                        rest *= x[u as usize];
                    }
                }
                *g.entry(v as usize).or_insert(0.0) += c * e * rest;
            }
        }
        g.into_iter().collect()
    }

    /// Coefficients of a univariate polynomial in `var`, ascending powers.
    /// `None` when another variable occurs.
    pub fn as_univariate(&self, var: usize) -> Option<Vec<f64>> {
        let mut out = vec![0.0; self.degree() + 1];
        for (m, c) in &self.terms {
            if !m.vars().iter().all(|&v| v as usize == var) {
                return None;
            }
            out[m.degree()] += c;
        }
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarRole {
    Hamiltonian,
    Rate,
    Slack,
}

impl VarRole {
    pub fn as_str(self) -> &'static str {
        match self {
            VarRole::Hamiltonian => "hamiltonian",
            VarRole::Rate => "rate",
            VarRole::Slack => "slack",
        }
    }

    pub fn parse(s: &str) -> Option<VarRole> {
        match s {
            "hamiltonian" | "h" => Some(VarRole::Hamiltonian),
            "rate" | "lambda" => Some(VarRole::Rate),
            "slack" | "w" => Some(VarRole::Slack),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub role: VarRole,
}

/// Equations `f_l(x) = 0` of degree at most two.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct QuadraticSystem {
    vars: Vec<Variable>,
    equations: Vec<Polynomial>,
}

impl QuadraticSystem {
    pub fn new(vars: Vec<Variable>) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            if v.name.is_empty() || v.name.chars().any(|ch| ch.is_whitespace() || ch == '*') {
                return Err(Error::Validation(format!("invalid variable name {:?}", v.name)));
            }
            if seen.insert(v.name.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate variable {}", v.name)));
            }
        }
        Ok(QuadraticSystem { vars, equations: Vec::new() })
    }

    /// Adds an equation; empty ones are skipped.
    pub fn push(&mut self, eq: Polynomial) -> Result<()> {
        if eq.degree() > 2 {
            return Err(Error::Validation(format!("equation of degree {} in a quadratic system", eq.degree())));
        }
        if let Some(&v) = eq.vars().last() {
            if v >= self.vars.len() {
                return Err(Error::Validation(format!("variable index {v} out of range")));
            }
        }
        if eq.terms().any(|(_, c)| !c.is_finite()) {
            return Err(Error::Validation("non-finite coefficient".into()));
        }
        if !eq.is_empty() {
            self.equations.push(eq);
        }
        Ok(())
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn equations(&self) -> &[Polynomial] {
        &self.equations
    }

    /// `N_u`.
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// `N_e`.
    pub fn num_equations(&self) -> usize {
        self.equations.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Largest `|f_l(x)|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.equations.iter().map(|e| e.eval(x).abs()).fold(0.0, f64::max)
    }

    /// For each slack variable, the rate it is tied to by `w² − λ = 0`.
    pub fn slack_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for eq in &self.equations {
            if eq.len() != 2 {
                continue;
            }
            let terms: Vec<_> = eq.terms().collect();
            let (lin, quad) = (terms[0], terms[1]);
            if lin.0.degree() == 1 && quad.0.degree() == 2 {
                if let (Some(w), Some(l)) = (quad.0.single_var(), lin.0.single_var()) {
                    if self.vars[w].role == VarRole::Slack && (lin.1 + quad.1).abs() <= COEFF_EPS {
                        out.push((w, l));
                    }
                }
            }
        }
        out
    }

    /// Checks that slack variables occur only through `w² − λ = 0`.
    pub fn check_slack_pattern(&self) -> Result<()> {
        let pairs = self.slack_pairs();
        for (i, v) in self.vars.iter().enumerate() {
            if v.role != VarRole::Slack {
                continue;
            }
            let uses = self.equations.iter().filter(|e| e.vars().contains(&i)).count();
            if uses != 1 || !pairs.iter().any(|&(w, _)| w == i) {
                return Err(Error::Validation(format!("slack variable {} must occur only in w² − λ = 0", v.name)));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vars {
            s.push_str(&format!("VAR {} {}\n", v.name, v.role.as_str()));
        }
        for eq in &self.equations {
            s.push_str("EQ");
            // Highest grlex term first.
            for (m, c) in eq.terms().collect::<Vec<_>>().into_iter().rev() {
                s.push(' ');
                s.push_str(&format!("{c:?}"));
                for &v in m.vars() {
                    s.push('*');
                    s.push_str(&self.vars[v as usize].name);
                }
            }
            s.push_str(" = 0\n");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut vars = Vec::new();
        let mut eq_lines = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: idx + 1, msg };
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("VAR") => {
                    let name = parts.next().ok_or_else(|| parse_err("missing variable name".into()))?;
                    let role = parts.next().ok_or_else(|| parse_err("missing variable role".into()))?;
                    let role = VarRole::parse(role).ok_or_else(|| parse_err(format!("unknown role {role:?}")))?;
                    if parts.next().is_some() {
                        return Err(parse_err("trailing tokens after VAR".into()));
                    }
                    if !eq_lines.is_empty() {
                        return Err(parse_err("VAR after the first EQ".into()));
                    }
                    vars.push(Variable { name: name.to_string(), role });
                }
                Some("EQ") => eq_lines.push((idx + 1, parts.map(str::to_string).collect::<Vec<_>>())),
                Some(other) => return Err(parse_err(format!("unknown directive {other:?}"))),
                None => {}
            }
        }
        let mut sys = QuadraticSystem::new(vars).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
        let index: HashMap<&str, usize> = sys.vars.iter().enumerate().map(|(i, v)| (v.name.as_str(), i)).collect();
        let mut equations = Vec::new();
        for (line, tokens) in eq_lines {
            let parse_err = |msg: String| Error::Parse { line, msg };
            let eq_pos = tokens.iter().position(|t| t == "=").ok_or_else(|| parse_err("missing '= 0'".into()))?;
            if tokens.len() != eq_pos + 2 || tokens[eq_pos + 1].parse::<f64>().ok() != Some(0.0) {
                return Err(parse_err("equation must end with '= 0'".into()));
            }
            let mut p = Polynomial::zero();
            for tok in &tokens[..eq_pos] {
                let mut factors = tok.split('*');
                let coeff: f64 = factors
                    .next()
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| parse_err(format!("bad coefficient in {tok:?}")))?;
                let mut vs = Vec::new();
                for f in factors {
                    vs.push(*index.get(f).ok_or_else(|| parse_err(format!("unknown variable {f:?}")))?);
                }
                p.add_term(Monomial::from_vars(vs), coeff);
            }
            if p.degree() > 2 {
                return Err(parse_err("degree above 2".into()));
            }
            equations.push(p);
        }
        for eq in equations {
            sys.push(eq)?;
        }
        Ok(sys)
    }
}

impl fmt::Display for QuadraticSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
