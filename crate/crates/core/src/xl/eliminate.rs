//! One XL round: extension, linearization, sparse elimination and extraction
//! of univariate equations.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::poly::{Monomial, QuadraticSystem};

/// Entries below this (rows are scaled to unit max norm) are treated as zero.
pub const DROP_TOL: f64 = 1e-12;
/// A row reduced to a bare constant above this level signals inconsistency.
pub const CONSISTENCY_TOL: f64 = 1e-8;
/// Column cap for exact rational elimination.
pub const EXACT_MAX_COLUMNS: usize = 200;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElimMode {
    #[default]
    Float,
    /// Rational arithmetic; at most [`EXACT_MAX_COLUMNS`] columns.
    Exact,
    /// Float, with row updates under one pivot spread over threads. Produces
    /// the same echelon form as `Float`.
    Parallel,
}

/// Sparse linear system over monomials. Columns are every monomial of degree
/// at most `D` over the active variables in descending graded-lex order, so
/// the constant is the last column; its entry is minus the right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizedSystem {
    columns: Vec<Monomial>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl LinearizedSystem {
    pub fn columns(&self) -> &[Monomial] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn density(&self) -> f64 {
        let cells = self.num_rows() * self.num_cols();
        if cells == 0 {
            0.0
        } else {
            self.nnz() as f64 / cells as f64
        }
    }

    /// Right-hand side of row `r`.
    pub fn rhs(&self, r: usize) -> f64 {
        let last = self.columns.len() - 1;
        self.rows[r].iter().find(|(c, _)| *c == last).map_or(0.0, |(_, v)| -v)
    }

    /// Matrix Market coordinate format, 1-based, columns labelled in comments.
    pub fn to_matrix_market(&self, names: &[String]) -> String {
        let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
        for (k, m) in self.columns.iter().enumerate() {
            let label = if m.is_one() {
                "1".to_string()
            } else {
                m.vars()
                    .iter()
                    .map(|&v| names.get(v as usize).cloned().unwrap_or_else(|| format!("x{v}")))
                    .collect::<Vec<_>>()
                    .join("*")
            };
            let _ = writeln!(s, "% column {} {}", k + 1, label);
        }
        let _ = writeln!(s, "{} {} {}", self.num_rows(), self.num_cols(), self.nnz());
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                let _ = writeln!(s, "{} {} {:e}", r + 1, c + 1, v);
            }
        }
        s
    }
}

/// `Σ coeffs[e]·x_var^e = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Univariate {
    pub var: usize,
    pub coeffs: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct XlRound {
    pub linearized: LinearizedSystem,
    /// Row-echelon form in elimination order (one row per pivot).
    pub eliminated: LinearizedSystem,
    pub univariates: Vec<Univariate>,
    /// Elimination produced `0 = c` with `c ≠ 0`.
    pub inconsistent: bool,
}

trait Field: Clone + Send + Sync {
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn magnitude(&self) -> f64;
    /// `a − f·b`.
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Self;
    fn ratio(a: &Self, b: &Self) -> Self;
    fn negligible(&self, scale: f64) -> bool;
    fn significant_constant(&self, scale: f64) -> bool;
    fn normalize(row: &mut [(usize, Self)]);
}

impl Field for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Self {
        a - f * b
    }
    fn ratio(a: &Self, b: &Self) -> Self {
        a / b
    }
    fn negligible(&self, scale: f64) -> bool {
        self.abs() <= DROP_TOL * scale
    }
    fn significant_constant(&self, scale: f64) -> bool {
        self.abs() > CONSISTENCY_TOL * scale
    }
    fn normalize(row: &mut [(usize, Self)]) {
        let m = row.iter().fold(0.0f64, |a, (_, v)| a.max(v.abs()));
        if m > 0.0 {
            row.iter_mut().for_each(|(_, v)| *v /= m);
        }
    }
}

impl Field for BigRational {
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn magnitude(&self) -> f64 {
        Field::to_f64(self).abs()
    }
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Self {
        a - f * b
    }
    fn ratio(a: &Self, b: &Self) -> Self {
        a / b
    }
    fn negligible(&self, _: f64) -> bool {
        self.is_zero()
    }
    fn significant_constant(&self, _: f64) -> bool {
        !self.is_zero()
    }
    fn normalize(row: &mut [(usize, Self)]) {
        // Scale so the leading entry is ±1; keeps numerators small.
        if let Some((_, lead)) = row.first() {
            let lead = lead.abs();
            row.iter_mut().for_each(|(_, v)| *v = &*v / &lead);
        }
    }
}

enum Update<T> {
    Row(Vec<(usize, T)>),
    Vanished,
    Inconsistent,
}

fn reduce<T: Field>(row: &[(usize, T)], pivot: &[(usize, T)], constant_pos: usize) -> Update<T> {
    let f = T::ratio(&row[0].1, &pivot[0].1);
    let scale = f.magnitude().max(1.0);
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < pivot.len() {
        let take_row = j == pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_piv = i == row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        let (pos, v) = if take_row {
            i += 1;
            (row[i - 1].0, row[i - 1].1.clone())
        } else if take_piv {
            j += 1;
            (pivot[j - 1].0, T::sub_mul(&T::from_f64(0.0), &f, &pivot[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (row[i - 1].0, T::sub_mul(&row[i - 1].1, &f, &pivot[j - 1].1))
        };
        if !v.negligible(scale) {
            out.push((pos, v));
        }
    }
    match out.first() {
        None => Update::Vanished,
        Some((pos, v)) if *pos == constant_pos => {
            if v.significant_constant(scale) {
                Update::Inconsistent
            } else {
                Update::Vanished
            }
        }
        Some(_) => {
            T::normalize(&mut out);
            Update::Row(out)
        }
    }
}

/// Row-echelon form by bucketed sparse elimination with partial pivoting.
/// Returns the pivot rows in position order and whether `0 = c` appeared.
fn echelon<T: Field>(mut rows: Vec<Vec<(usize, T)>>, ncols: usize, parallel: bool) -> (Vec<Vec<(usize, T)>>, bool) {
    let constant_pos = ncols - 1;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    let mut inconsistent = false;
    for (id, r) in rows.iter_mut().enumerate() {
        T::normalize(r);
        if let Some(&(pos, _)) = r.first() {
            buckets[pos].push(id);
        }
    }
    let mut pivots = Vec::new();
    for pos in 0..ncols {
        let mut ids = std::mem::take(&mut buckets[pos]);
        if ids.is_empty() {
            continue;
        }
        if pos == constant_pos {
            inconsistent = true;
            break;
        }
        ids.sort_unstable();
        let best = ids
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| rows[a.1][0].1.magnitude().total_cmp(&rows[b.1][0].1.magnitude()).then(b.0.cmp(&a.0)))
            .map(|(k, _)| k)
            .expect("nonempty bucket");
        let pivot_id = ids.remove(best);
        let pivot = std::mem::take(&mut rows[pivot_id]);
        let reduce_one = |id: &usize| (*id, reduce(&rows[*id], &pivot, constant_pos));
        let updates: Vec<(usize, Update<T>)> =
            if parallel { ids.par_iter().map(reduce_one).collect() } else { ids.iter().map(reduce_one).collect() };
        for (id, u) in updates {
            match u {
                Update::Row(r) => {
                    buckets[r[0].0].push(id);
                    rows[id] = r;
                }
                Update::Vanished => rows[id].clear(),
                Update::Inconsistent => {
                    rows[id].clear();
                    inconsistent = true;
                }
            }
        }
        pivots.push(pivot);
    }
    (pivots, inconsistent)
}

/// Column layout for one round.
struct Layout {
    columns: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// Elimination position of each column.
    pos_of: Vec<usize>,
    /// Column at each elimination position.
    col_at: Vec<usize>,
    mixed: usize,
}

impl Layout {
    fn new(active: &[usize], d: usize) -> Layout {
        let mut columns = Monomial::all_up_to(active, d);
        columns.reverse();
        let index: HashMap<Monomial, usize> = columns.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        // Mixed monomials first, then each variable's powers from x^d down to x, then 1.
        let mut col_at: Vec<usize> =
            (0..columns.len()).filter(|&k| !columns[k].is_one() && columns[k].single_var().is_none()).collect();
        let mixed = col_at.len();
        for &v in active {
            for e in (1..=d).rev() {
                col_at.push(index[&Monomial::from_vars(std::iter::repeat_n(v, e))]);
            }
        }
        col_at.push(columns.len() - 1);
        let mut pos_of = vec![0; columns.len()];
        for (p, &c) in col_at.iter().enumerate() {
            pos_of[c] = p;
        }
        Layout { columns, index, pos_of, col_at, mixed }
    }
}

/// Extension by all monomials of degree ≤ `d − 2`, linearization over
/// `Mono(d)`, elimination and univariate extraction.
pub fn xl_round(sys: &QuadraticSystem, d: usize) -> Result<XlRound> {
    xl_round_with(sys, d, ElimMode::Float)
}

pub fn xl_round_with(sys: &QuadraticSystem, d: usize, mode: ElimMode) -> Result<XlRound> {
    if d < 2 {
        return Err(Error::Validation(format!("XL degree must be at least 2, got {d}")));
    }
    let mut active: Vec<usize> = sys.equations().iter().flat_map(|e| e.vars()).collect();
    active.sort_unstable();
    active.dedup();
    let layout = Layout::new(&active, d);
    let ncols = layout.columns.len();
    if mode == ElimMode::Exact && ncols > EXACT_MAX_COLUMNS {
        return Err(Error::Validation(format!(
            "exact elimination is limited to {EXACT_MAX_COLUMNS} columns, this round has {ncols}"
        )));
    }

    let multipliers = Monomial::all_up_to(&active, d - 2);
    let mut lin_rows = Vec::with_capacity(sys.num_equations() * multipliers.len());
    for eq in sys.equations() {
        for g in &multipliers {
            let mut row: Vec<(usize, f64)> = eq.terms().map(|(m, &c)| (layout.index[&m.mul(g)], c)).collect();
            row.sort_unstable_by_key(|e| e.0);
            lin_rows.push(row);
        }
    }
    let linearized = LinearizedSystem { columns: layout.columns.clone(), rows: lin_rows };

    let positioned = |row: &Vec<(usize, f64)>| {
        let mut r: Vec<(usize, f64)> = row.iter().map(|&(c, v)| (layout.pos_of[c], v)).collect();
        r.sort_unstable_by_key(|e| e.0);
        r
    };
    let (pivots, inconsistent): (Vec<Vec<(usize, f64)>>, bool) = match mode {
        ElimMode::Exact => {
            let rows = linearized
                .rows
                .iter()
                .map(|r| positioned(r).into_iter().map(|(p, v)| (p, BigRational::from_f64(v))).collect())
                .collect();
            let (piv, inc) = echelon::<BigRational>(rows, ncols, false);
            let piv = piv.into_iter().map(|r| r.into_iter().map(|(p, v)| (p, Field::to_f64(&v))).collect()).collect();
            (piv, inc)
        }
        _ => {
            let rows = linearized.rows.iter().map(positioned).collect();
            echelon::<f64>(rows, ncols, mode == ElimMode::Parallel)
        }
    };

    let univariates = if inconsistent { Vec::new() } else { extract_univariates(&pivots, &layout, &active, d) };
    let eliminated = LinearizedSystem {
        columns: layout.columns.clone(),
        rows: pivots
            .iter()
            .map(|r| {
                let mut row: Vec<(usize, f64)> = r.iter().map(|&(p, v)| (layout.col_at[p], v)).collect();
                row.sort_unstable_by_key(|e| e.0);
                row
            })
            .collect(),
    };
    if !inconsistent && univariates.is_empty() {
        return Err(Error::NeedHigherD { d });
    }
    Ok(XlRound { linearized, eliminated, univariates, inconsistent })
}

/// Gauss-Jordan on the pivot rows that live entirely in pure-power columns,
/// then keep rows touching a single variable.
fn extract_univariates(pivots: &[Vec<(usize, f64)>], layout: &Layout, active: &[usize], d: usize) -> Vec<Univariate> {
    let width = layout.col_at.len() - layout.mixed;
    let mut dense: Vec<(usize, Vec<f64>)> = pivots
        .iter()
        .filter(|r| r[0].0 >= layout.mixed)
        .map(|r| {
            let mut v = vec![0.0; width];
            for &(p, x) in r {
                v[p - layout.mixed] = x;
            }
            (r[0].0 - layout.mixed, v)
        })
        .collect();
    for i in (0..dense.len()).rev() {
        let (lead, prow) = (dense[i].0, dense[i].1.clone());
        for (_, row) in dense.iter_mut().take(i) {
            let f = row[lead] / prow[lead];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= f * p;
                }
                row[lead] = 0.0;
            }
        }
    }
    let var_of = |k: usize| if k + 1 == width { None } else { Some((active[k / d], d - k % d)) };
    let mut out = Vec::new();
    for (_, row) in dense {
        let scale = row.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut var = None;
        let mut coeffs = vec![0.0; d + 1];
        let mut single = true;
        for (k, &x) in row.iter().enumerate() {
            if x.abs() <= DROP_TOL * scale {
                continue;
            }
            match var_of(k) {
                None => coeffs[0] = x / scale,
                Some((v, e)) => {
                    if var.is_some_and(|w| w != v) {
                        single = false;
                        break;
                    }
                    var = Some(v);
                    coeffs[e] = x / scale;
                }
            }
        }
        if let (true, Some(v)) = (single, var) {
            while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
                coeffs.pop();
            }
            out.push(Univariate { var: v, coeffs });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xl::poly::{Polynomial, VarRole, Variable};

    fn system(nvars: usize, eqs: Vec<Vec<(Vec<usize>, f64)>>) -> QuadraticSystem {
        let vars = (0..nvars).map(|i| Variable { name: format!("x{i}"), role: VarRole::Hamiltonian }).collect();
        let mut s = QuadraticSystem::new(vars).unwrap();
        for e in eqs {
            s.push(Polynomial::from_terms(e.into_iter().map(|(m, c)| (Monomial::from_vars(m), c)))).unwrap();
        }
        s
    }

    #[test]
    fn square_and_product() {
        // x² − 1 = 0, xy − y = 0.
        let s = system(2, vec![vec![(vec![0, 0], 1.0), (vec![], -1.0)], vec![(vec![0, 1], 1.0), (vec![1], -1.0)]]);
        let r = xl_round(&s, 2).unwrap();
        assert_eq!(r.linearized.num_cols(), 6);
        assert_eq!(r.univariates, vec![Univariate { var: 0, coeffs: vec![-1.0, 0.0, 1.0] }]);
        assert!(!r.inconsistent);
        assert!((r.linearized.rhs(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inconsistent_system() {
        let s = system(1, vec![vec![(vec![0, 0], 1.0), (vec![], -1.0)], vec![(vec![0, 0], 1.0), (vec![], -2.0)]]);
        assert!(xl_round(&s, 2).unwrap().inconsistent);
    }

    #[test]
    fn no_univariate_needs_higher_degree() {
        // x y − 1 = 0 alone.
        let s = system(2, vec![vec![(vec![0, 1], 1.0), (vec![], -1.0)]]);
        assert!(matches!(xl_round(&s, 2), Err(Error::NeedHigherD { d: 2 })));
        assert!(xl_round(&s, 1).is_err());
    }

    #[test]
    fn extension_counts() {
        let s = system(
            3,
            vec![vec![(vec![0, 1], 1.0), (vec![2], 2.0), (vec![], -1.0)], vec![(vec![1, 1], 1.0), (vec![], -4.0)]],
        );
        let r = xl_round_with(&s, 3, ElimMode::Float);
        let lin = match r {
            Ok(r) => r.linearized,
            Err(Error::NeedHigherD { .. }) => return,
            Err(e) => panic!("{e}"),
        };
        // 2 equations × 4 multipliers; C(3 + 3, 3) columns.
        assert_eq!(lin.num_rows(), 8);
        assert_eq!(lin.num_cols(), 20);
    }

    #[test]
    fn modes_agree() {
        // Linear-in-monomials system with a unique solution x = 2, y = −1.
        let s = system(
            2,
            vec![
                vec![(vec![0, 0], 1.0), (vec![1], 2.0), (vec![], -2.0)],
                vec![(vec![0, 1], 1.0), (vec![0], 1.0)],
                vec![(vec![1, 1], 3.0), (vec![0], -1.0), (vec![], -1.0)],
                vec![(vec![0], 0.5), (vec![1], 1.0)],
            ],
        );
        let f = xl_round_with(&s, 2, ElimMode::Float).unwrap();
        let p = xl_round_with(&s, 2, ElimMode::Parallel).unwrap();
        let e = xl_round_with(&s, 2, ElimMode::Exact).unwrap();
        assert_eq!(f.eliminated, p.eliminated);
        assert_eq!(f.univariates.len(), e.univariates.len());
        for (a, b) in f.univariates.iter().zip(&e.univariates) {
            assert_eq!(a.var, b.var);
            for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matrix_market_header() {
        let s = system(2, vec![vec![(vec![0, 0], 1.0), (vec![], -1.0)], vec![(vec![0, 1], 1.0), (vec![1], -1.0)]]);
        let r = xl_round(&s, 2).unwrap();
        let mm = r.linearized.to_matrix_market(&["x".into(), "y".into()]);
        assert!(mm.starts_with("%%MatrixMarket matrix coordinate real general\n"));
        assert!(mm.contains("% column 1 x*x\n"));
        assert!(mm.contains("\n2 6 4\n"));
    }

    #[test]
    fn exact_mode_column_cap() {
        let n = 20;
        let eqs = (0..n).map(|i| vec![(vec![i, i], 1.0), (vec![], -1.0)]).collect();
        let s = system(n, eqs);
        assert!(matches!(xl_round_with(&s, 2, ElimMode::Exact), Err(Error::Validation(_))));
    }
}
