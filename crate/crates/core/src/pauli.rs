//! Symbolic algebra over n-qubit Pauli operators.
//!
//! A [`PauliString`] is a phase-free word over `{I, X, Y, Z}` stored as a pair
//! of bit masks; qubit 0 is the most significant bit of the matrix index, which
//! is also the most significant bit of the masks. A [`PauliSum`] maps strings
//! to complex weights and never stores a weight below [`ZERO_THRESHOLD`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, check_dense, ComplexMatrix};

/// Coefficients with magnitude below this are dropped.
pub const ZERO_THRESHOLD: f64 = 1e-14;

/// Largest supported string width.
pub const MAX_QUBITS: usize = 64;

const I_POW: [Complex64; 4] =
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)];

/// `i^k` for any integer `k`.
#[inline]
pub fn i_pow(k: i64) -> Complex64 {
    I_POW[k.rem_euclid(4) as usize]
}

/// Single-qubit Pauli letter. The derived order `I < X < Y < Z` is the
/// canonical letter order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    #[inline]
    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn from_char(ch: char) -> Option<Pauli> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A phase-free tensor product of Pauli letters on `n` qubits.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u32,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits supported");
        PauliString { n: n as u32, x: 0, z: 0 }
    }

    pub fn from_letters(letters: &[Pauli]) -> Result<Self> {
        let n = letters.len();
        if n > MAX_QUBITS {
            return Err(Error::Capacity { qubits: n, cap: MAX_QUBITS });
        }
        let mut s = PauliString::identity(n);
        for (k, &p) in letters.iter().enumerate() {
            s.set(k, p);
        }
        Ok(s)
    }

    /// Identity everywhere except the listed `(qubit, letter)` pairs.
    pub fn with_letters(n: usize, sites: &[(usize, Pauli)]) -> Self {
        let mut s = PauliString::identity(n);
        for &(k, p) in sites {
            s.set(k, p);
        }
        s
    }

    /// Builds a string directly from index-convention masks.
    pub fn from_masks(n: usize, x: u64, z: u64) -> Self {
        assert!(n <= MAX_QUBITS);
        let mask = full_mask(n);
        PauliString { n: n as u32, x: x & mask, z: z & mask }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// X-component mask; bit `n-1-k` belongs to qubit `k`.
    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    #[inline]
    fn bit(&self, k: usize) -> u32 {
        (self.n - 1) - k as u32
    }

    pub fn letter(&self, k: usize) -> Pauli {
        assert!(k < self.n(), "qubit {k} out of range");
        let b = self.bit(k);
        Pauli::from_bits((self.x >> b) & 1 == 1, (self.z >> b) & 1 == 1)
    }

    pub fn set(&mut self, k: usize, p: Pauli) {
        assert!(k < self.n(), "qubit {k} out of range");
        let b = self.bit(k);
        let (x, z) = p.bits();
        self.x = (self.x & !(1 << b)) | ((x as u64) << b);
        self.z = (self.z & !(1 << b)) | ((z as u64) << b);
    }

    pub fn letters(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.n()).map(move |k| self.letter(k))
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `P^T = s P` and `P^* = s P` with `s = (-1)^{#Y}`.
    pub fn transpose_sign(&self) -> f64 {
        if self.y_count().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Product `self · other = phase · product`.
    pub fn mul(&self, other: &PauliString) -> Result<(Complex64, PauliString)> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &PauliString) -> (Complex64, PauliString) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // P = i^{x.z} X^x Z^z, and Z^z X^x = (-1)^{z.x} X^x Z^z.
        let e = (self.x & self.z).count_ones() as i64 + (other.x & other.z).count_ones() as i64
            - (x & z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64;
        (i_pow(e), PauliString { n: self.n, x, z })
    }

    /// `self ⊗ other`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let n = self.n() + other.n();
        assert!(n <= MAX_QUBITS, "tensor product exceeds {MAX_QUBITS} qubits");
        let shift = other.n;
        PauliString { n: n as u32, x: shl(self.x, shift) | other.x, z: shl(self.z, shift) | other.z }
    }

    /// Splits into the first `k` qubits and the remainder.
    pub fn split_at(&self, k: usize) -> (PauliString, PauliString) {
        assert!(k <= self.n());
        let rest = self.n() - k;
        let low = full_mask(rest);
        (
            PauliString { n: k as u32, x: shr(self.x, rest as u32), z: shr(self.z, rest as u32) },
            PauliString { n: rest as u32, x: self.x & low, z: self.z & low },
        )
    }

    /// Column of the nonzero entry in row... i.e. `P|c> = value(c) |c ^ x>`.
    #[inline]
    pub(crate) fn action(&self, col: usize) -> (usize, Complex64) {
        let sign = if (col as u64 & self.z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        (col ^ self.x as usize, i_pow(self.y_count() as i64) * sign)
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        check_dense(self.n())?;
        let d = 1usize << self.n();
        let mut m = DMatrix::zeros(d, d);
        for col in 0..d {
            let (row, v) = self.action(col);
            m[(row, col)] = v;
        }
        Ok(m)
    }

    fn letter_code(x: bool, z: bool) -> u8 {
        match (x, z) {
            (false, false) => 0,
            (true, false) => 1,
            (true, true) => 2,
            (false, true) => 3,
        }
    }
}

#[inline]
fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
fn shl(v: u64, s: u32) -> u64 {
    if s >= 64 {
        0
    } else {
        v << s
    }
}

#[inline]
fn shr(v: u64, s: u32) -> u64 {
    if s >= 64 {
        0
    } else {
        v >> s
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            let diff = (self.x ^ other.x) | (self.z ^ other.z);
            if diff == 0 {
                return Ordering::Equal;
            }
            // Leading qubit = highest bit.
            let b = 63 - diff.leading_zeros();
            let a = PauliString::letter_code((self.x >> b) & 1 == 1, (self.z >> b) & 1 == 1);
            let o = PauliString::letter_code((other.x >> b) & 1 == 1, (other.z >> b) & 1 == 1);
            a.cmp(&o)
        })
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.letters() {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|ch| {
                Pauli::from_char(ch)
                    .ok_or_else(|| Error::Parse { line: 0, msg: format!("invalid Pauli letter {ch:?}") })
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::from_letters(&letters)
    }
}

/// Product of two strings: `(phase, product)` with `a·b = phase·product`.
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<(Complex64, PauliString)> {
    a.mul(b)
}

/// Weighted sum of Pauli strings on a common number of qubits.
#[derive(Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        PauliSum { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        PauliSum::from_string(PauliString::identity(n), c(1.0, 0.0))
    }

    pub fn from_string(s: PauliString, coeff: Complex64) -> Self {
        let mut sum = PauliSum::zero(s.n());
        sum.add_term(s, coeff);
        sum
    }

    /// Builds a sum from `(coefficient, letters)` pairs such as `(0.5, "XXI")`.
    pub fn from_labels<C: Into<Complex64>>(
        n: usize,
        terms: impl IntoIterator<Item = (C, &'static str)>,
    ) -> Result<Self> {
        let mut sum = PauliSum::zero(n);
        for (coeff, label) in terms {
            let s: PauliString = label.parse()?;
            sum.try_add_term(s, coeff.into())?;
        }
        Ok(sum)
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (PauliString, Complex64)>) -> Result<Self> {
        let mut sum = PauliSum::zero(n);
        for (s, coeff) in terms {
            sum.try_add_term(s, coeff)?;
        }
        Ok(sum)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    pub fn try_add_term(&mut self, s: PauliString, coeff: Complex64) -> Result<()> {
        if s.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: s.n() });
        }
        self.add_term(s, coeff);
        Ok(())
    }

    /// Adds `coeff · s`, pruning the entry if it cancels.
    pub fn add_term(&mut self, s: PauliString, coeff: Complex64) {
        assert_eq!(s.n(), self.n, "Pauli string width mismatch");
        let entry = self.terms.entry(s).or_default();
        *entry += coeff;
        if entry.norm() < ZERO_THRESHOLD {
            self.terms.remove(&s);
        }
    }

    pub fn scale(&self, k: Complex64) -> PauliSum {
        let mut out = PauliSum::zero(self.n);
        for (s, v) in &self.terms {
            out.add_term(*s, v * k);
        }
        out
    }

    pub fn scale_real(&self, k: f64) -> PauliSum {
        self.scale(c(k, 0.0))
    }

    pub fn checked_add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.same_width(other)?;
        let mut out = self.clone();
        for (s, v) in &other.terms {
            out.add_term(*s, *v);
        }
        Ok(out)
    }

    /// Operator product `self · other`.
    pub fn checked_mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.same_width(other)?;
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (a, va) in &self.terms {
            for (b, vb) in &other.terms {
                let (phase, p) = a.mul_unchecked(b);
                *acc.entry(p).or_default() += phase * va * vb;
            }
        }
        acc.retain(|_, v| v.norm() >= ZERO_THRESHOLD);
        Ok(PauliSum { n: self.n, terms: acc })
    }

    /// `self ⊗ other`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::zero(self.n + other.n);
        for (a, va) in &self.terms {
            for (b, vb) in &other.terms {
                out.add_term(a.tensor(b), va * vb);
            }
        }
        out
    }

    pub fn adjoint(&self) -> PauliSum {
        self.map_coeffs(|_, v| v.conj())
    }

    /// Entrywise complex conjugate of the matrix.
    pub fn conj(&self) -> PauliSum {
        self.map_coeffs(|s, v| v.conj() * s.transpose_sign())
    }

    pub fn transpose(&self) -> PauliSum {
        self.map_coeffs(|s, v| v * s.transpose_sign())
    }

    fn map_coeffs(&self, f: impl Fn(&PauliString, Complex64) -> Complex64) -> PauliSum {
        PauliSum { n: self.n, terms: self.terms.iter().map(|(s, v)| (*s, f(s, *v))).collect() }
    }

    /// True when every coefficient is real within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|v| v.im.abs() <= tol)
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_abs_diff(&self, other: &PauliSum) -> f64 {
        let mut worst: f64 = 0.0;
        for (s, v) in &self.terms {
            worst = worst.max((v - other.coeff(s)).norm());
        }
        for (s, v) in &other.terms {
            if !self.terms.contains_key(s) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// Sum of squared coefficient magnitudes.
    pub fn coeff_norm_sqr(&self) -> f64 {
        self.terms.values().map(|v| v.norm_sqr()).sum()
    }

    /// Maximum Pauli weight over the terms.
    pub fn locality(&self) -> usize {
        self.terms.keys().map(|s| s.weight()).max().unwrap_or(0)
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        check_dense(self.n)?;
        let d = 1usize << self.n;
        let mut m = DMatrix::zeros(d, d);
        for (s, v) in &self.terms {
            for col in 0..d {
                let (row, w) = s.action(col);
                m[(row, col)] += v * w;
            }
        }
        Ok(m)
    }

    /// `(re, im, letters)` triples in canonical order.
    pub fn to_triples(&self) -> Vec<(f64, f64, String)> {
        self.terms.iter().map(|(s, v)| (v.re, v.im, s.to_string())).collect()
    }

    pub fn from_triples(n: usize, triples: &[(f64, f64, String)]) -> Result<PauliSum> {
        let mut sum = PauliSum::zero(n);
        for (k, (re, im, letters)) in triples.iter().enumerate() {
            let s: PauliString = letters.parse().map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line: k + 1, msg },
                other => other,
            })?;
            sum.try_add_term(s, c(*re, *im))?;
        }
        Ok(sum)
    }

    /// Parses the line format `<re> <im> <letters>`; `#` starts a comment.
    pub fn parse_text(text: &str) -> Result<PauliSum> {
        let mut n = None;
        let mut sum: Option<PauliSum> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected `<re> <im> <letters>`, found {} fields", fields.len()),
                });
            }
            let parse_f =
                |t: &str| t.parse::<f64>().map_err(|e| Error::Parse { line: line_no, msg: format!("{t:?}: {e}") });
            let re = parse_f(fields[0])?;
            let im = parse_f(fields[1])?;
            let s: PauliString = fields[2].parse().map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line: line_no, msg },
                other => other,
            })?;
            let width = *n.get_or_insert(s.n());
            if width != s.n() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("term has {} qubits, expected {width}", s.n()),
                });
            }
            sum.get_or_insert_with(|| PauliSum::zero(width)).add_term(s, c(re, im));
        }
        sum.ok_or(Error::Parse { line: 0, msg: "no terms found".into() })
    }

    fn same_width(&self, other: &PauliSum) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, v) in &self.terms {
            writeln!(f, "{} {} {}", v.re, v.im, s)?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliSum[{}](", self.n)?;
        for (k, (s, v)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i){}", v.re, v.im, s)?;
        }
        write!(f, ")")
    }
}

impl<'a> Add<&'a PauliSum> for &'a PauliSum {
    type Output = PauliSum;

    /// Panics on width mismatch; see [`PauliSum::checked_add`].
    fn add(self, rhs: &'a PauliSum) -> PauliSum {
        self.checked_add(rhs).expect("PauliSum width mismatch")
    }
}

impl<'a> Sub<&'a PauliSum> for &'a PauliSum {
    type Output = PauliSum;

    fn sub(self, rhs: &'a PauliSum) -> PauliSum {
        self.checked_add(&-rhs).expect("PauliSum width mismatch")
    }
}

impl<'a> Mul<&'a PauliSum> for &'a PauliSum {
    type Output = PauliSum;

    fn mul(self, rhs: &'a PauliSum) -> PauliSum {
        self.checked_mul(rhs).expect("PauliSum width mismatch")
    }
}

impl Mul<Complex64> for &PauliSum {
    type Output = PauliSum;

    fn mul(self, rhs: Complex64) -> PauliSum {
        self.scale(rhs)
    }
}

impl Mul<f64> for &PauliSum {
    type Output = PauliSum;

    fn mul(self, rhs: f64) -> PauliSum {
        self.scale_real(rhs)
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;

    fn neg(self) -> PauliSum {
        self.scale_real(-1.0)
    }
}

/// Expands a dense matrix in the Pauli basis: the weight of `P` is
/// `Tr(P·M) / 2^n`.
pub fn pauli_decompose(m: &ComplexMatrix) -> Result<PauliSum> {
    let d = m.nrows();
    if d != m.ncols() || d == 0 || !d.is_power_of_two() {
        return Err(Error::Shape(format!("expected a square power-of-two matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let n = d.trailing_zeros() as usize;
    check_dense(n)?;
    let mut out = PauliSum::zero(n);
    let mut buf = vec![Complex64::default(); d];
    for x in 0..d {
        // Tr(P M) = i^{#Y} Σ_c (-1)^{c·z} M[c, c^x]; the sum over c for all z is
        // a Walsh-Hadamard transform.
        for (col, slot) in buf.iter_mut().enumerate() {
            *slot = m[(col, col ^ x)];
        }
        walsh_hadamard(&mut buf);
        for (z, w) in buf.iter().enumerate() {
            let s = PauliString::from_masks(n, x as u64, z as u64);
            let v = i_pow(s.y_count() as i64) * w / d as f64;
            if v.norm() >= ZERO_THRESHOLD {
                out.add_term(s, v);
            }
        }
    }
    Ok(out)
}

fn walsh_hadamard(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (p, q) in a.iter_mut().zip(b.iter_mut()) {
                let (u, w) = (*p, *q);
                *p = u + w;
                *q = u - w;
            }
        }
        h *= 2;
    }
}

/// Single-qubit ladder operators as Pauli sums.
pub mod ladder {
    use super::*;

    /// `|0><1| = (X + iY)/2` on qubit `k`.
    pub fn lowering(n: usize, k: usize) -> PauliSum {
        let mut s = PauliSum::zero(n);
        s.add_term(PauliString::with_letters(n, &[(k, Pauli::X)]), c(0.5, 0.0));
        s.add_term(PauliString::with_letters(n, &[(k, Pauli::Y)]), c(0.0, 0.5));
        s
    }

    /// `|1><0| = (X - iY)/2` on qubit `k`.
    pub fn raising(n: usize, k: usize) -> PauliSum {
        lowering(n, k).adjoint()
    }

    /// `|b><b|` on qubit `k`.
    pub fn projector(n: usize, k: usize, b: bool) -> PauliSum {
        let mut s = PauliSum::zero(n);
        s.add_term(PauliString::identity(n), c(0.5, 0.0));
        let sign = if b { -0.5 } else { 0.5 };
        s.add_term(PauliString::with_letters(n, &[(k, Pauli::Z)]), c(sign, 0.0));
        s
    }
}
