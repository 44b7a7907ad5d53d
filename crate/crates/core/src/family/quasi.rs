//! Quasi-polynomials of period `q`: one coefficient row per residue class.
//!
//! In k-form the row for `r` is a polynomial in `k` where `n = qk + r`; in
//! n-form it is a polynomial in `n` itself.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_traits::{One, Pow, Zero};

use crate::exactmath::{int, is_integral, Rational};

/// Coefficient ring of a quasi-polynomial: a `Q`-vector space.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, by: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    /// Every rational entry times `m` is an integer.
    fn integral_after(&self, m: &BigInt) -> bool;
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn scale(&self, by: &Rational) -> Self {
        self * by
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn integral_after(&self, m: &BigInt) -> bool {
        is_integral(&(self * int(m.clone())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    K,
    N,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPoly<T> {
    q: u64,
    form: Form,
    rows: BTreeMap<u64, Vec<T>>,
}

impl<T: Coeff> QuasiPoly<T> {
    pub fn new(q: u64, form: Form) -> Self {
        assert!(q >= 1, "period must be positive");
        QuasiPoly {
            q,
            form,
            rows: BTreeMap::new(),
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn insert(&mut self, r: u64, coeffs: Vec<T>) {
        assert!(r < self.q, "residue {r} out of range for period {}", self.q);
        self.rows.insert(r, coeffs);
    }

    pub fn row(&self, r: u64) -> Option<&[T]> {
        self.rows.get(&r).map(|v| v.as_slice())
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, &[T])> {
        self.rows.iter().map(|(r, v)| (*r, v.as_slice()))
    }

    /// Largest power with a nonzero coefficient over all rows.
    pub fn degree(&self) -> usize {
        self.rows
            .values()
            .filter_map(|row| row.iter().rposition(|c| !c.is_zero()))
            .max()
            .unwrap_or(0)
    }

    /// Value at `n`, when the residue class of `n` has a row.
    pub fn eval(&self, n: &BigInt) -> Option<T> {
        let (k, r) = n.div_mod_floor(&BigInt::from(self.q));
        let r = u64::try_from(r).expect("residue fits in u64");
        let row = self.rows.get(&r)?;
        let x = match self.form {
            Form::K => int(k),
            Form::N => int(n.clone()),
        };
        let mut acc = T::zero();
        for c in row.iter().rev() {
            acc = acc.scale(&x).add(c);
        }
        Some(acc)
    }

    /// `c_j(r) = Σ_{i≥j} a_i(r) C(i, j) (-r)^{i-j} q^{-i}`.
    pub fn to_n_form(&self) -> Self {
        match self.form {
            Form::N => self.clone(),
            Form::K => self.convert(Form::N, |i, j, r, q| {
                let sign = if (i - j) % 2 == 0 { int(1) } else { int(-1) };
                sign * int(binomial(BigInt::from(i), BigInt::from(j)))
                    * int(BigInt::from(r).pow(i - j))
                    / int(BigInt::from(q).pow(i))
            }),
        }
    }

    /// `a_i(r) = Σ_{j≥i} c_j(r) C(j, i) r^{j-i} q^i`, the inverse of
    /// [`QuasiPoly::to_n_form`].
    pub fn to_k_form(&self) -> Self {
        match self.form {
            Form::K => self.clone(),
            Form::N => self.convert(Form::K, |j, i, r, q| {
                int(binomial(BigInt::from(j), BigInt::from(i)))
                    * int(BigInt::from(r).pow(j - i))
                    * int(BigInt::from(q).pow(i))
            }),
        }
    }

    /// `out_j = Σ_{i≥j} in_i · w(i, j, r, q)`.
    fn convert(&self, form: Form, w: impl Fn(usize, usize, u64, u64) -> Rational) -> Self {
        let mut out = QuasiPoly::new(self.q, form);
        for (&r, row) in &self.rows {
            let new_row = (0..row.len())
                .map(|j| {
                    (j..row.len()).fold(T::zero(), |acc, i| acc.add(&row[i].scale(&w(i, j, r, self.q))))
                })
                .collect();
            out.rows.insert(r, new_row);
        }
        out
    }

    /// Powers `i` (with residues) whose coefficient times `12 q^{shift(i)}`
    /// is not integral.
    fn denominator_failures(&self, shift: impl Fn(usize) -> u32) -> Vec<(u64, usize)> {
        let mut bad = Vec::new();
        for (&r, row) in &self.rows {
            for (i, c) in row.iter().enumerate() {
                let m = BigInt::from(12) * BigInt::from(self.q).pow(shift(i));
                if !c.integral_after(&m) {
                    bad.push((r, i));
                }
            }
        }
        bad
    }

    /// n-form bound `c_i ∈ (1/12q^{i+2})Z`; returns offending `(r, i)`.
    pub fn n_form_denominator_failures(&self) -> Vec<(u64, usize)> {
        self.to_n_form().denominator_failures(|i| i as u32 + 2)
    }

    /// k-form bound `a_i ∈ (1/12q²)Z`; returns offending `(r, i)`.
    pub fn k_form_denominator_failures(&self) -> Vec<(u64, usize)> {
        self.to_k_form().denominator_failures(|_| 2)
    }
}

/// Exact interpolating polynomial (monomial coefficients, lowest first) of
/// degree `< points.len()` through `(x_i, y_i)` with distinct `x_i`.
pub fn interpolate<T: Coeff>(points: &[(Rational, T)]) -> Vec<T> {
    let n = points.len();
    // Newton divided differences.
    let mut table: Vec<T> = points.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let dx = &points[i].0 - &points[i - level].0;
            assert!(!Zero::is_zero(&dx), "interpolation nodes must be distinct");
            table[i] = table[i].add(&table[i - 1].scale(&-Rational::one())).scale(&dx.recip());
        }
    }
    // Expand Σ table[i] Π_{j<i} (x - x_j) by Horner from the top.
    let mut poly: Vec<T> = vec![T::zero(); n];
    for i in (0..n).rev() {
        // poly <- poly * (x - x_i) + table[i]
        let xi = &points[i].0;
        let mut next = vec![T::zero(); n];
        for (p, c) in poly.iter().enumerate() {
            if p + 1 < n {
                next[p + 1] = next[p + 1].add(c);
            }
            next[p] = next[p].add(&c.scale(&-xi.clone()));
        }
        next[0] = next[0].add(&table[i]);
        poly = next;
    }
    poly
}

/// Evaluates a coefficient vector at `x`.
pub fn eval_poly<T: Coeff>(coeffs: &[T], x: &Rational) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, c| acc.scale(x).add(c))
}
