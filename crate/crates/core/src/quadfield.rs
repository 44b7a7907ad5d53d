//! Exact arithmetic in a real quadratic field `Q(√Δ)`.
//!
//! Elements are stored as `a + b√Δ` with rational `a`, `b`. Signs of real
//! embeddings are decided by comparing `a²` with `Δb²`, so nothing here
//! ever touches floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::contfrac;
use crate::error::{Error, Result};
use crate::exactmath::{int, is_integral, is_square, isqrt, Rational};

/// `Q(√Δ)` for a positive non-square radicand `Δ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadField {
    radicand: BigInt,
}

impl QuadField {
    pub fn new(radicand: impl Into<BigInt>) -> Result<Arc<Self>> {
        let radicand = radicand.into();
        if !radicand.is_positive() || is_square(&radicand) {
            return Err(Error::InvalidInput(format!(
                "radicand must be a positive non-square integer, got {radicand}"
            )));
        }
        Ok(Arc::new(QuadField { radicand }))
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }
}

/// An element `a + b√Δ` of a [`QuadField`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    a: Rational,
    b: Rational,
    field: Arc<QuadField>,
}

impl QuadElem {
    pub fn new(field: &Arc<QuadField>, a: Rational, b: Rational) -> Self {
        QuadElem {
            a,
            b,
            field: Arc::clone(field),
        }
    }

    pub fn from_rational(field: &Arc<QuadField>, a: Rational) -> Self {
        Self::new(field, a, Rational::zero())
    }

    pub fn from_int(field: &Arc<QuadField>, a: i64) -> Self {
        Self::from_rational(field, int(a))
    }

    /// `√Δ` itself.
    pub fn sqrt(field: &Arc<QuadField>) -> Self {
        Self::new(field, Rational::zero(), Rational::one())
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn field(&self) -> &Arc<QuadField> {
        &self.field
    }

    fn radicand(&self) -> Rational {
        int(self.field.radicand.clone())
    }

    fn check_field(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || self.field == other.field,
            "cannot combine elements of Q(√{}) and Q(√{})",
            self.field.radicand,
            other.field.radicand
        );
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(&self.field, self.a.clone(), -self.b.clone())
    }

    pub fn norm(&self) -> Rational {
        &self.a * &self.a - self.radicand() * &self.b * &self.b
    }

    pub fn trace(&self) -> Rational {
        int(2) * &self.a
    }

    /// Sign of the embedding `√Δ ↦ +√Δ`.
    pub fn signum(&self) -> Ordering {
        let zero = Rational::zero();
        let sa = self.a.cmp(&zero);
        let sb = self.b.cmp(&zero);
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = self.radicand() * &self.b * &self.b;
        // a² = Δb² is impossible for a non-square radicand unless both vanish.
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        Self::new(&self.field, &self.a - r, self.b.clone()).signum()
    }

    /// Both real embeddings positive. Zero is rejected.
    pub fn is_totally_positive(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::InvalidInput(
                "total positivity is undefined for 0".into(),
            ));
        }
        Ok(self.signum() == Ordering::Greater && self.conj().signum() == Ordering::Greater)
    }

    /// Exact floor of the real value.
    pub fn floor(&self) -> BigInt {
        let b2d = self.radicand() * &self.b * &self.b;
        let root = isqrt(&b2d.floor().to_integer());
        let mut g = self.a.floor().to_integer();
        if self.b.is_negative() {
            g -= root;
        } else {
            g += root;
        }
        while self.cmp_rational(&int(g.clone())) == Ordering::Less {
            g -= 1;
        }
        while self.cmp_rational(&int(&g + 1)) != Ordering::Less {
            g += 1;
        }
        g
    }

    /// Exact ceiling of the real value.
    pub fn ceil(&self) -> BigInt {
        let f = self.floor();
        if self.is_rational() && is_integral(&self.a) {
            f
        } else {
            f + 1
        }
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::InvalidInput("division by zero in Q(√Δ)".into()));
        }
        Ok(Self::new(&self.field, &self.a / &n, -(&self.b / &n)))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_int(&self.field, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Coordinates are integers (element of `Z[√Δ]`), a cheap integrality
    /// test that is exact for radicands ≢ 1 (mod 4).
    pub fn has_integer_coords(&self) -> bool {
        is_integral(&self.a) && is_integral(&self.b)
    }
}

impl fmt::Debug for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.field.radicand;
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*sqrt({d})", self.b),
            (false, false) if self.b.is_negative() => {
                write!(f, "{} - {}*sqrt({d})", self.a, -self.b.clone())
            }
            (false, false) => write!(f, "{} + {}*sqrt({d})", self.a, self.b),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: QuadElem) -> QuadElem {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&QuadElem> for QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: &QuadElem) -> QuadElem {
                (&self).$method(rhs)
            }
        }
        impl $tr<QuadElem> for &QuadElem {
            type Output = QuadElem;
            fn $method(self, rhs: QuadElem) -> QuadElem {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&QuadElem> for &QuadElem {
    type Output = QuadElem;
    fn add(self, rhs: &QuadElem) -> QuadElem {
        self.check_field(rhs);
        QuadElem::new(&self.field, &self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub<&QuadElem> for &QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: &QuadElem) -> QuadElem {
        self.check_field(rhs);
        QuadElem::new(&self.field, &self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Mul<&QuadElem> for &QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: &QuadElem) -> QuadElem {
        self.check_field(rhs);
        let d = self.radicand();
        QuadElem::new(
            &self.field,
            &self.a * &rhs.a + d * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }
}

impl Div<&QuadElem> for &QuadElem {
    type Output = QuadElem;
    /// Panics on division by zero.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &QuadElem) -> QuadElem {
        self * &rhs.inv().expect("division by zero")
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new(&self.field, -self.a.clone(), -self.b.clone())
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}

impl Mul<&Rational> for &QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: &Rational) -> QuadElem {
        QuadElem::new(&self.field, &self.a * rhs, &self.b * rhs)
    }
}

impl Sub<&Rational> for &QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: &Rational) -> QuadElem {
        QuadElem::new(&self.field, &self.a - rhs, self.b.clone())
    }
}

impl Add<&Rational> for &QuadElem {
    type Output = QuadElem;
    fn add(self, rhs: &Rational) -> QuadElem {
        QuadElem::new(&self.field, &self.a + rhs, self.b.clone())
    }
}

/// The lattice `[1, δ]` (the inverse of the ideal `𝔟`), with `δ` reduced:
/// `δ > 1` and `0 < δ' < 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleBasis {
    delta: QuadElem,
}

/// Integer matrix of multiplication by a unit on `[1, δ]` coordinates:
/// `(u, v) ↦ (m[0][0] u + m[0][1] v, m[1][0] u + m[1][1] v)`.
pub type UnitMatrix = [[BigInt; 2]; 2];

impl ModuleBasis {
    pub fn new(delta: QuadElem) -> Result<Self> {
        if delta.is_rational() {
            return Err(Error::InvalidInput(format!(
                "basis element δ = {delta} must be irrational"
            )));
        }
        let one = Rational::one();
        let conj = delta.conj();
        if delta.cmp_rational(&one) != Ordering::Greater
            || conj.signum() != Ordering::Greater
            || conj.cmp_rational(&one) != Ordering::Less
        {
            return Err(Error::NotReduced {
                value: delta.to_string(),
                reason: "need δ > 1 and 0 < δ' < 1".into(),
            });
        }
        Ok(ModuleBasis { delta })
    }

    /// `[1, δ]` equal to the ring of integers of `Q(√Δ)` for squarefree
    /// `Δ`, with the unique reduced choice of `δ`.
    pub fn maximal_order(field: &Arc<QuadField>) -> Result<Self> {
        let d = field.radicand();
        let root = QuadElem::sqrt(field);
        let omega = if d.mod_floor(&BigInt::from(4)) == BigInt::one() {
            &(&root + &Rational::one()) * &Rational::new(1.into(), 2.into())
        } else {
            root
        };
        // δ = ω + t with 0 < ω' + t < 1, i.e. t = floor(-ω') + 1.
        let t = (-omega.conj()).floor() + 1;
        Self::new(&omega + &int(t))
    }

    pub fn delta(&self) -> &QuadElem {
        &self.delta
    }

    pub fn field(&self) -> &Arc<QuadField> {
        self.delta.field()
    }

    /// `(u, v)` with `x = u + vδ`.
    pub fn coords(&self, x: &QuadElem) -> (Rational, Rational) {
        x.check_field(&self.delta);
        let v = x.b() / self.delta.b();
        let u = x.a() - &v * self.delta.a();
        (u, v)
    }

    pub fn eval(&self, u: &Rational, v: &Rational) -> QuadElem {
        &(&self.delta * v) + u
    }

    /// Matrix of multiplication by `eps` in this basis. Fails when `eps`
    /// does not map the lattice into itself.
    pub fn unit_matrix(&self, eps: &QuadElem) -> Result<UnitMatrix> {
        let (a, c) = self.coords(eps);
        let (b, d) = self.coords(&(eps * &self.delta));
        for x in [&a, &b, &c, &d] {
            if !is_integral(x) {
                return Err(Error::InvalidInput(format!(
                    "{eps} does not stabilize the lattice [1, {}]",
                    self.delta
                )));
            }
        }
        Ok([
            [a.to_integer(), b.to_integer()],
            [c.to_integer(), d.to_integer()],
        ])
    }
}

/// Default bound on continued fraction periods.
pub const DEFAULT_PERIOD_BOUND: usize = 100_000;

/// Generator `ε > 1` of the totally positive units of the multiplier ring
/// of `[1, δ]`: the product of the complete quotients over one period of the
/// minus continued fraction of `δ`.
pub fn fundamental_unit_totally_positive(basis: &ModuleBasis) -> Result<QuadElem> {
    fundamental_unit_with_bound(basis, DEFAULT_PERIOD_BOUND)
}

pub fn fundamental_unit_with_bound(basis: &ModuleBasis, bound: usize) -> Result<QuadElem> {
    let expansion = contfrac::minus_cf_expansion(basis.delta(), bound)?;
    let field = basis.field();
    Ok(expansion
        .quotients
        .iter()
        .fold(QuadElem::from_int(field, 1), |acc, x| &acc * x))
}

/// Second route to the same unit through the ordinary continued fraction:
/// the period product `η` has norm `(-1)^s`; `ε = η` or `η²`.
pub fn fundamental_unit_from_plus_cf(basis: &ModuleBasis, bound: usize) -> Result<QuadElem> {
    let x = basis.delta() - &Rational::one();
    let expansion = contfrac::plus_cf_expansion(&x, bound)?;
    let field = basis.field();
    let eta = expansion
        .quotients
        .iter()
        .fold(QuadElem::from_int(field, 1), |acc, x| &acc * x);
    let eta = if eta.is_totally_positive()? {
        eta
    } else {
        &eta * &eta
    };
    Ok(eta)
}

/// Least `λ ≥ 1` with `ε^λ ≡ 1` modulo `q[1, δ]`.
pub fn unit_index_lambda(basis: &ModuleBasis, q: u64, eps: &QuadElem, bound: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    let m = reduce_matrix(&basis.unit_matrix(eps)?, q);
    let id = [[1 % q, 0], [0, 1 % q]];
    let mut acc = m;
    for lambda in 1..=bound {
        if acc == id {
            return Ok(lambda);
        }
        acc = mat_mul_mod(&acc, &m, q);
    }
    Err(Error::Verification(format!(
        "unit order modulo {q} exceeds bound {bound}"
    )))
}

pub fn reduce_matrix(m: &UnitMatrix, q: u64) -> [[u64; 2]; 2] {
    let r = |x: &BigInt| crate::exactmath::residue_zero(x, q);
    [[r(&m[0][0]), r(&m[0][1])], [r(&m[1][0]), r(&m[1][1])]]
}

pub fn mat_mul_mod(a: &[[u64; 2]; 2], b: &[[u64; 2]; 2], q: u64) -> [[u64; 2]; 2] {
    let q = q as u128;
    let mut out = [[0u64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let s = (a[i][0] as u128 * b[0][j] as u128 + a[i][1] as u128 * b[1][j] as u128) % q;
            out[i][j] = s as u64;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;
    use proptest::prelude::*;

    fn field(d: i64) -> Arc<QuadField> {
        QuadField::new(d).unwrap()
    }

    fn elem(f: &Arc<QuadField>, a: i64, b: i64) -> QuadElem {
        QuadElem::new(f, int(a), int(b))
    }

    #[test]
    fn field_validation() {
        assert!(QuadField::new(4).is_err());
        assert!(QuadField::new(0).is_err());
        assert!(QuadField::new(-3).is_err());
        assert!(QuadField::new(12).is_ok());
    }

    #[test]
    fn conj_and_norm() {
        let k = field(3);
        assert_eq!(elem(&k, 2, 1).conj(), elem(&k, 2, -1));
        assert_eq!(elem(&k, 5, 0).conj(), elem(&k, 5, 0));
        assert_eq!(elem(&k, 0, 1).conj(), elem(&k, 0, -1));
        assert_eq!(elem(&k, 2, 1).norm(), int(1));
        assert_eq!(elem(&k, 3, 1).norm(), int(6));
        assert_eq!(elem(&k, 1, 0).norm(), int(1));
    }

    #[test]
    fn total_positivity() {
        let k = field(3);
        assert!(elem(&k, 2, 1).is_totally_positive().unwrap());
        assert!(!elem(&k, 1, 1).is_totally_positive().unwrap());
        assert!(!elem(&k, -1, 0).is_totally_positive().unwrap());
        assert!(elem(&k, 0, 0).is_totally_positive().is_err());
    }

    #[test]
    fn floor_and_ceil() {
        let k = field(3);
        assert_eq!(elem(&k, 2, 1).floor(), BigInt::from(3));
        assert_eq!(elem(&k, 2, -1).floor(), BigInt::from(0));
        assert_eq!(elem(&k, 0, -1).floor(), BigInt::from(-2));
        assert_eq!(elem(&k, 2, 1).ceil(), BigInt::from(4));
        assert_eq!(elem(&k, 7, 0).ceil(), BigInt::from(7));
        let k = field(11);
        let x = QuadElem::new(&k, rat(4, 5), rat(1, 5));
        assert_eq!(x.floor(), BigInt::from(1));
    }

    #[test]
    fn coords_roundtrip() {
        let k = field(3);
        let basis = ModuleBasis::new(elem(&k, 2, 1)).unwrap();
        assert_eq!(basis.coords(basis.delta()), (int(0), int(1)));
        assert_eq!(basis.coords(&elem(&k, 7, 4)), (int(-1), int(4)));
        let half = QuadElem::from_rational(&k, rat(1, 2));
        assert_eq!(basis.coords(&half), (rat(1, 2), int(0)));
    }

    #[test]
    fn maximal_order_basis() {
        let b = ModuleBasis::maximal_order(&field(3)).unwrap();
        assert_eq!(b.delta(), &elem(&field(3), 2, 1));
        let b = ModuleBasis::maximal_order(&field(5)).unwrap();
        assert_eq!(b.delta(), &QuadElem::new(&field(5), rat(3, 2), rat(1, 2)));
        assert!(ModuleBasis::new(elem(&field(3), 1, 1)).is_err());
    }

    #[test]
    fn fundamental_units() {
        for (d, a, b) in [(3, 2, 1), (11, 10, 3), (2, 3, 2), (6, 5, 2)] {
            let k = field(d);
            let basis = ModuleBasis::maximal_order(&k).unwrap();
            let eps = fundamental_unit_totally_positive(&basis).unwrap();
            assert_eq!(eps, elem(&k, a, b), "Δ = {d}");
            assert_eq!(fundamental_unit_from_plus_cf(&basis, 1000).unwrap(), eps);
        }
        // Q(√5): ε = ((3+√5)/2), the square of the golden ratio.
        let k = field(5);
        let basis = ModuleBasis::maximal_order(&k).unwrap();
        let eps = fundamental_unit_totally_positive(&basis).unwrap();
        assert_eq!(eps, QuadElem::new(&k, rat(3, 2), rat(1, 2)));
        assert_eq!(fundamental_unit_from_plus_cf(&basis, 1000).unwrap(), eps);
    }

    #[test]
    fn lambda_by_modular_powering() {
        let k = field(3);
        let basis = ModuleBasis::maximal_order(&k).unwrap();
        let eps = elem(&k, 2, 1);
        assert_eq!(unit_index_lambda(&basis, 2, &eps, 1000).unwrap(), 2);
        // Brute force: first power of ε congruent to 1 modulo 3[1, δ].
        let brute = (1..100u64)
            .find(|&j| {
                let (u, v) = basis.coords(&(&eps.pow(j) - &QuadElem::from_int(&k, 1)));
                (u / int(3)).is_integer() && (v / int(3)).is_integer()
            })
            .unwrap();
        assert_eq!(unit_index_lambda(&basis, 3, &eps, 1000).unwrap(), brute);
        // ε³ ≡ −1 (mod 3), so the order is 6.
        assert_eq!(brute, 6);
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50, den in 1i64..9) {
            let k = field(7);
            let x = QuadElem::new(&k, rat(a, den), int(b));
            let y = QuadElem::new(&k, int(c), rat(d, den));
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        }

        #[test]
        fn coords_invert_eval(u in -40i64..40, v in -40i64..40, den in 1i64..7) {
            let basis = ModuleBasis::maximal_order(&field(13)).unwrap();
            let (u, v) = (rat(u, den), rat(v, den));
            prop_assert_eq!(basis.coords(&basis.eval(&u, &v)), (u, v));
        }

        #[test]
        fn floor_brackets_value(a in -200i64..200, b in -30i64..30, den in 1i64..9) {
            let k = field(19);
            let x = QuadElem::new(&k, rat(a, den), rat(b, den));
            let f = int(x.floor());
            prop_assert!(x.cmp_rational(&f) != Ordering::Less);
            prop_assert!(x.cmp_rational(&(f + int(1))) == Ordering::Less);
        }
    }
}
