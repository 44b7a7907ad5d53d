//! Exact rational helpers: the two Bernoulli polynomials that appear in
//! zeta values at `s = 0`, the residue conventions used throughout the
//! crate, and the two-variable kernel `F(x, y)`.
//!
//! Three residue conventions coexist and are never mixed up:
//!
//! * [`frac_unit`] maps a rational into `(0, 1]` (integers go to `1`);
//! * [`residue_zero`] maps an integer into `[0, q-1]` (ray labels);
//! * [`residue_one`] maps an integer into `[1, q]` (family residues `γ`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

fn half() -> Rational {
    rat(1, 2)
}

/// `B_1(x) = x - 1/2`.
pub fn bernoulli1(x: &Rational) -> Rational {
    x - half()
}

/// `B_2(x) = x^2 - x + 1/6`.
pub fn bernoulli2(x: &Rational) -> Rational {
    x * x - x + rat(1, 6)
}

/// Fractional part with values in `(0, 1]`: `x - floor(x)` unless `x` is an
/// integer, in which case `1`.
pub fn frac_unit(x: &Rational) -> Rational {
    let f = x - x.floor();
    if f.is_zero() {
        Rational::one()
    } else {
        f
    }
}

/// Companion of [`frac_unit`]: `x - frac_unit(x)`, i.e. `ceil(x) - 1`.
/// Always an integer.
pub fn int_part_unit(x: &Rational) -> Rational {
    x - frac_unit(x)
}

/// Representative of `a` modulo `q` in `[0, q-1]`.
pub fn residue_zero(a: &BigInt, q: u64) -> u64 {
    debug_assert!(q >= 1);
    let r = a.mod_floor(&BigInt::from(q));
    u64::try_from(r).expect("residue fits in u64")
}

/// Representative of `a` modulo `q` in `[1, q]`.
pub fn residue_one(a: &BigInt, q: u64) -> u64 {
    match residue_zero(a, q) {
        0 => q,
        r => r,
    }
}

/// `F(x, y) = -B_1(x) B_1(y) + B_2(x)`.
pub fn kernel_f(x: &Rational, y: &Rational) -> Rational {
    -(bernoulli1(x) * bernoulli1(y)) + bernoulli2(x)
}

/// `true` when `x` is an integer.
pub fn is_integral(x: &Rational) -> bool {
    x.denom().is_one()
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative integer");
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = isqrt(n);
    &s * &s == *n
}

/// Default trial division bound for [`is_squarefree`].
pub const DEFAULT_SQUAREFREE_BOUND: u64 = 10_000_000;

/// Squarefree test by trial division with primes up to `bound`.
///
/// Fails when the cofactor left after trial division could still hide a
/// square of a prime larger than `bound`.
pub fn is_squarefree(n: &BigInt, bound: u64) -> Result<bool> {
    if !n.is_positive() {
        return Err(Error::InvalidInput(format!(
            "squarefree test needs a positive integer, got {n}"
        )));
    }
    let mut m = n.clone();
    let mut p: u64 = 2;
    loop {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            return Ok(true);
        }
        if p > bound {
            return Err(Error::InvalidInput(format!(
                "cannot decide squarefreeness of {n} with trial division bound {bound}"
            )));
        }
        if (&m % &pb).is_zero() {
            m /= &pb;
            if (&m % &pb).is_zero() {
                return Ok(false);
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
}

/// `num/den`, with the denominator written even for integers.
pub fn rat_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(int(s.parse::<BigInt>().map_err(|_| bad())?)),
    }
}
