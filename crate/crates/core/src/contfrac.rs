//! Periodic continued fractions of quadratic irrationals.
//!
//! Two expansions are used. The ordinary ("plus") expansion
//! `x = a_0 + 1/(a_1 + 1/(a_2 + ...))` characterises reduced numbers by pure
//! periodicity. The ceiling ("minus") expansion `x = b_0 - 1/(b_1 - ...)`
//! drives the cone decomposition. Periods are found by exact repetition of
//! the complete quotient, never by numerical heuristics.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{int, Rational};
use crate::quadfield::{QuadElem, QuadField, DEFAULT_PERIOD_BOUND};

/// One period `[[a_0, ..., a_{s-1}]]` of a purely periodic ordinary
/// continued fraction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicCF {
    terms: Vec<BigInt>,
}

impl PeriodicCF {
    pub fn new(terms: Vec<BigInt>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("empty continued fraction period".into()));
        }
        if let Some(t) = terms.iter().find(|t| !t.is_positive()) {
            return Err(Error::InvalidInput(format!(
                "continued fraction terms must be positive, got {t}"
            )));
        }
        Ok(PeriodicCF { terms })
    }

    pub fn from_i64(terms: &[i64]) -> Result<Self> {
        Self::new(terms.iter().map(|&t| BigInt::from(t)).collect())
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn period(&self) -> usize {
        self.terms.len()
    }

    /// `a_i` with the index taken modulo the period.
    pub fn term(&self, i: usize) -> &BigInt {
        &self.terms[i % self.terms.len()]
    }

    /// Number of `(a_{2j}, a_{2j+1})` pairs after which the term pattern
    /// repeats: `s/2` for even `s`, `s` for odd `s`.
    pub fn pair_count(&self) -> usize {
        let s = self.period();
        if s.is_multiple_of(2) {
            s / 2
        } else {
            s
        }
    }

    /// `S_0 = 0`, `S_j = S_{j-1} + a_{2j-1}`.
    pub fn s_index(&self, j: usize) -> BigInt {
        (1..=j).fold(BigInt::zero(), |acc, t| acc + self.term(2 * t - 1))
    }
}

impl fmt::Display for PeriodicCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "[[{}]]", parts.join(","))
    }
}

/// One period `((b_0, ..., b_{m-1}))` of a minus continued fraction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MinusCF {
    terms: Vec<BigInt>,
}

impl MinusCF {
    pub fn new(terms: Vec<BigInt>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("empty minus continued fraction".into()));
        }
        if let Some(t) = terms.iter().find(|t| **t < BigInt::from(2)) {
            return Err(Error::InvalidInput(format!(
                "minus continued fraction terms must be at least 2, got {t}"
            )));
        }
        Ok(MinusCF { terms })
    }

    pub fn from_i64(terms: &[i64]) -> Result<Self> {
        Self::new(terms.iter().map(|&t| BigInt::from(t)).collect())
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn period(&self) -> usize {
        self.terms.len()
    }

    /// `b_i` extended periodically to every `i ≥ 0`.
    pub fn term(&self, i: usize) -> &BigInt {
        &self.terms[i % self.terms.len()]
    }
}

impl fmt::Display for MinusCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "(({}))", parts.join(","))
    }
}

/// A period of partial quotients together with the complete quotients
/// `x_0, ..., x_{len-1}` that produced them.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub terms: Vec<BigInt>,
    pub quotients: Vec<QuadElem>,
}

fn expand(
    x: &QuadElem,
    bound: usize,
    step: impl Fn(&QuadElem) -> Result<(BigInt, QuadElem)>,
) -> Result<Expansion> {
    if x.is_rational() {
        return Err(Error::RationalInput {
            value: x.to_string(),
        });
    }
    let mut seen: HashMap<QuadElem, usize> = HashMap::new();
    let mut terms = Vec::new();
    let mut quotients = Vec::new();
    let mut cur = x.clone();
    for i in 0..=bound {
        if let Some(&j) = seen.get(&cur) {
            if j != 0 {
                return Err(Error::NotPurelyPeriodic {
                    value: x.to_string(),
                    preperiod: j,
                });
            }
            return Ok(Expansion { terms, quotients });
        }
        seen.insert(cur.clone(), i);
        let (t, next) = step(&cur)?;
        terms.push(t);
        quotients.push(cur);
        cur = next;
    }
    Err(Error::PeriodBound { bound })
}

pub fn plus_cf_expansion(x: &QuadElem, bound: usize) -> Result<Expansion> {
    expand(x, bound, |cur| {
        let a = cur.floor();
        let rest = cur - &QuadElem::from_rational(cur.field(), int(a.clone()));
        Ok((a, rest.inv()?))
    })
}

/// The purely periodic ordinary continued fraction of `x`.
pub fn plus_cf(x: &QuadElem) -> Result<PeriodicCF> {
    let e = plus_cf_expansion(x, DEFAULT_PERIOD_BOUND)?;
    PeriodicCF::new(e.terms)
}

fn check_minus_reduced(x: &QuadElem) -> Result<()> {
    let one = Rational::one();
    let conj = x.conj();
    let ok = x.cmp_rational(&one).is_gt()
        && conj.signum().is_gt()
        && conj.cmp_rational(&one).is_lt();
    if ok {
        Ok(())
    } else {
        Err(Error::NotReduced {
            value: x.to_string(),
            reason: "minus expansion needs x > 1 and 0 < x' < 1".into(),
        })
    }
}

pub fn minus_cf_expansion(x: &QuadElem, bound: usize) -> Result<Expansion> {
    if x.is_rational() {
        return Err(Error::RationalInput {
            value: x.to_string(),
        });
    }
    check_minus_reduced(x)?;
    expand(x, bound, |cur| {
        let b = cur.ceil();
        let rest = &QuadElem::from_rational(cur.field(), int(b.clone())) - cur;
        Ok((b, rest.inv()?))
    })
}

/// The purely periodic minus continued fraction of a reduced `x`.
pub fn minus_cf(x: &QuadElem) -> Result<MinusCF> {
    let e = minus_cf_expansion(x, DEFAULT_PERIOD_BOUND)?;
    MinusCF::new(e.terms)
}

/// Minus expansion of `1 + [[a_0, ..., a_{s-1}]]` read off the ordinary
/// one: `b_i = a_{2j} + 2` at `i = S_j` and `2` elsewhere.
pub fn plus_to_minus_formula(cf: &PeriodicCF) -> MinusCF {
    let mut terms = Vec::new();
    for j in 0..cf.pair_count() {
        terms.push(cf.term(2 * j) + 2);
        let twos: usize = (cf.term(2 * j + 1) - 1u32)
            .try_into()
            .expect("continued fraction term too large");
        terms.extend(std::iter::repeat_n(BigInt::from(2), twos));
    }
    MinusCF { terms }
}

/// [`plus_to_minus_formula`] cross-checked against the direct ceiling
/// algorithm applied to `δ = 1 + value(cf)`.
pub fn plus_to_minus(cf: &PeriodicCF) -> Result<MinusCF> {
    let delta = &cf_value(cf) + &Rational::one();
    if delta.cmp_rational(&int(2)).is_le() {
        return Err(Error::Hypothesis(format!("δ = {delta} is not > 2")));
    }
    let direct = minus_cf(&delta)?;
    let formula = plus_to_minus_formula(cf);
    // A non-minimal ordinary period yields a repeated minus period.
    let agrees = formula.period().is_multiple_of(direct.period())
        && (0..formula.period()).all(|i| formula.term(i) == direct.term(i));
    if !agrees {
        return Err(Error::Verification(format!(
            "minus expansion of {delta}: formula gives {formula}, ceiling algorithm gives {direct}"
        )));
    }
    Ok(formula)
}

/// `(p, p', r, r')` with `[a_0, ..., a_{s-1}, x] = (p x + p') / (r x + r')`.
fn period_matrix(cf: &PeriodicCF) -> (BigInt, BigInt, BigInt, BigInt) {
    let (mut p, mut pp, mut r, mut rp) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
    for a in cf.terms() {
        // [[p, pp], [r, rp]] * [[a, 1], [1, 0]]
        let np = &p * a + &pp;
        let nr = &r * a + &rp;
        pp = p;
        rp = r;
        p = np;
        r = nr;
    }
    (p, pp, r, rp)
}

/// Discriminant of the fixed-point quadratic of one period.
pub fn cf_discriminant(cf: &PeriodicCF) -> BigInt {
    let (p, pp, r, rp) = period_matrix(cf);
    let t = &rp - &p;
    &t * &t + BigInt::from(4) * pp * r
}

/// Trial division bound used by [`squarefree_decomposition`].
pub const SQUARE_STRIP_BOUND: u64 = 100_000;

/// `(core, cofactor)` with `n = core * cofactor²`, removing squares of
/// primes up to [`SQUARE_STRIP_BOUND`]. Squares of larger primes stay in
/// `core`; the field is unchanged, only its radicand is not minimal.
pub fn squarefree_decomposition(n: &BigInt) -> (BigInt, BigInt) {
    let mut core = n.clone();
    let mut cof = BigInt::one();
    let mut p: u64 = 2;
    while p <= SQUARE_STRIP_BOUND {
        let pb = BigInt::from(p);
        let p2 = &pb * &pb;
        if p2 > core {
            break;
        }
        while (&core % &p2).is_zero() {
            core /= &p2;
            cof *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (core, cof)
}

fn cf_root(cf: &PeriodicCF, field: &Arc<QuadField>, cofactor: &BigInt) -> QuadElem {
    let (p, _pp, r, rp) = period_matrix(cf);
    // r x^2 + (rp - p) x - pp = 0, root > 1 is ((p - rp) + √disc) / (2r)
    let two_r = BigInt::from(2) * &r;
    QuadElem::new(
        field,
        Rational::new(&p - &rp, two_r.clone()),
        Rational::new(cofactor.clone(), two_r),
    )
}

/// The value of a purely periodic continued fraction, in `Q(√Δ)` with `Δ`
/// the squarefree part of the discriminant.
pub fn cf_value(cf: &PeriodicCF) -> QuadElem {
    let (core, cof) = squarefree_decomposition(&cf_discriminant(cf));
    let field = QuadField::new(core).expect("discriminant of a periodic cf is not a square");
    cf_root(cf, &field, &cof)
}

/// The value of `cf` expressed in a given field; fails when it lives in a
/// different quadratic field.
pub fn cf_value_in(cf: &PeriodicCF, field: &Arc<QuadField>) -> Result<QuadElem> {
    let disc = cf_discriminant(cf);
    let (q, rem) = disc.div_rem(field.radicand());
    let root = crate::exactmath::isqrt(&q);
    if !rem.is_zero() || !q.is_positive() || &root * &root != q {
        return Err(Error::InvalidInput(format!(
            "continued fraction {cf} does not lie in Q(√{})",
            field.radicand()
        )));
    }
    Ok(cf_root(cf, field, &root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;
    use proptest::prelude::*;

    fn k(d: i64) -> Arc<QuadField> {
        QuadField::new(d).unwrap()
    }

    fn e(d: i64, a: Rational, b: Rational) -> QuadElem {
        QuadElem::new(&k(d), a, b)
    }

    #[test]
    fn plus_expansions() {
        assert_eq!(plus_cf(&e(3, int(1), int(1))).unwrap(), PeriodicCF::from_i64(&[2, 1]).unwrap());
        assert_eq!(plus_cf(&e(11, int(3), int(1))).unwrap(), PeriodicCF::from_i64(&[6, 3]).unwrap());
        assert_eq!(plus_cf(&e(5, rat(1, 2), rat(1, 2))).unwrap(), PeriodicCF::from_i64(&[1]).unwrap());
    }

    #[test]
    fn plus_rejections() {
        let r = plus_cf(&QuadElem::from_int(&k(3), 2));
        assert!(matches!(r, Err(Error::RationalInput { .. })));
        // √3 = [1; 1, 2, 1, 2, ...] has preperiod 1.
        let r = plus_cf(&e(3, int(0), int(1)));
        assert!(matches!(r, Err(Error::NotPurelyPeriodic { preperiod: 1, .. })), "{r:?}");
    }

    #[test]
    fn minus_expansions() {
        assert_eq!(minus_cf(&e(3, int(2), int(1))).unwrap(), MinusCF::from_i64(&[4]).unwrap());
        assert_eq!(minus_cf(&e(11, int(4), int(1))).unwrap(), MinusCF::from_i64(&[8, 2, 2]).unwrap());
        assert_eq!(minus_cf(&e(5, rat(3, 2), rat(1, 2))).unwrap(), MinusCF::from_i64(&[3]).unwrap());
        assert!(matches!(minus_cf(&e(3, int(1), int(1))), Err(Error::NotReduced { .. })));
    }

    #[test]
    fn conversion_rule() {
        for (plus, minus) in [
            (vec![2, 1], vec![4]),
            (vec![6, 3], vec![8, 2, 2]),
            (vec![18, 3], vec![20, 2, 2]),
            (vec![1, 2, 3], vec![3, 2, 5, 4, 2, 2]),
        ] {
            let cf = PeriodicCF::from_i64(&plus).unwrap();
            assert_eq!(plus_to_minus(&cf).unwrap(), MinusCF::from_i64(&minus).unwrap(), "{cf}");
        }
    }

    #[test]
    fn values() {
        assert_eq!(cf_value(&PeriodicCF::from_i64(&[2, 1]).unwrap()), e(3, int(1), int(1)));
        assert_eq!(cf_value(&PeriodicCF::from_i64(&[1]).unwrap()), e(5, rat(1, 2), rat(1, 2)));
        assert_eq!(cf_value(&PeriodicCF::from_i64(&[6, 3]).unwrap()), e(11, int(3), int(1)));
        let cf = PeriodicCF::from_i64(&[6, 3]).unwrap();
        assert!(cf_value_in(&cf, &k(11)).is_ok());
        assert!(cf_value_in(&cf, &k(7)).is_err());
    }

    #[test]
    fn minus_period_matches_s_index() {
        for terms in [vec![2, 1], vec![6, 3], vec![1, 2, 3], vec![4, 1, 1, 5]] {
            let cf = PeriodicCF::from_i64(&terms).unwrap();
            let m = plus_to_minus(&cf).unwrap().period();
            assert_eq!(BigInt::from(m), cf.s_index(cf.pair_count()));
            // Repeating the minus period i times lands on S_{pairs * i}.
            for i in 1..=3usize {
                assert_eq!(BigInt::from(m * i), cf.s_index(cf.pair_count() * i));
            }
        }
    }

    fn arb_cf() -> impl Strategy<Value = PeriodicCF> {
        prop::collection::vec(1i64..50, 1..=6).prop_map(|t| PeriodicCF::from_i64(&t).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn value_roundtrip(cf in arb_cf()) {
            let x = cf_value(&cf);
            let back = plus_cf(&x).unwrap();
            // A period may be reported in its minimal form, e.g. [[1,1]] -> [[1]].
            let s = back.period();
            prop_assert_eq!(cf.period() % s, 0);
            for i in 0..cf.period() {
                prop_assert_eq!(cf.term(i), back.term(i));
            }
        }

        #[test]
        fn conversion_matches_ceiling_algorithm(cf in arb_cf()) {
            let minus = plus_to_minus(&cf).unwrap();
            prop_assert!(minus.terms().iter().all(|b| *b >= BigInt::from(2)));
            let big: Vec<usize> = (0..minus.period()).filter(|&i| *minus.term(i) > BigInt::from(2)).collect();
            let expected: Vec<usize> = (0..cf.pair_count())
                .map(|j| usize::try_from(cf.s_index(j)).unwrap())
                .collect();
            prop_assert_eq!(big, expected);
        }
    }
}
