//! Families `n ↦ (Q(√f(n)), [1, δ(n)])` with `δ(n) - 1 = [[a_0(n), ..., a_{s-1}(n)]]`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::contfrac::{cf_value_in, plus_to_minus, PeriodicCF};
use crate::error::{Error, ErrorKind, Result};
use crate::exactmath::{int, is_square, is_squarefree, Rational, DEFAULT_SQUAREFREE_BOUND};
use crate::family::poly::Poly;
use crate::quadfield::{ModuleBasis, QuadField};
use crate::shintani::{FieldData, RayContext};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub name: String,
    pub f: Poly,
    pub a: Vec<Poly>,
    pub n_min: u64,
    pub n_max: Option<u64>,
}

pub const PRESET_NAMES: [&str; 2] = ["rd-n2p2", "quartic-16n4"];

impl FamilySpec {
    /// The `a_i` must have integer coefficients; `f` only has to take
    /// integer values on the range actually used.
    pub fn new(name: impl Into<String>, f: Poly, a: Vec<Poly>, n_min: u64, n_max: Option<u64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidInput("a family needs at least one a-polynomial".into()));
        }
        if let Some(p) = a.iter().find(|p| !p.has_integer_coeffs()) {
            return Err(Error::InvalidInput(format!(
                "a-polynomial {p} must have integer coefficients"
            )));
        }
        if n_max.is_some_and(|hi| hi < n_min) {
            return Err(Error::InvalidInput("empty n range".into()));
        }
        Ok(FamilySpec {
            name: name.into(),
            f,
            a,
            n_min,
            n_max,
        })
    }

    /// `rd-n2p2`: `f = x² + 2`, `[[2x, x]]`, `n ≥ 1`.
    /// `quartic-16n4`: `f = 16x⁴ + 32x³ + 24x² + 12x + 3`,
    /// `[[8x² + 8x + 2, 2x + 1]]`, `n ≥ 0`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "rd-n2p2" => Self::new(
                name,
                Poly::from_i64(&[2, 0, 1]),
                vec![Poly::from_i64(&[0, 2]), Poly::from_i64(&[0, 1])],
                1,
                None,
            ),
            "quartic-16n4" => Self::new(
                name,
                Poly::from_i64(&[3, 12, 24, 32, 16]),
                vec![Poly::from_i64(&[2, 8, 8]), Poly::from_i64(&[1, 2])],
                0,
                None,
            ),
            _ => Err(Error::InvalidInput(format!(
                "unknown family preset {name:?} (known: {})",
                PRESET_NAMES.join(", ")
            ))),
        }
    }

    /// Period `s` of the continued fraction.
    pub fn s(&self) -> usize {
        self.a.len()
    }

    /// `d = max deg a_i`.
    pub fn degree(&self) -> usize {
        self.a.iter().map(Poly::degree).max().unwrap_or(0)
    }

    /// Number of `(a_{2j}, a_{2j+1})` pairs in one minus-CF period.
    pub fn pairs(&self) -> usize {
        if self.s().is_multiple_of(2) {
            self.s() / 2
        } else {
            self.s()
        }
    }

    pub fn in_range(&self, n: u64) -> bool {
        n >= self.n_min && self.n_max.is_none_or(|hi| n <= hi)
    }

    /// `a_i(n)` with the index read modulo `s`.
    pub fn a_value(&self, i: usize, n: &BigInt) -> BigInt {
        self.a[i % self.s()]
            .eval_integer(n)
            .expect("integer polynomials take integer values")
    }

    pub fn cf_at(&self, n: u64) -> Result<PeriodicCF> {
        let n = BigInt::from(n);
        let terms: Vec<BigInt> = (0..self.s()).map(|i| self.a_value(i, &n)).collect();
        if let Some(t) = terms.iter().find(|t| !t.is_positive()) {
            return Err(Error::Hypothesis(format!(
                "family {}: a-polynomial value {t} at n = {n} is not positive",
                self.name
            )));
        }
        PeriodicCF::new(terms)
    }

    /// The field at `n`, or the reason this `n` is skipped.
    pub fn instance(&self, n: u64) -> Result<Sample> {
        if !self.in_range(n) {
            return Ok(Sample::Skipped {
                n,
                reason: format!("n = {n} is outside the family's range"),
            });
        }
        let f_value = self.f.eval_integer(&BigInt::from(n))?;
        if !f_value.is_positive() || is_square(&f_value) {
            return Err(Error::Hypothesis(format!(
                "family {}: f({n}) = {f_value} is not a positive non-square",
                self.name
            )));
        }
        if !is_squarefree(&f_value, DEFAULT_SQUAREFREE_BOUND)? {
            return Ok(Sample::Skipped {
                n,
                reason: format!("f({n}) = {f_value} is not squarefree"),
            });
        }
        let cf = self.cf_at(n)?;
        let hyp = |e: Error| match e.kind() {
            ErrorKind::Verification => e,
            _ => Error::Hypothesis(format!("family {} at n = {n}: {e}", self.name)),
        };
        let field = QuadField::new(f_value.clone())?;
        let x = cf_value_in(&cf, &field).map_err(hyp)?;
        let delta = &x + &Rational::from_integer(1.into());
        if delta.cmp_rational(&int(2)).is_le() {
            return Err(Error::Hypothesis(format!(
                "family {} at n = {n}: δ = {delta} is not > 2",
                self.name
            )));
        }
        let basis = ModuleBasis::new(delta).map_err(hyp)?;
        let data = FieldData::new(basis).map_err(hyp)?;
        let formula = plus_to_minus(&cf).map_err(hyp)?;
        if formula != *data.minus_cf() {
            return Err(Error::Hypothesis(format!(
                "family {} at n = {n}: {cf} is not a minimal period (minus expansion {})",
                self.name,
                data.minus_cf()
            )));
        }
        Ok(Sample::Ready(Arc::new(Instance {
            n,
            f_value,
            cf,
            field: Arc::new(data),
        })))
    }
}

/// One member of a family.
#[derive(Debug, Clone)]
pub struct Instance {
    pub n: u64,
    pub f_value: BigInt,
    pub cf: PeriodicCF,
    pub field: Arc<FieldData>,
}

impl Instance {
    pub fn ray(&self, q: u64, max_terms: u64) -> Result<RayContext> {
        Ok(RayContext::new(self.field.clone(), q)?.with_max_terms(max_terms))
    }
}

#[derive(Debug, Clone)]
pub enum Sample {
    Ready(Arc<Instance>),
    Skipped { n: u64, reason: String },
}

impl Sample {
    pub fn ready(&self) -> Option<&Arc<Instance>> {
        match self {
            Sample::Ready(i) => Some(i),
            Sample::Skipped { .. } => None,
        }
    }
}
