//! Dirichlet characters composed with the norm, and Hecke L-values at
//! `s = 0` kept as exact formal sums of character values.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactmath::{int, is_integral, residue_zero, Rational};
use crate::family::engine::FamilyContext;
use crate::family::quasi::{eval_poly, Coeff, Form, QuasiPoly};
use crate::family::residue::ResidueData;
use crate::shintani::{RayContext, RayLabel};

/// `χ(a) = ζ_m^{e(a)}` on units mod `q`, zero elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletChar {
    q: u64,
    order: u64,
    exps: Vec<Option<u64>>,
}

impl DirichletChar {
    pub fn trivial(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidInput(format!("character modulus must be at least 2, got {q}")));
        }
        let exps = (0..q).map(|a| (a.gcd(&q) == 1).then_some(0)).collect();
        Ok(DirichletChar { q, order: 1, exps })
    }

    /// The character with `e(g) = e` for each `(g, e)`, extended
    /// multiplicatively. The generators must generate `(Z/q)^×` and the
    /// extension must be well defined.
    pub fn from_generators(q: u64, order: u64, gens: &[(u64, u64)]) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidInput(format!("character modulus must be at least 2, got {q}")));
        }
        if order == 0 {
            return Err(Error::InvalidInput("character order must be positive".into()));
        }
        let mut exps: Vec<Option<u64>> = vec![None; q as usize];
        exps[1 % q as usize] = Some(0);
        let mut frontier = vec![1 % q];
        for &(g, _) in gens {
            if g.gcd(&q) != 1 {
                return Err(Error::InvalidInput(format!(
                    "generator {g} is not a unit mod {q}"
                )));
            }
        }
        while let Some(a) = frontier.pop() {
            let ea = exps[a as usize].expect("frontier entries are assigned");
            for &(g, e) in gens {
                let b = (a as u128 * g as u128 % q as u128) as u64;
                let eb = (ea + e) % order;
                match exps[b as usize] {
                    None => {
                        exps[b as usize] = Some(eb);
                        frontier.push(b);
                    }
                    Some(prev) if prev != eb => {
                        return Err(Error::InvalidInput(format!(
                            "character table is not multiplicative: χ({b}) would need exponents {prev} and {eb} mod {order}"
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        if let Some(a) = (0..q).find(|&a| a.gcd(&q) == 1 && exps[a as usize].is_none()) {
            return Err(Error::InvalidInput(format!(
                "generators do not reach the unit {a} mod {q}"
            )));
        }
        Ok(DirichletChar { q, order, exps })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `e(a)`, or `None` when `gcd(a, q) > 1`.
    pub fn exponent(&self, a: u64) -> Option<u64> {
        self.exps[(a % self.q) as usize]
    }

    /// Least residue with the same character value as `a`.
    pub fn canonical(&self, a: u64) -> Option<u64> {
        let e = self.exponent(a)?;
        (1..self.q).find(|&b| self.exps[b as usize] == Some(e))
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().flatten().all(|&e| e == 0)
    }

    /// `χ(a)` as a complex number, for display.
    pub fn complex_value(&self, a: u64) -> (f64, f64) {
        match self.exponent(a) {
            None => (0.0, 0.0),
            Some(e) => {
                let t = std::f64::consts::TAU * e as f64 / self.order as f64;
                (t.cos(), t.sin())
            }
        }
    }
}

/// `Σ c_a [χ(a)]` with each `a` the least residue carrying its value.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CharSpan {
    terms: BTreeMap<u64, Rational>,
}

impl CharSpan {
    pub fn symbol(a: u64, coeff: Rational) -> Self {
        let mut s = CharSpan::default();
        if !Zero::is_zero(&coeff) {
            s.terms.insert(a, coeff);
        }
        s
    }

    pub fn terms(&self) -> &BTreeMap<u64, Rational> {
        &self.terms
    }

    pub fn coeff(&self, a: u64) -> Rational {
        self.terms.get(&a).cloned().unwrap_or_else(<Rational as Zero>::zero)
    }

    /// The sum of the coefficients, i.e. the value when `χ` is trivial.
    pub fn total(&self) -> Rational {
        self.terms.values().fold(<Rational as Zero>::zero(), |acc, c| acc + c)
    }

    pub fn to_complex(&self, chi: &DirichletChar) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (&a, c) in &self.terms {
            let (x, y) = chi.complex_value(a);
            let c = rational_to_f64(c);
            re += c * x;
            im += c * y;
        }
        (re, im)
    }

    /// `re+imi` with `digits` decimals.
    pub fn render_complex(&self, chi: &DirichletChar, digits: usize) -> String {
        let (re, im) = self.to_complex(chi);
        let sign = if im < 0.0 { '-' } else { '+' };
        format!("{re:.digits$}{sign}{:.digits$}i", im.abs())
    }
}

fn rational_to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

impl Coeff for CharSpan {
    fn zero() -> Self {
        CharSpan::default()
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&a, c) in &other.terms {
            let slot = out.terms.entry(a).or_insert_with(<Rational as Zero>::zero);
            *slot += c;
            if Zero::is_zero(slot) {
                out.terms.remove(&a);
            }
        }
        out
    }

    fn scale(&self, by: &Rational) -> Self {
        if Zero::is_zero(by) {
            return CharSpan::default();
        }
        CharSpan {
            terms: self.terms.iter().map(|(&a, c)| (a, c * by)).collect(),
        }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn integral_after(&self, m: &BigInt) -> bool {
        self.terms.values().all(|c| is_integral(&(c * int(m.clone()))))
    }
}

impl fmt::Display for CharSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, c)| format!("({c})*chi({a})"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `[χ(N mod q)]`, or zero when `N` is not coprime to `q`.
pub fn ray_char_value(chi: &DirichletChar, ideal_norm: &BigInt) -> CharSpan {
    let a = residue_zero(ideal_norm, chi.q);
    match chi.canonical(a) {
        Some(b) => CharSpan::symbol(b, Rational::one()),
        None => CharSpan::default(),
    }
}

fn check_modulus(chi: &DirichletChar, q: u64) -> Result<()> {
    if chi.q != q {
        return Err(Error::InvalidInput(format!(
            "character modulus {} does not match q = {q}",
            chi.q
        )));
    }
    Ok(())
}

/// `L(0, χ∘N, 𝔟) = Σ χ(N((C + Dδ)𝔟)) ζ_q(0, (C + Dδ)𝔟)` over one label per
/// `ε`-orbit of `F_δ`.
pub fn hecke_l0(ctx: &RayContext, chi: &DirichletChar) -> Result<CharSpan> {
    check_modulus(chi, ctx.q())?;
    let orbits = ctx.orbits()?;
    let parts = orbits
        .par_iter()
        .map(|orbit| {
            let rep = orbit.seed();
            let z = ctx.partial_zeta0(rep)?;
            let sym = ray_char_value(chi, &ctx.field().label_norm(rep)?);
            Ok(sym.scale(&z))
        })
        .collect::<Result<Vec<CharSpan>>>()?;
    Ok(parts.iter().fold(CharSpan::default(), |acc, p| acc.add(p)))
}

/// Quasi-polynomial (k-form) of `L(0, χ∘N_{K_n}, 𝔟_n)` with its direct checks.
#[derive(Debug, Clone, PartialEq)]
pub struct HeckeFamily {
    pub poly: QuasiPoly<CharSpan>,
    /// `(n, value)` pairs at which the closed form was compared with
    /// [`hecke_l0`].
    pub checked: Vec<(u64, CharSpan)>,
    /// Orbit representatives used per residue.
    pub representatives: Vec<(u64, Vec<RayLabel>)>,
}

/// Representatives of the residue orbits partitioning `labels`.
fn residue_orbit_seeds(data: &ResidueData, labels: &[RayLabel]) -> Result<Vec<RayLabel>> {
    let mut seen: Vec<RayLabel> = Vec::new();
    let mut seeds = Vec::new();
    for &l in labels {
        if seen.contains(&l) {
            continue;
        }
        let orbit = data.orbit(l)?;
        seen.extend(orbit);
        seeds.push(l);
    }
    Ok(seeds)
}

/// Assembles the family L-value from the closed forms of one representative
/// per orbit, then checks it against direct values at `d + 2` usable `n`
/// per residue.
pub fn hecke_l0_family(fc: &FamilyContext, chi: &DirichletChar) -> Result<HeckeFamily> {
    check_modulus(chi, fc.q())?;
    let q = fc.q();
    let d = fc.degree();
    let mut poly = QuasiPoly::new(q, Form::K);
    let mut checked = Vec::new();
    let mut representatives = Vec::new();
    for r in 0..q {
        let labels = fc.labels_at(r)?;
        if labels.is_empty() {
            continue;
        }
        fc.check_hypotheses(r)?;
        let data = ResidueData::new(fc.spec(), q, r);
        let seeds = residue_orbit_seeds(&data, &labels)?;
        let samples = fc.first_usable(r, d + 2)?;
        let (_, first) = samples.first().expect("labels came from a usable sample");
        let parts = seeds
            .par_iter()
            .map(|&l| {
                let res = fc.quasi_poly(l, r)?;
                let sym = ray_char_value(chi, &first.field().label_norm(l)?);
                Ok(res.coeffs.iter().map(|c| sym.scale(c)).collect::<Vec<_>>())
            })
            .collect::<Result<Vec<Vec<CharSpan>>>>()?;
        let mut row = vec![CharSpan::default(); d + 1];
        for p in &parts {
            for (acc, c) in row.iter_mut().zip(p) {
                *acc = acc.add(c);
            }
        }
        for (k, ctx) in &samples {
            let direct = hecke_l0(ctx, chi)?;
            let closed = eval_poly(&row, &int(*k));
            let n = q * k + r;
            if direct != closed {
                return Err(Error::Verification(format!(
                    "L-value at n = {n}: closed form {closed}, direct {direct}"
                )));
            }
            checked.push((n, direct));
        }
        poly.insert(r, row);
        representatives.push((r, seeds));
    }
    Ok(HeckeFamily {
        poly,
        checked,
        representatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;
    use crate::shintani::FieldData;
    use std::sync::Arc;

    fn order4_mod5() -> DirichletChar {
        DirichletChar::from_generators(5, 4, &[(2, 1)]).unwrap()
    }

    #[test]
    fn character_tables() {
        let chi = order4_mod5();
        assert_eq!(chi.exponent(1), Some(0));
        assert_eq!(chi.exponent(2), Some(1));
        assert_eq!(chi.exponent(4), Some(2));
        assert_eq!(chi.exponent(3), Some(3));
        assert_eq!(chi.exponent(10), None);
        assert!(!chi.is_trivial());
        let t = DirichletChar::trivial(6).unwrap();
        assert!(t.is_trivial());
        assert_eq!(t.canonical(5), Some(1));
        assert_eq!(t.exponent(3), None);
    }

    #[test]
    fn malformed_tables() {
        // 2 has order 4 mod 5, so e(2) = 1 needs 4 ≡ 0 mod the order.
        assert!(DirichletChar::from_generators(5, 3, &[(2, 1)]).is_err());
        assert!(DirichletChar::from_generators(5, 2, &[(2, 1)]).is_ok());
        // 4 alone does not generate (Z/5)^×.
        assert!(DirichletChar::from_generators(5, 2, &[(4, 1)]).is_err());
        assert!(DirichletChar::from_generators(5, 4, &[(5, 1)]).is_err());
        // Quadratic character mod 5 from a square and a non-square.
        let chi = DirichletChar::from_generators(5, 2, &[(4, 0), (2, 1)]).unwrap();
        assert_eq!(chi.exponent(3), Some(1));
    }

    #[test]
    fn symbols() {
        let t = DirichletChar::trivial(2).unwrap();
        assert!(ray_char_value(&t, &BigInt::from(6)).is_zero());
        assert_eq!(ray_char_value(&t, &BigInt::from(7)), CharSpan::symbol(1, int(1)));
        assert_eq!(ray_char_value(&order4_mod5(), &BigInt::from(7)), CharSpan::symbol(2, int(1)));
    }

    #[test]
    fn span_arithmetic_and_rendering() {
        let chi = order4_mod5();
        let x = CharSpan::symbol(2, rat(1, 2)).add(&CharSpan::symbol(1, int(3)));
        assert_eq!(x.add(&CharSpan::symbol(2, rat(-1, 2))), CharSpan::symbol(1, int(3)));
        assert_eq!(x.to_string(), "(3)*chi(1) + (1/2)*chi(2)");
        assert_eq!(x.render_complex(&chi, 3), "3.000+0.500i");
        assert!(x.integral_after(&BigInt::from(2)));
        assert!(!x.integral_after(&BigInt::from(1)));
    }

    #[test]
    fn sqrt3_mod2() {
        let ctx = RayContext::new(Arc::new(FieldData::maximal_order(3).unwrap()), 2).unwrap();
        let l = hecke_l0(&ctx, &DirichletChar::trivial(2).unwrap()).unwrap();
        assert_eq!(l, CharSpan::symbol(1, rat(1, 6)));
        assert!(hecke_l0(&ctx, &order4_mod5()).is_err());
    }
}
