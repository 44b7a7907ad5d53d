//! Cone decomposition for one lattice `[1, δ]` and one modulus `q`.
//!
//! A ray label `(C, D)` stands for the class of `(C + Dδ)𝔟` where
//! `𝔟⁻¹ = [1, δ]`. Its partial zeta value at `s = 0` is a finite sum of
//! Bernoulli terms over the `λm` cones between consecutive boundary points,
//! where `m` is the minus continued fraction period of `δ` and `λ` the index
//! of the units `≡ 1 (mod q)` among the totally positive units.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::contfrac::{minus_cf, MinusCF};
use crate::error::{Error, Result};
use crate::exactmath::{
    bernoulli1, bernoulli2, frac_unit, int, is_integral, is_squarefree, residue_zero, Rational,
    DEFAULT_SQUAREFREE_BOUND,
};
use crate::quadfield::{
    fundamental_unit_totally_positive, reduce_matrix, unit_index_lambda, ModuleBasis, QuadElem,
    UnitMatrix,
};

/// Default cap on `λm`, the number of cones summed for one value.
pub const DEFAULT_MAX_TERMS: u64 = 1_000_000;

/// `(C, D)` with `0 ≤ C, D ≤ q-1`, not both zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RayLabel {
    pub c: u64,
    pub d: u64,
}

impl RayLabel {
    pub fn new(c: u64, d: u64, q: u64) -> Result<Self> {
        if c >= q || d >= q {
            return Err(Error::InvalidInput(format!(
                "label ({c},{d}) out of range for modulus {q}"
            )));
        }
        if c == 0 && d == 0 {
            return Err(Error::InvalidInput("label (0,0) is excluded".into()));
        }
        Ok(RayLabel { c, d })
    }
}

impl fmt::Display for RayLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.c, self.d)
    }
}

/// Successive images of a seed label under `ε`, seed first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub members: Vec<RayLabel>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn seed(&self) -> RayLabel {
        self.members[0]
    }

    /// Least member in lexicographic order.
    pub fn representative(&self) -> RayLabel {
        *self.members.iter().min().expect("orbits are non-empty")
    }

    pub fn contains(&self, label: &RayLabel) -> bool {
        self.members.contains(label)
    }
}

/// `x_i ∈ (0, 1]` and `y_i ∈ [0, 1)` for `i = 0..=count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XYSeq {
    pub xs: Vec<Rational>,
    pub ys: Vec<Rational>,
}

/// Everything about `[1, δ]` that does not depend on `q`.
#[derive(Debug, Clone)]
pub struct FieldData {
    basis: ModuleBasis,
    ideal_norm: BigInt,
    minus: MinusCF,
    eps: QuadElem,
    unit: UnitMatrix,
}

impl FieldData {
    /// `[1, δ]` must be a fractional ideal of the maximal order of
    /// `Q(√Δ)` containing `1`, with `Δ` squarefree.
    pub fn new(basis: ModuleBasis) -> Result<Self> {
        let ideal_norm = inverse_lattice_norm(&basis)?;
        let minus = minus_cf(basis.delta())?;
        let eps = fundamental_unit_totally_positive(&basis)?;
        let unit = basis.unit_matrix(&eps)?;
        Ok(FieldData {
            basis,
            ideal_norm,
            minus,
            eps,
            unit,
        })
    }

    /// The maximal order of `Q(√Δ)` in its reduced basis.
    pub fn maximal_order(radicand: impl Into<BigInt>) -> Result<Self> {
        let field = crate::quadfield::QuadField::new(radicand)?;
        Self::new(ModuleBasis::maximal_order(&field)?)
    }

    pub fn basis(&self) -> &ModuleBasis {
        &self.basis
    }

    pub fn delta(&self) -> &QuadElem {
        self.basis.delta()
    }

    /// `N(𝔟)`.
    pub fn ideal_norm(&self) -> &BigInt {
        &self.ideal_norm
    }

    pub fn minus_cf(&self) -> &MinusCF {
        &self.minus
    }

    /// `m`.
    pub fn period(&self) -> usize {
        self.minus.period()
    }

    pub fn eps(&self) -> &QuadElem {
        &self.eps
    }

    pub fn unit_matrix(&self) -> &UnitMatrix {
        &self.unit
    }

    /// `N((C + Dδ)𝔟)`, a positive integer.
    pub fn label_norm(&self, label: RayLabel) -> Result<BigInt> {
        let x = self.basis.eval(&int(label.c), &int(label.d));
        let n = x.norm() * int(self.ideal_norm.clone());
        if !is_integral(&n) || !n.is_positive() {
            return Err(Error::Verification(format!(
                "norm of ({} + {}δ)𝔟 is {n}, not a positive integer",
                label.c, label.d
            )));
        }
        Ok(n.to_integer())
    }
}

/// `N(𝔟) = 1 / N([1, δ])`, after checking that `[1, δ]` is a module over
/// the maximal order.
fn inverse_lattice_norm(basis: &ModuleBasis) -> Result<BigInt> {
    let field = basis.field();
    let radicand = field.radicand();
    if !is_squarefree(radicand, DEFAULT_SQUAREFREE_BOUND)? {
        return Err(Error::InvalidInput(format!(
            "radicand {radicand} is not squarefree"
        )));
    }
    let one_mod_four = radicand.mod_floor(&BigInt::from(4)).is_one();
    let root = QuadElem::sqrt(field);
    let omega = if one_mod_four {
        &(&root + &Rational::one()) * &Rational::new(1.into(), 2.into())
    } else {
        root
    };
    for x in [omega.clone(), &omega * basis.delta()] {
        let (u, v) = basis.coords(&x);
        if !is_integral(&u) || !is_integral(&v) {
            return Err(Error::InvalidInput(format!(
                "[1, {}] is not an ideal of the maximal order",
                basis.delta()
            )));
        }
    }
    let scale = if one_mod_four { int(2) } else { int(1) };
    let lattice_norm = basis.delta().b().abs() * scale;
    let inv = lattice_norm.recip();
    if !is_integral(&inv) {
        return Err(Error::InvalidInput(format!(
            "[1, {}] does not contain the maximal order",
            basis.delta()
        )));
    }
    Ok(inv.to_integer())
}

/// [`FieldData`] together with a modulus `q`.
#[derive(Debug, Clone)]
pub struct RayContext {
    field: Arc<FieldData>,
    q: u64,
    lambda: u64,
    unit_mod_q: [[u64; 2]; 2],
    max_terms: u64,
}

impl RayContext {
    pub fn new(field: Arc<FieldData>, q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidInput(format!(
                "modulus must be at least 2 (no labels exist for q = {q})"
            )));
        }
        if !field.ideal_norm.gcd(&BigInt::from(q)).is_one() {
            return Err(Error::InvalidInput(format!(
                "N(𝔟) = {} is not coprime to q = {q}",
                field.ideal_norm
            )));
        }
        let bound = q.checked_mul(q).ok_or_else(|| {
            Error::InvalidInput(format!("modulus {q} is too large"))
        })?;
        let lambda = unit_index_lambda(&field.basis, q, &field.eps, bound)?;
        let unit_mod_q = reduce_matrix(&field.unit, q);
        Ok(RayContext {
            field,
            q,
            lambda,
            unit_mod_q,
            max_terms: DEFAULT_MAX_TERMS,
        })
    }

    pub fn with_max_terms(mut self, max_terms: u64) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn field(&self) -> &Arc<FieldData> {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `[E⁺ : E⁺_q]`.
    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn max_terms(&self) -> u64 {
        self.max_terms
    }

    /// `λm`, the number of cones in a fundamental domain.
    pub fn term_count(&self) -> u64 {
        self.lambda * self.field.period() as u64
    }

    pub fn is_coprime(&self, label: RayLabel) -> Result<bool> {
        let n = self.field.label_norm(label)?;
        Ok(n.gcd(&BigInt::from(self.q)).is_one())
    }

    /// A label of `F_δ`, or the reason it is not one.
    pub fn label(&self, c: u64, d: u64) -> Result<RayLabel> {
        let label = RayLabel::new(c, d, self.q)?;
        if !self.is_coprime(label)? {
            return Err(Error::LabelNotCoprime { c, d, q: self.q });
        }
        Ok(label)
    }

    /// `F_δ` in lexicographic order.
    pub fn f_delta(&self) -> Result<Vec<RayLabel>> {
        let mut out = Vec::new();
        for c in 0..self.q {
            for d in 0..self.q {
                if c == 0 && d == 0 {
                    continue;
                }
                let label = RayLabel { c, d };
                if self.is_coprime(label)? {
                    out.push(label);
                }
            }
        }
        Ok(out)
    }

    /// `ε ∗ (C + Dδ)`, reduced into `[0, q-1]²`.
    pub fn eps_act(&self, label: RayLabel) -> RayLabel {
        let m = &self.unit_mod_q;
        let q = self.q as u128;
        let (c, d) = (label.c as u128, label.d as u128);
        RayLabel {
            c: ((m[0][0] as u128 * c + m[0][1] as u128 * d) % q) as u64,
            d: ((m[1][0] as u128 * c + m[1][1] as u128 * d) % q) as u64,
        }
    }

    pub fn orbit(&self, label: RayLabel) -> Result<Orbit> {
        let mut members = vec![label];
        let mut cur = self.eps_act(label);
        while cur != label {
            if members.len() as u64 >= self.lambda {
                return Err(Error::Verification(format!(
                    "orbit of {label} does not close within λ = {} steps",
                    self.lambda
                )));
            }
            members.push(cur);
            cur = self.eps_act(cur);
        }
        if members.len() as u64 != self.lambda {
            return Err(Error::Verification(format!(
                "orbit of {label} has length {}, expected λ = {}",
                members.len(),
                self.lambda
            )));
        }
        Ok(Orbit { members })
    }

    /// The partition of `F_δ` into orbits, each seeded at its least member,
    /// listed by seed.
    pub fn orbits(&self) -> Result<Vec<Orbit>> {
        let mut out: Vec<Orbit> = Vec::new();
        for label in self.f_delta()? {
            if out.iter().any(|o| o.contains(&label)) {
                continue;
            }
            out.push(self.orbit(label)?);
        }
        Ok(out)
    }

    fn check_budget(&self, terms: u64) -> Result<()> {
        if terms > self.max_terms {
            return Err(Error::TermLimit {
                needed: terms,
                limit: self.max_terms,
            });
        }
        Ok(())
    }

    /// Recursive `(x_i, y_i)` for `i = 0..=λm`.
    pub fn xy(&self, label: RayLabel) -> Result<XYSeq> {
        let n = self.term_count();
        self.check_budget(n)?;
        Ok(yamamoto_xy(label, self.q, &self.field.minus, n as usize))
    }

    /// Contribution of the first `m` cones, i.e. one orbit member's share.
    pub fn period_sum(&self, label: RayLabel) -> Rational {
        let m = self.field.period();
        let seq = yamamoto_xy(label, self.q, &self.field.minus, m);
        cone_sum(&seq.xs, &self.field.minus)
    }

    /// `ζ_q(0, (C + Dδ)𝔟)`, computed over all `λm` cones and again orbit
    /// member by orbit member; the two must agree.
    pub fn partial_zeta0(&self, label: RayLabel) -> Result<Rational> {
        if !self.is_coprime(label)? {
            return Err(Error::LabelNotCoprime {
                c: label.c,
                d: label.d,
                q: self.q,
            });
        }
        let seq = self.xy(label)?;
        let whole = cone_sum(&seq.xs, &self.field.minus);
        let orbit = self.orbit(label)?;
        let split = orbit
            .members
            .iter()
            .fold(Rational::zero(), |acc, &l| acc + self.period_sum(l));
        if whole != split {
            return Err(Error::Verification(format!(
                "zeta value of {label}: full sum {whole} but orbit sum {split}"
            )));
        }
        Ok(whole)
    }

    /// `ζ_q(0, ·)` for every label of `F_δ`, lexicographic order.
    pub fn zeta_table(&self) -> Result<Vec<(RayLabel, Rational)>> {
        let labels = self.f_delta()?;
        labels
            .par_iter()
            .map(|&l| self.partial_zeta0(l).map(|z| (l, z)))
            .collect()
    }
}

/// `Σ_{i=1}^{len-1} -B₁(x_i)B₁(x_{i-1}) + (b_i/2)B₂(x_i)`.
pub fn cone_sum(xs: &[Rational], minus: &MinusCF) -> Rational {
    let half = Rational::new(1.into(), 2.into());
    let mut acc = Rational::zero();
    for i in 1..xs.len() {
        let b = int(minus.term(i).clone());
        acc += -(bernoulli1(&xs[i]) * bernoulli1(&xs[i - 1])) + b * &half * bernoulli2(&xs[i]);
    }
    acc
}

/// `x_0 = ⟨D/q⟩`, `x_{-1} = (q-C)/q`, `x_{i+1} = ⟨b_i x_i - x_{i-1}⟩`,
/// `y_0 = C/q`, `y_{i+1} = 1 - x_i`.
pub fn yamamoto_xy(label: RayLabel, q: u64, minus: &MinusCF, count: usize) -> XYSeq {
    let qi = q as i64;
    let mut xs = Vec::with_capacity(count + 1);
    let mut ys = Vec::with_capacity(count + 1);
    let mut prev = Rational::new((qi - label.c as i64).into(), qi.into());
    let mut cur = frac_unit(&Rational::new((label.d as i64).into(), qi.into()));
    ys.push(Rational::new((label.c as i64).into(), qi.into()));
    xs.push(cur.clone());
    for i in 0..count {
        let next = frac_unit(&(int(minus.term(i).clone()) * &cur - &prev));
        ys.push(Rational::one() - &cur);
        prev = std::mem::replace(&mut cur, next);
        xs.push(cur.clone());
    }
    XYSeq { xs, ys }
}

/// `[1, δ]` coordinates of `P_{-1}, P_0, ..., P_count`, where `P_{-1} = δ`,
/// `P_0 = 1` and `P_{i+1} = b_i P_i - P_{i-1}`.
pub fn boundary_coords(minus: &MinusCF, count: usize) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::with_capacity(count + 2);
    out.push((BigInt::zero(), BigInt::one()));
    out.push((BigInt::one(), BigInt::zero()));
    for i in 0..count {
        let b = minus.term(i);
        let (u1, v1) = &out[i + 1];
        let (u0, v0) = &out[i];
        let next = (b * u1 - u0, b * v1 - v0);
        out.push(next);
    }
    out
}

/// `P_{-1}, ..., P_count` as field elements.
pub fn boundary_points(basis: &ModuleBasis, minus: &MinusCF, count: usize) -> Vec<QuadElem> {
    boundary_coords(minus, count)
        .iter()
        .map(|(u, v)| basis.eval(&int(u.clone()), &int(v.clone())))
        .collect()
}

/// The representative `x P_{i-1} + y P_i` of `(C + Dδ)/q + [1, δ]` with
/// `x ∈ (0, 1]`, `y ∈ [0, 1)`, found by inverting the basis change.
/// `coords` is the output of [`boundary_coords`], so `P_j` sits at `j + 1`.
pub fn xy_direct(
    label: RayLabel,
    q: u64,
    i: usize,
    coords: &[(BigInt, BigInt)],
) -> Result<(Rational, Rational)> {
    let (u1, v1) = &coords[i];
    let (u2, v2) = &coords[i + 1];
    let det = u1 * v2 - u2 * v1;
    if det.abs() != BigInt::one() {
        return Err(Error::Verification(format!(
            "boundary points P_{} and P_{} are not a basis (determinant {det})",
            i as i64 - 1,
            i
        )));
    }
    let qb = BigInt::from(q);
    let c = Rational::new(BigInt::from(label.c), qb.clone());
    let d = Rational::new(BigInt::from(label.d), qb);
    let det = int(det);
    let x0 = (&c * int(v2.clone()) - &d * int(u2.clone())) / &det;
    let y0 = (&d * int(u1.clone()) - &c * int(v1.clone())) / &det;
    let y = &y0 - y0.floor();
    Ok((frac_unit(&x0), y))
}

/// Residue of `N((C + Dδ)𝔟)` modulo `q`.
pub fn norm_residue(field: &FieldData, label: RayLabel, q: u64) -> Result<u64> {
    Ok(residue_zero(&field.label_norm(label)?, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;
    use crate::quadfield::QuadField;
    use proptest::prelude::*;

    fn sqrt3(q: u64) -> RayContext {
        RayContext::new(Arc::new(FieldData::maximal_order(3).unwrap()), q).unwrap()
    }

    fn lab(c: u64, d: u64) -> RayLabel {
        RayLabel { c, d }
    }

    #[test]
    fn labels_for_sqrt3() {
        let ctx = sqrt3(2);
        assert_eq!(ctx.field().delta().to_string(), "2 + 1*sqrt(3)");
        assert_eq!(ctx.f_delta().unwrap(), vec![lab(0, 1), lab(1, 0)]);
        // Brute force over the 8 nonzero labels mod 3.
        let ctx3 = sqrt3(3);
        let expected: Vec<RayLabel> = (0..3u64)
            .flat_map(|c| (0..3u64).map(move |d| lab(c, d)))
            .filter(|l| (l.c, l.d) != (0, 0))
            .filter(|l| {
                let (c, d) = (l.c as i64, l.d as i64);
                // N(C + D(2 + √3)) = (C + 2D)² - 3D²
                let n = (c + 2 * d).pow(2) - 3 * d * d;
                n % 3 != 0
            })
            .collect();
        assert_eq!(ctx3.f_delta().unwrap(), expected);
        assert!(RayContext::new(ctx.field().clone(), 1).is_err());
        assert!(matches!(
            ctx.label(1, 1),
            Err(Error::LabelNotCoprime { c: 1, d: 1, q: 2 })
        ));
    }

    #[test]
    fn even_norm_ideal_is_rejected_for_q2() {
        let k = QuadField::new(3).unwrap();
        // [1, (3 + √3)/2] is the inverse of an ideal of norm 2.
        let delta = QuadElem::new(&k, rat(3, 2), rat(1, 2));
        let field = FieldData::new(ModuleBasis::new(delta).unwrap()).unwrap();
        assert_eq!(field.ideal_norm(), &BigInt::from(2));
        assert!(RayContext::new(Arc::new(field.clone()), 2).is_err());
        assert!(RayContext::new(Arc::new(field), 3).is_ok());
    }

    #[test]
    fn non_ideal_lattice_is_rejected() {
        let k = QuadField::new(5).unwrap();
        // Z[√5] is not a module over Z[(1+√5)/2].
        let delta = QuadElem::new(&k, int(3), int(1));
        let basis = ModuleBasis::new(delta).unwrap();
        assert!(FieldData::new(basis).is_err());
    }

    #[test]
    fn eps_action_and_orbits() {
        let ctx = sqrt3(2);
        assert_eq!(ctx.eps_act(lab(1, 0)), lab(0, 1));
        assert_eq!(ctx.eps_act(lab(0, 1)), lab(1, 0));
        assert_eq!(ctx.orbit(lab(1, 0)).unwrap().members, vec![lab(1, 0), lab(0, 1)]);
        assert_eq!(ctx.orbit(lab(0, 1)).unwrap().members, vec![lab(0, 1), lab(1, 0)]);
        assert_eq!(ctx.orbits().unwrap().len(), 1);
    }

    #[test]
    fn eps_action_matches_field_multiplication() {
        let field = Arc::new(FieldData::maximal_order(11).unwrap());
        let ctx = RayContext::new(field.clone(), 5).unwrap();
        for label in ctx.f_delta().unwrap() {
            let x = field.basis().eval(&int(label.c), &int(label.d));
            let (u, v) = field.basis().coords(&(&x * field.eps()));
            assert!(is_integral(&u) && is_integral(&v));
            let expected = lab(
                residue_zero(&u.to_integer(), 5),
                residue_zero(&v.to_integer(), 5),
            );
            assert_eq!(ctx.eps_act(label), expected);
        }
    }

    #[test]
    fn unit_congruent_to_one_gives_singleton_orbits() {
        // Δ = 2: ε = 3 + 2√2 = -1 + 2δ ≡ 1 (mod 2).
        let ctx = RayContext::new(Arc::new(FieldData::maximal_order(2).unwrap()), 2).unwrap();
        assert_eq!(ctx.lambda(), 1);
        assert_eq!(ctx.f_delta().unwrap(), vec![lab(1, 0), lab(1, 1)]);
        for orbit in ctx.orbits().unwrap() {
            assert_eq!(orbit.len(), 1);
        }
    }

    #[test]
    fn lambda_power_acts_trivially() {
        let ctx = sqrt3(3);
        for label in ctx.f_delta().unwrap() {
            let mut cur = label;
            for _ in 0..ctx.lambda() {
                cur = ctx.eps_act(cur);
            }
            assert_eq!(cur, label);
        }
    }

    #[test]
    fn boundary_points_for_sqrt3() {
        let field = FieldData::maximal_order(3).unwrap();
        let k = field.basis().field().clone();
        let p = boundary_points(field.basis(), field.minus_cf(), 2);
        let e = |a: i64, b: i64| QuadElem::new(&k, int(a), int(b));
        assert_eq!(p, vec![e(2, 1), e(1, 0), e(2, -1), e(7, -4)]);
        // P_{λm} = ε^{-λ} with λ = 2, m = 1 at q = 2.
        assert_eq!(p[3], field.eps().pow(2).inv().unwrap());
    }

    #[test]
    fn boundary_points_are_unimodular() {
        let field = FieldData::maximal_order(19).unwrap();
        let coords = boundary_coords(field.minus_cf(), 40);
        for w in coords.windows(2) {
            let det = &w[0].0 * &w[1].1 - &w[1].0 * &w[0].1;
            assert_eq!(det.abs(), BigInt::one());
        }
    }

    #[test]
    fn last_boundary_point_is_inverse_unit_power() {
        let field = Arc::new(FieldData::maximal_order(11).unwrap());
        for q in [2u64, 3, 5, 7] {
            let ctx = RayContext::new(field.clone(), q).unwrap();
            let n = ctx.term_count() as usize;
            let p = boundary_points(field.basis(), field.minus_cf(), n);
            let expected = field.eps().pow(ctx.lambda()).inv().unwrap();
            assert_eq!(p[n + 1], expected, "q = {q}");
        }
    }

    #[test]
    fn recursion_examples() {
        let minus = MinusCF::from_i64(&[4]).unwrap();
        let s = yamamoto_xy(lab(1, 0), 2, &minus, 2);
        assert_eq!(s.xs, vec![int(1), rat(1, 2), int(1)]);
        assert_eq!(s.ys[0], rat(1, 2));
        let s = yamamoto_xy(lab(0, 1), 2, &minus, 1);
        assert_eq!(s.xs, vec![rat(1, 2), int(1)]);
    }

    #[test]
    fn direct_examples() {
        let field = FieldData::maximal_order(3).unwrap();
        let coords = boundary_coords(field.minus_cf(), 2);
        assert_eq!(xy_direct(lab(1, 0), 2, 0, &coords).unwrap(), (int(1), rat(1, 2)));
        assert_eq!(xy_direct(lab(0, 1), 2, 0, &coords).unwrap(), (rat(1, 2), int(0)));
    }

    #[test]
    fn zeta_for_sqrt3_mod_2() {
        let ctx = sqrt3(2);
        assert_eq!(ctx.partial_zeta0(lab(1, 0)).unwrap(), rat(1, 6));
        assert_eq!(ctx.partial_zeta0(lab(0, 1)).unwrap(), rat(1, 6));
        assert!(ctx.partial_zeta0(lab(1, 1)).is_err());
        let table = ctx.zeta_table().unwrap();
        assert_eq!(table, vec![(lab(0, 1), rat(1, 6)), (lab(1, 0), rat(1, 6))]);
    }

    #[test]
    fn term_budget_is_enforced() {
        let ctx = sqrt3(5).with_max_terms(1);
        assert!(ctx.term_count() > 1);
        assert!(matches!(
            ctx.partial_zeta0(lab(1, 0)),
            Err(Error::TermLimit { limit: 1, .. })
        ));
    }

    #[test]
    fn recursion_matches_lattice_and_orbit() {
        for radicand in [3i64, 6, 7, 11, 19, 23] {
            let field = Arc::new(FieldData::maximal_order(radicand).unwrap());
            for q in [2u64, 3, 4, 5] {
                let Ok(ctx) = RayContext::new(field.clone(), q) else {
                    continue;
                };
                let n = ctx.term_count() as usize;
                let coords = boundary_coords(field.minus_cf(), n);
                let m = field.period();
                for label in ctx.f_delta().unwrap() {
                    let seq = ctx.xy(label).unwrap();
                    for i in 0..=n {
                        let (x, y) = xy_direct(label, q, i, &coords).unwrap();
                        assert_eq!((&seq.xs[i], &seq.ys[i]), (&x, &y), "Δ={radicand} q={q} {label} i={i}");
                        assert!((&x * int(q)).is_integer() && (&y * int(q)).is_integer());
                    }
                    // x_{mi} = ⟨D_i/q⟩ and y_{mi} = C_i/q along the orbit.
                    let orbit = ctx.orbit(label).unwrap();
                    for (i, member) in orbit.members.iter().enumerate() {
                        let qi = q as i64;
                        assert_eq!(seq.xs[m * i], frac_unit(&rat(member.d as i64, qi)));
                        assert_eq!(seq.ys[m * i], rat(member.c as i64, qi));
                    }
                    let z = ctx.partial_zeta0(label).unwrap();
                    let bound = BigInt::from(12 * q * q);
                    assert!((bound % z.denom()).is_zero(), "denominator of {z}");
                    for member in &orbit.members {
                        assert_eq!(ctx.partial_zeta0(*member).unwrap(), z);
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn orbit_length_is_lambda(idx in 0usize..8, q in 2u64..9) {
            let radicands = [2i64, 3, 6, 7, 10, 11, 14, 15];
            let field = Arc::new(FieldData::maximal_order(radicands[idx]).unwrap());
            let ctx = RayContext::new(field, q).unwrap();
            for label in ctx.f_delta().unwrap() {
                let orbit = ctx.orbit(label).unwrap();
                prop_assert_eq!(orbit.len() as u64, ctx.lambda());
                prop_assert_eq!(ctx.eps_act(*orbit.members.last().unwrap()), label);
            }
        }
    }
}
