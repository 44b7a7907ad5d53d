//! Data attached to a residue class `n ≡ r (mod q)`: the residues `γ_i`,
//! quotients `τ_i`, the index sums `Γ_j`, the `ν` sequences and the
//! closed-form coefficients `B^i_{AB}(r)`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{Pow, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{
    bernoulli1, bernoulli2, frac_unit, int, int_part_unit, residue_one, residue_zero, Rational,
};
use crate::family::spec::FamilySpec;
use crate::shintani::RayLabel;

/// `γ_i(r) ∈ [1, q]` and `τ_i(r)` with `a_i(r) = qτ_i(r) + γ_i(r)`, for
/// `i = 0..s`.
pub fn gamma_tau(spec: &FamilySpec, q: u64, r: u64) -> (Vec<u64>, Vec<BigInt>) {
    let rb = BigInt::from(r);
    let mut gammas = Vec::with_capacity(spec.s());
    let mut taus = Vec::with_capacity(spec.s());
    for i in 0..spec.s() {
        let a = spec.a_value(i, &rb);
        let g = residue_one(&a, q);
        taus.push((a - g) / BigInt::from(q));
        gammas.push(g);
    }
    (gammas, taus)
}

/// `A_{im}(r) = Σ_{j=m}^{d} α_{ij} C(j, m) q^{m-1} r^{j-m}` for `m ≥ 1`.
pub fn a_im(spec: &FamilySpec, i: usize, m: usize, q: u64, r: u64) -> Rational {
    assert!(m >= 1, "A_im is defined for m ≥ 1");
    let poly = &spec.a[i % spec.s()];
    let mut acc = Rational::zero();
    for j in m..=poly.degree() {
        let c = poly.coeff(j)
            * int(binomial(BigInt::from(j), BigInt::from(m)))
            * int(BigInt::from(q).pow(m - 1))
            * int(BigInt::from(r).pow(j - m));
        acc += c;
    }
    acc
}

#[derive(Debug, Clone)]
pub struct ResidueData {
    pub q: u64,
    pub r: u64,
    pub gamma: Vec<u64>,
    pub tau: Vec<BigInt>,
    /// `Γ_0, ..., Γ_P` with `P` the pair count.
    pub big_gamma: Vec<u64>,
    pub pairs: usize,
}

impl ResidueData {
    pub fn new(spec: &FamilySpec, q: u64, r: u64) -> Self {
        assert!(r < q, "residue out of range");
        let (gamma, tau) = gamma_tau(spec, q, r);
        let s = spec.s();
        let pairs = spec.pairs();
        let mut big_gamma = vec![0u64];
        for j in 1..=pairs {
            big_gamma.push(big_gamma[j - 1] + gamma[(2 * j - 1) % s]);
        }
        ResidueData {
            q,
            r,
            gamma,
            tau,
            big_gamma,
            pairs,
        }
    }

    pub fn gamma_at(&self, i: usize) -> u64 {
        self.gamma[i % self.gamma.len()]
    }

    pub fn tau_at(&self, i: usize) -> &BigInt {
        &self.tau[i % self.tau.len()]
    }

    /// `c_i = γ_{2j} + 2` at `i = Γ_j`, else `2`.
    pub fn c(&self, i: u64) -> u64 {
        // Within one period of pairs; indices past Γ_P wrap with it.
        let period = self.big_gamma[self.pairs];
        let i = i % period;
        match self.big_gamma[..self.pairs].iter().position(|&g| g == i) {
            Some(j) => self.gamma_at(2 * j) + 2,
            None => 2,
        }
    }

    /// `ν^{-1}, ν^0, ..., ν^{len}` for the label `(A, B)`.
    pub fn nu(&self, label: RayLabel, len: u64) -> NuSeq {
        let qi = self.q as i64;
        let mut vals = Vec::with_capacity(len as usize + 2);
        vals.push(Rational::new((qi - label.c as i64).into(), qi.into()));
        vals.push(frac_unit(&Rational::new((label.d as i64).into(), qi.into())));
        for i in 0..len {
            let i = i as usize;
            let next = frac_unit(&(int(self.c(i as u64)) * &vals[i + 1] - &vals[i]));
            vals.push(next);
        }
        NuSeq { vals }
    }

    /// `ν` up to `Γ_P`, enough for every closed-form coefficient.
    pub fn nu_full(&self, label: RayLabel) -> NuSeq {
        self.nu(label, self.big_gamma[self.pairs])
    }

    /// `ε ∗ (A, B)` read off the `ν` sequence:
    /// `D' = qν^{Γ_P}`, `C' = q(1 - ν^{Γ_P - 1})`, both mod `q`.
    pub fn eps_act(&self, label: RayLabel) -> RayLabel {
        let nu = self.nu_full(label);
        let gp = self.big_gamma[self.pairs] as i64;
        let qr = int(self.q);
        let d = (nu.at(gp) * &qr).to_integer();
        let c = ((Rational::from_integer(1.into()) - nu.at(gp - 1)) * &qr).to_integer();
        RayLabel {
            c: residue_zero(&c, self.q),
            d: residue_zero(&d, self.q),
        }
    }

    /// `Orb_{AB}(r)`, seed first.
    pub fn orbit(&self, label: RayLabel) -> Result<Vec<RayLabel>> {
        let mut out = vec![label];
        let mut cur = self.eps_act(label);
        while cur != label {
            if out.len() as u64 > self.q * self.q {
                return Err(Error::Verification(format!(
                    "residue orbit of {label} does not close"
                )));
            }
            out.push(cur);
            cur = self.eps_act(cur);
        }
        Ok(out)
    }

    /// `d^l = ⟨ν^{Γ_l + 1} - ν^{Γ_l}⟩`.
    pub fn d(&self, nu: &NuSeq, l: usize) -> Rational {
        let g = self.big_gamma[l] as i64;
        frac_unit(&(nu.at(g + 1) - nu.at(g)))
    }
}

/// `ν^{-1}, ν^0, ν^1, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NuSeq {
    vals: Vec<Rational>,
}

impl NuSeq {
    pub fn at(&self, i: i64) -> &Rational {
        &self.vals[usize::try_from(i + 1).expect("ν index ≥ -1")]
    }

    /// Highest available index.
    pub fn top(&self) -> i64 {
        self.vals.len() as i64 - 2
    }
}

/// Reading of the bracket `[x]_1` in the arithmetic-progression sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bracket {
    /// `⟨x⟩ ∈ (0, 1]`.
    FracUnit,
    /// `x - ⟨x⟩`, the number of wraps of the progression.
    IntegerPart,
}

/// Shape of the remainder term in `B⁰`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstTerm {
    /// `-6B₂(ν^{Γ_l})`, bracket group not multiplied by 6.
    AsStated,
    /// `-6B₂(ν^{Γ_{l+1}})`, bracket group multiplied by 6.
    AsInProof,
    /// `-6B₂(ν^{Γ_l})`, bracket group multiplied by 6.
    Reconciled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Variant {
    pub bracket: Bracket,
    pub constant: ConstTerm,
}

impl Variant {
    pub fn name(&self) -> String {
        let b = match self.bracket {
            Bracket::FracUnit => "frac",
            Bracket::IntegerPart => "wraps",
        };
        let c = match self.constant {
            ConstTerm::AsStated => "stated",
            ConstTerm::AsInProof => "in-proof",
            ConstTerm::Reconciled => "reconciled",
        };
        format!("bracket={b},b0={c}")
    }

    fn bracket(&self, x: &Rational) -> Rational {
        match self.bracket {
            Bracket::FracUnit => frac_unit(x),
            Bracket::IntegerPart => int_part_unit(x),
        }
    }
}

/// Candidates in the order they are tried.
pub const VARIANTS: [Variant; 6] = [
    Variant { bracket: Bracket::FracUnit, constant: ConstTerm::AsStated },
    Variant { bracket: Bracket::FracUnit, constant: ConstTerm::AsInProof },
    Variant { bracket: Bracket::FracUnit, constant: ConstTerm::Reconciled },
    Variant { bracket: Bracket::IntegerPart, constant: ConstTerm::AsStated },
    Variant { bracket: Bracket::IntegerPart, constant: ConstTerm::AsInProof },
    Variant { bracket: Bracket::IntegerPart, constant: ConstTerm::Reconciled },
];

/// The variant that matches direct evaluation.
pub const CORRECT_VARIANT: Variant = Variant {
    bracket: Bracket::IntegerPart,
    constant: ConstTerm::Reconciled,
};

/// `(1/12)(6(q d² + (1 - 2d)[ν^{Γ_l} + dq]_1) - q)`: the sum of one full
/// period of `q` kernel terms in block `l`.
fn full_block(v: Variant, q: &Rational, d: &Rational, start: &Rational) -> Rational {
    let one = Rational::from_integer(1.into());
    let br = v.bracket(&(start + d * q));
    (int(6) * (q * d * d + (&one - int(2) * d) * br) - q) / int(12)
}

/// `B⁰_{AB}(r), ..., B^d_{AB}(r)` for one orbit member.
pub fn coeffs_closed(
    spec: &FamilySpec,
    data: &ResidueData,
    label: RayLabel,
    v: Variant,
) -> Vec<Rational> {
    let deg = spec.degree();
    let q = int(data.q);
    let half = Rational::new(1.into(), 2.into());
    let one = Rational::from_integer(1.into());
    let nu = data.nu_full(label);
    let gam = |l: usize| data.big_gamma[l] as i64;
    let p = data.pairs;
    let mut out = vec![Rational::zero(); deg + 1];

    for l in 1..=p {
        let x = nu.at(gam(l));
        let b2 = bernoulli2(x);
        let b_const = (&q * int(data.tau_at(2 * l).clone()) + int(data.gamma_at(2 * l)) + int(2)) * &half;
        out[0] += -(bernoulli1(x) * bernoulli1(nu.at(gam(l) - 1))) + b_const * &b2;
        for (m, slot) in out.iter_mut().enumerate().skip(1) {
            *slot += &q * &half * a_im(spec, 2 * l, m, data.q, data.r) * &b2;
        }
    }
    for l in 0..p {
        let d = data.d(&nu, l);
        let start = nu.at(gam(l));
        let phi = full_block(v, &q, &d, start);
        let g = int(data.gamma_at(2 * l + 1));
        let gm1 = &g - &one;
        let br = v.bracket(&(start + &d * &gm1));
        let group = &gm1 * &d * &d + (&one - int(2) * &d) * br;
        let tail = bernoulli2(nu.at(gam(l + 1) - 1));
        let rem = match v.constant {
            ConstTerm::AsStated => int(6) * &tail - int(6) * bernoulli2(start) + group - &gm1,
            ConstTerm::AsInProof => {
                int(6) * &tail - int(6) * bernoulli2(nu.at(gam(l + 1))) + int(6) * group - &gm1
            }
            ConstTerm::Reconciled => int(6) * &tail - int(6) * bernoulli2(start) + int(6) * group - &gm1,
        } / int(12);
        out[0] += int(data.tau_at(2 * l + 1).clone()) * &phi + rem;
        for (m, slot) in out.iter_mut().enumerate().skip(1) {
            *slot += a_im(spec, 2 * l + 1, m, data.q, data.r) * &phi;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    fn rd() -> FamilySpec {
        FamilySpec::preset("rd-n2p2").unwrap()
    }

    fn quartic() -> FamilySpec {
        FamilySpec::preset("quartic-16n4").unwrap()
    }

    #[test]
    fn gamma_tau_examples() {
        // a_1 = x at r = 1, q = 2.
        let (g, t) = gamma_tau(&rd(), 2, 1);
        assert_eq!((g[1], t[1].clone()), (1, BigInt::from(0)));
        // a_0 = 2x at r = 1, q = 2: 2 = 2·0 + 2.
        assert_eq!((g[0], t[0].clone()), (2, BigInt::from(0)));
        // a_1 = 2x + 1 at r = 0, q = 3.
        let (g, t) = gamma_tau(&quartic(), 3, 0);
        assert_eq!((g[1], t[1].clone()), (1, BigInt::from(0)));
        // a_0 = 2x at r = 0 is 0 = 2·(-1) + 2.
        let (g, t) = gamma_tau(&rd(), 2, 0);
        assert_eq!((g[0], t[0].clone()), (2, BigInt::from(-1)));
    }

    #[test]
    fn a_im_examples() {
        for q in 2..6u64 {
            for r in 0..q {
                assert_eq!(a_im(&rd(), 0, 1, q, r), int(2));
                assert_eq!(a_im(&quartic(), 0, 2, q, r), int(8 * q as i64));
                assert_eq!(a_im(&quartic(), 0, 1, q, r), int(16 * r as i64 + 8));
                assert_eq!(a_im(&quartic(), 1, 2, q, r), int(0));
            }
        }
    }

    #[test]
    fn a_im_reassembles_a_i() {
        for spec in [rd(), quartic()] {
            for q in 2..6u64 {
                for r in 0..q {
                    let (g, t) = gamma_tau(&spec, q, r);
                    for i in 0..spec.s() {
                        for k in 0..4u64 {
                            let n = BigInt::from(q * k + r);
                            let mut rhs = int(q) * int(t[i].clone()) + int(g[i]);
                            for m in 1..=spec.degree() {
                                rhs += int(q) * a_im(&spec, i, m, q, r) * int(k).pow(m as i32);
                            }
                            assert_eq!(int(spec.a_value(i, &n)), rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn nu_start() {
        let data = ResidueData::new(&rd(), 2, 1);
        let nu = data.nu(RayLabel { c: 1, d: 0 }, 3);
        assert_eq!(nu.at(0), &int(1));
        assert_eq!(nu.at(-1), &rat(1, 2));
        assert_eq!(data.big_gamma, vec![0, 1]);
        assert_eq!(data.c(0), 4);
    }

    #[test]
    fn constant_family_has_no_higher_terms() {
        let spec = FamilySpec::new(
            "const",
            crate::family::poly::Poly::from_i64(&[3]),
            vec![crate::family::poly::Poly::from_i64(&[2]), crate::family::poly::Poly::from_i64(&[1])],
            0,
            None,
        )
        .unwrap();
        assert_eq!(spec.degree(), 0);
        let data = ResidueData::new(&spec, 2, 1);
        let c = coeffs_closed(&spec, &data, RayLabel { c: 1, d: 0 }, CORRECT_VARIANT);
        assert_eq!(c.len(), 1);
    }
}
