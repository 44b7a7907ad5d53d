//! Per-modulus driver for a family: sampling, hypothesis checks, closed
//! forms with self-verification, and the interpolation oracle.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactmath::{int, Rational};
use crate::family::quasi::{eval_poly, interpolate, Form, QuasiPoly};
use crate::family::residue::{coeffs_closed, ResidueData, Variant, CORRECT_VARIANT, VARIANTS};
use crate::family::spec::{FamilySpec, Sample};
use crate::shintani::{norm_residue, RayContext, RayLabel, DEFAULT_MAX_TERMS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyOptions {
    pub max_terms: u64,
    /// `k` values used for hypothesis checks and the oracle.
    pub k_values: Vec<u64>,
    /// Largest `k` tried when looking for usable samples.
    pub k_search: u64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            max_terms: DEFAULT_MAX_TERMS,
            k_values: (0..=6).collect(),
            k_search: 64,
        }
    }
}

#[derive(Clone)]
enum Slot {
    Ready(Arc<RayContext>),
    Skipped(String),
}

/// A family together with a modulus `q`. Field data per `n` is computed
/// once and shared between threads.
pub struct FamilyContext {
    spec: Arc<FamilySpec>,
    q: u64,
    opts: FamilyOptions,
    cache: Mutex<HashMap<u64, Slot>>,
}

/// Closed form for one `(C, D)` at one residue.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiResult {
    pub label: RayLabel,
    pub r: u64,
    pub orbit: Vec<RayLabel>,
    /// `B⁰, ..., B^d` for each orbit member.
    pub members: Vec<(RayLabel, Vec<Rational>)>,
    /// `A_0(r), ..., A_d(r)` in k-form.
    pub coeffs: Vec<Rational>,
    /// First agreeing variant in trial order.
    pub variant: Variant,
    /// Every variant that reproduced the direct values.
    pub agreeing: Vec<Variant>,
    pub rejected: Vec<Variant>,
    pub checked_k: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Interpolating polynomial in `k`, truncated to degree `d`.
    pub coeffs: Vec<Rational>,
    /// The interpolant through all used points has degree at most `d`.
    pub consistent: bool,
    pub used: Vec<(u64, Rational)>,
    pub skipped: Vec<(u64, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleStatus {
    Ok,
    Mismatch,
    Inconsistent,
    Insufficient { usable: usize, needed: usize },
}

impl OracleStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            OracleStatus::Ok => "ok",
            OracleStatus::Mismatch => "mismatch",
            OracleStatus::Inconsistent => "inconsistent",
            OracleStatus::Insufficient { .. } => "insufficient",
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, OracleStatus::Mismatch | OracleStatus::Inconsistent)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRow {
    pub r: u64,
    pub label: RayLabel,
    pub quasi: QuasiResult,
    pub n_form: Vec<Rational>,
    /// Powers `i` with `12q²B^i ∉ Z` for some orbit member.
    pub member_bound_failures: Vec<usize>,
    pub k_bound_failures: Vec<usize>,
    pub n_bound_failures: Vec<usize>,
    pub oracle: OracleStatus,
    pub fit: Option<FitResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyReport {
    pub family: String,
    pub q: u64,
    pub degree: usize,
    pub rows: Vec<FamilyRow>,
    /// Residues with no usable sample in the search window.
    pub empty_residues: Vec<u64>,
}

impl FamilyReport {
    pub fn k_form(&self, label: RayLabel) -> QuasiPoly<Rational> {
        let mut p = QuasiPoly::new(self.q, Form::K);
        for row in self.rows.iter().filter(|row| row.label == label) {
            p.insert(row.r, row.quasi.coeffs.clone());
        }
        p
    }

    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|row| {
            !row.oracle.is_failure()
                && row.member_bound_failures.is_empty()
                && row.k_bound_failures.is_empty()
                && row.n_bound_failures.is_empty()
        })
    }
}

impl FamilyContext {
    pub fn new(spec: FamilySpec, q: u64, opts: FamilyOptions) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidInput(format!(
                "modulus must be at least 2 (no labels exist for q = {q})"
            )));
        }
        Ok(FamilyContext {
            spec: Arc::new(spec),
            q,
            opts,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn options(&self) -> &FamilyOptions {
        &self.opts
    }

    pub fn degree(&self) -> usize {
        self.spec.degree()
    }

    fn slot(&self, n: u64) -> Result<Slot> {
        if let Some(s) = self.cache.lock().expect("cache lock").get(&n) {
            return Ok(s.clone());
        }
        let slot = match self.spec.instance(n)? {
            Sample::Ready(inst) => Slot::Ready(Arc::new(inst.ray(self.q, self.opts.max_terms)?)),
            Sample::Skipped { reason, .. } => Slot::Skipped(reason),
        };
        self.cache.lock().expect("cache lock").insert(n, slot.clone());
        Ok(slot)
    }

    /// The field at `n` with this modulus, or why `n` is skipped.
    pub fn ray_at(&self, n: u64) -> Result<std::result::Result<Arc<RayContext>, String>> {
        Ok(match self.slot(n)? {
            Slot::Ready(ctx) => Ok(ctx),
            Slot::Skipped(reason) => Err(reason),
        })
    }

    fn n_of(&self, r: u64, k: u64) -> u64 {
        self.q * k + r
    }

    /// Splits `ks` into usable samples and skipped ones.
    #[allow(clippy::type_complexity)]
    fn samples(&self, r: u64, ks: &[u64]) -> Result<(Vec<(u64, Arc<RayContext>)>, Vec<(u64, String)>)> {
        let mut ready = Vec::new();
        let mut skipped = Vec::new();
        for &k in ks {
            match self.ray_at(self.n_of(r, k))? {
                Ok(ctx) => ready.push((k, ctx)),
                Err(why) => skipped.push((k, why)),
            }
        }
        Ok((ready, skipped))
    }

    /// The first `count` usable `k` at residue `r`.
    pub fn first_usable(&self, r: u64, count: usize) -> Result<Vec<(u64, Arc<RayContext>)>> {
        let mut out = Vec::new();
        for k in 0..=self.opts.k_search {
            if out.len() == count {
                break;
            }
            if let Ok(ctx) = self.ray_at(self.n_of(r, k))? {
                out.push((k, ctx));
            }
        }
        Ok(out)
    }

    fn check_residue(&self, r: u64) -> Result<()> {
        if r >= self.q {
            return Err(Error::InvalidInput(format!(
                "residue {r} out of range for modulus {}",
                self.q
            )));
        }
        Ok(())
    }

    /// `F_δ` for the class `n ≡ r`, read off the first usable sample.
    pub fn labels_at(&self, r: u64) -> Result<Vec<RayLabel>> {
        self.check_residue(r)?;
        match self.first_usable(r, 1)?.first() {
            Some((_, ctx)) => ctx.f_delta(),
            None => Ok(Vec::new()),
        }
    }

    /// Whether `N((C + Dδ(qk + r))𝔟) mod q` is the same for all usable `k`
    /// in `ks`.
    pub fn norm_invariance_check(&self, label: RayLabel, r: u64, ks: &[u64]) -> Result<bool> {
        self.check_residue(r)?;
        let (ready, _) = self.samples(r, ks)?;
        let mut seen: Option<u64> = None;
        for (_, ctx) in ready {
            let v = norm_residue(ctx.field(), label, self.q)?;
            match seen {
                None => seen = Some(v),
                Some(prev) if prev != v => return Ok(false),
                Some(_) => {}
            }
        }
        Ok(true)
    }

    /// Norm invariance for every nonzero label on the configured `k` values.
    pub fn check_hypotheses(&self, r: u64) -> Result<()> {
        self.check_residue(r)?;
        let ks = self.opts.k_values.clone();
        for c in 0..self.q {
            for d in 0..self.q {
                if c == 0 && d == 0 {
                    continue;
                }
                let label = RayLabel { c, d };
                if !self.norm_invariance_check(label, r, &ks)? {
                    let (ready, _) = self.samples(r, &ks)?;
                    let residues: Vec<String> = ready
                        .iter()
                        .map(|(k, ctx)| {
                            let v = norm_residue(ctx.field(), label, self.q)
                                .map(|v| v.to_string())
                                .unwrap_or_else(|e| e.to_string());
                            format!("n={}: {v}", self.n_of(r, *k))
                        })
                        .collect();
                    return Err(Error::Hypothesis(format!(
                        "family {}: N((C+Dδ)𝔟) mod {} is not constant on n ≡ {r} for label {label} ({})",
                        self.spec.name,
                        self.q,
                        residues.join(", ")
                    )));
                }
            }
        }
        Ok(())
    }

    /// Closed-form k-form coefficients of `ζ_q(0, (C + Dδ(n))𝔟_n)` on
    /// `n = qk + r`, verified member by member against direct evaluation at
    /// `max(d + 1, 2)` usable `k`.
    pub fn quasi_poly(&self, label: RayLabel, r: u64) -> Result<QuasiResult> {
        self.check_hypotheses(r)?;
        let d = self.degree();
        let need = (d + 1).max(2);
        let checks = self.first_usable(r, need)?;
        if checks.len() < need {
            return Err(Error::InvalidInput(format!(
                "family {}: only {} usable n ≡ {r} (mod {}) with k ≤ {}, need {need}",
                self.spec.name,
                checks.len(),
                self.q,
                self.opts.k_search
            )));
        }
        let first = &checks[0].1;
        if !first.is_coprime(label)? {
            return Err(Error::LabelNotCoprime {
                c: label.c,
                d: label.d,
                q: self.q,
            });
        }
        let data = ResidueData::new(&self.spec, self.q, r);
        let orbit = data.orbit(label)?;
        for (k, ctx) in &checks {
            let direct = ctx.orbit(label)?;
            if direct.members != orbit {
                return Err(Error::Verification(format!(
                    "orbit of {label} at n = {}: residue data gives {:?}, the field gives {:?}",
                    self.n_of(r, *k),
                    orbit,
                    direct.members
                )));
            }
        }
        let direct: Vec<Vec<Rational>> = checks
            .iter()
            .map(|(_, ctx)| orbit.iter().map(|&m| ctx.period_sum(m)).collect())
            .collect();

        let mut chosen = None;
        let mut agreeing = Vec::new();
        let mut rejected = Vec::new();
        for v in VARIANTS {
            let members: Vec<(RayLabel, Vec<Rational>)> = orbit
                .iter()
                .map(|&m| (m, coeffs_closed(&self.spec, &data, m, v)))
                .collect();
            let matches = checks.iter().zip(&direct).all(|((k, _), vals)| {
                members
                    .iter()
                    .zip(vals)
                    .all(|((_, cs), val)| eval_poly(cs, &int(*k)) == *val)
            });
            if matches {
                agreeing.push(v);
                chosen.get_or_insert((v, members));
            } else {
                rejected.push(v);
            }
        }
        let Some((variant, members)) = chosen else {
            let (k0, _) = checks[0];
            let closed: Vec<String> = orbit
                .iter()
                .map(|&m| eval_poly(&coeffs_closed(&self.spec, &data, m, CORRECT_VARIANT), &int(k0)).to_string())
                .collect();
            let vals: Vec<String> = direct[0].iter().map(|v| v.to_string()).collect();
            return Err(Error::Verification(format!(
                "no closed-form variant matches direct evaluation for {label} at n = {}: closed [{}], direct [{}]",
                self.n_of(r, k0),
                closed.join(", "),
                vals.join(", ")
            )));
        };
        let mut coeffs = vec![Rational::zero(); d + 1];
        for (_, cs) in &members {
            for (acc, c) in coeffs.iter_mut().zip(cs) {
                *acc += c;
            }
        }
        for (k, ctx) in &checks {
            let z = ctx.partial_zeta0(label)?;
            let e = eval_poly(&coeffs, &int(*k));
            if z != e {
                return Err(Error::Verification(format!(
                    "closed form for {label} at n = {} gives {e}, direct value {z}",
                    self.n_of(r, *k)
                )));
            }
        }
        Ok(QuasiResult {
            label,
            r,
            orbit,
            members,
            coeffs,
            variant,
            agreeing,
            rejected,
            checked_k: checks.iter().map(|(k, _)| *k).collect(),
        })
    }

    /// Exact interpolation of direct values `ζ_q(0, ·)` at `n = qk + r`.
    pub fn fit_oracle(&self, label: RayLabel, r: u64, ks: &[u64]) -> Result<FitResult> {
        self.check_residue(r)?;
        let d = self.degree();
        let (ready, skipped) = self.samples(r, ks)?;
        if ready.len() < d + 2 {
            return Err(Error::InvalidInput(format!(
                "fit for {label} at r = {r}: {} usable samples, need {}",
                ready.len(),
                d + 2
            )));
        }
        let used: Vec<(u64, Rational)> = ready
            .par_iter()
            .map(|(k, ctx)| ctx.partial_zeta0(label).map(|z| (*k, z)))
            .collect::<Result<_>>()?;
        let pts: Vec<(Rational, Rational)> = used.iter().map(|(k, z)| (int(*k), z.clone())).collect();
        let mut coeffs = interpolate(&pts);
        let consistent = coeffs.iter().skip(d + 1).all(Zero::is_zero);
        coeffs.truncate(d + 1);
        coeffs.resize(d + 1, Rational::zero());
        Ok(FitResult {
            coeffs,
            consistent,
            used,
            skipped,
        })
    }

    fn row(&self, r: u64, label: RayLabel) -> Result<FamilyRow> {
        let quasi = self.quasi_poly(label, r)?;
        let d = self.degree();
        let twelve_q2 = BigInt::from(12) * BigInt::from(self.q).pow(2);
        let integral = |x: &Rational| (x * int(twelve_q2.clone())).is_integer();
        let mut member_bound_failures: Vec<usize> = quasi
            .members
            .iter()
            .flat_map(|(_, cs)| cs.iter().enumerate().filter(|(_, c)| !integral(c)).map(|(i, _)| i))
            .collect();
        member_bound_failures.sort_unstable();
        member_bound_failures.dedup();
        let mut single = QuasiPoly::new(self.q, Form::K);
        single.insert(r, quasi.coeffs.clone());
        let n_form = single.to_n_form().row(r).expect("row just inserted").to_vec();
        let k_bound_failures = single.k_form_denominator_failures().into_iter().map(|(_, i)| i).collect();
        let n_bound_failures = single.n_form_denominator_failures().into_iter().map(|(_, i)| i).collect();
        let (fit, oracle) = match self.fit_oracle(label, r, &self.opts.k_values) {
            Ok(fit) => {
                let status = if !fit.consistent {
                    OracleStatus::Inconsistent
                } else if fit.coeffs != quasi.coeffs {
                    OracleStatus::Mismatch
                } else {
                    OracleStatus::Ok
                };
                (Some(fit), status)
            }
            Err(Error::InvalidInput(_)) => {
                let (ready, _) = self.samples(r, &self.opts.k_values)?;
                (
                    None,
                    OracleStatus::Insufficient {
                        usable: ready.len(),
                        needed: d + 2,
                    },
                )
            }
            Err(e) => return Err(e),
        };
        Ok(FamilyRow {
            r,
            label,
            quasi,
            n_form,
            member_bound_failures,
            k_bound_failures,
            n_bound_failures,
            oracle,
            fit,
        })
    }

    /// One row per residue and label, in `(r, C, D)` order.
    pub fn report(&self) -> Result<FamilyReport> {
        let mut jobs = Vec::new();
        let mut empty_residues = Vec::new();
        for r in 0..self.q {
            let labels = self.labels_at(r)?;
            if labels.is_empty() {
                empty_residues.push(r);
                continue;
            }
            self.check_hypotheses(r)?;
            jobs.extend(labels.into_iter().map(|l| (r, l)));
        }
        let rows = jobs
            .par_iter()
            .map(|&(r, l)| self.row(r, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(FamilyReport {
            family: self.spec.name.clone(),
            q: self.q,
            degree: self.degree(),
            rows,
            empty_residues,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    fn ctx(name: &str, q: u64) -> FamilyContext {
        FamilyContext::new(FamilySpec::preset(name).unwrap(), q, FamilyOptions::default()).unwrap()
    }

    #[test]
    fn anchor_value() {
        let fc = ctx("rd-n2p2", 2);
        let res = fc.quasi_poly(RayLabel { c: 1, d: 0 }, 1).unwrap();
        assert_eq!(eval_poly(&res.coeffs, &int(0)), rat(1, 6));
        assert!(res.agreeing.contains(&CORRECT_VARIANT));
        assert_eq!(res.orbit, vec![RayLabel { c: 1, d: 0 }, RayLabel { c: 0, d: 1 }]);
    }

    #[test]
    fn fit_matches_closed_form() {
        let fc = ctx("rd-n2p2", 2);
        let label = RayLabel { c: 1, d: 0 };
        let fit = fc.fit_oracle(label, 1, &[0, 1, 2, 3]).unwrap();
        assert!(fit.consistent);
        // n = 5 is skipped.
        assert_eq!(fit.skipped.len(), 1);
        assert!(fc.fit_oracle(label, 1, &[0, 2]).is_err());
        let res = fc.quasi_poly(label, 1).unwrap();
        let fit = fc.fit_oracle(label, 1, &[0, 1, 3, 4]).unwrap();
        assert_eq!(fit.coeffs, res.coeffs);
    }

    #[test]
    fn report_is_clean() {
        for (name, q) in [("rd-n2p2", 2), ("rd-n2p2", 3), ("quartic-16n4", 2)] {
            let rep = ctx(name, q).report().unwrap();
            assert!(rep.all_ok(), "{name} q={q}: {rep:?}");
            assert!(!rep.rows.is_empty());
            assert!(rep.rows.iter().all(|row| row.quasi.agreeing.contains(&CORRECT_VARIANT)));
        }
    }

    #[test]
    fn labels_out_of_range() {
        let fc = ctx("rd-n2p2", 3);
        assert!(fc.labels_at(3).is_err());
        assert!(FamilyContext::new(FamilySpec::preset("rd-n2p2").unwrap(), 1, FamilyOptions::default()).is_err());
    }
}
