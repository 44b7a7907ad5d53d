//! Residue-class machinery against the two preset families: closed-form
//! tables, the bridge to the recursion on actual fields, and the shape of
//! the top coefficient.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayzeta_core::exactmath::{bernoulli2, frac_unit, int, rat, residue_one, Rational};
use rayzeta_core::family::{
    coeffs_closed, FamilyContext, FamilyOptions, FamilySpec, ResidueData, Sample, CORRECT_VARIANT,
};
use rayzeta_core::shintani::{yamamoto_xy, RayLabel};

fn labels(q: u64) -> impl Iterator<Item = RayLabel> {
    (0..q).flat_map(move |c| (0..q).map(move |d| RayLabel { c, d })).filter(|l| l.c != 0 || l.d != 0)
}

/// `⟨v⟩_q / q` for an integer expression `v`.
fn nu_of(v: i64, q: u64) -> Rational {
    frac_unit(&rat(v, q as i64))
}

#[test]
fn first_family_tables() {
    let spec = FamilySpec::preset("rd-n2p2").unwrap();
    for q in [2u64, 3, 5] {
        for r in 0..q {
            let data = ResidueData::new(&spec, q, r);
            let g1 = data.big_gamma[1] as i64;
            let ri = r as i64;
            let gamma1 = residue_one(&BigInt::from(r), q);
            assert_eq!(data.gamma[1], gamma1);
            assert_eq!(data.tau[1], BigInt::from((ri - gamma1 as i64) / q as i64));
            for l in labels(q) {
                let (a, b) = (l.c as i64, l.d as i64);
                let nu = data.nu_full(l);
                assert_eq!(nu.at(0), &nu_of(b, q));
                assert_eq!(data.d(&nu, 0), nu_of((2 * ri + 1) * b + a, q), "q={q} r={r} {l}");
                assert_eq!(nu.at(g1), &nu_of((2 * ri * ri + ri + 1) * b + ri * a, q), "q={q} r={r} {l}");
                assert_eq!(nu.at(g1 - 1), &nu_of((ri - 1) * a + (2 * ri * ri - ri) * b, q));
                // The printed expression for ν^{Γ_1} is the value one step earlier.
                assert_eq!(nu.at(g1 - 1), &nu_of((2 * ri * ri - ri) * b + (ri - 1) * a, q));
            }
        }
    }
}

#[test]
fn first_family_printed_gamma_differs() {
    let spec = FamilySpec::preset("rd-n2p2").unwrap();
    let data = ResidueData::new(&spec, 5, 1);
    // a_1(1) = 1, while ⟨2r + 1⟩_5 = 3.
    assert_eq!(data.gamma[1], 1);
    assert_ne!(data.gamma[1], residue_one(&BigInt::from(3), 5));
}

#[test]
fn second_family_tables() {
    let spec = FamilySpec::preset("quartic-16n4").unwrap();
    for q in [2u64, 3, 5] {
        for r in 0..q {
            let data = ResidueData::new(&spec, q, r);
            let g1 = data.big_gamma[1] as i64;
            let ri = r as i64;
            assert_eq!(data.gamma[1], residue_one(&BigInt::from(2 * r + 1), q));
            for l in labels(q) {
                let (a, b) = (l.c as i64, l.d as i64);
                let nu = data.nu_full(l);
                assert_eq!(nu.at(0), &nu_of(b, q));
                assert_eq!(data.d(&nu, 0), nu_of((8 * ri * ri + 8 * ri + 3) * b + a, q));
                let top = 16 * ri.pow(3) + 24 * ri * ri + 14 * ri + 4;
                assert_eq!(nu.at(g1), &nu_of(top * b + (2 * ri + 1) * a, q), "q={q} r={r} {l}");
                let prev = 16 * ri.pow(3) + 16 * ri * ri + 6 * ri + 1;
                assert_eq!(nu.at(g1 - 1), &nu_of(2 * ri * a + prev * b, q), "q={q} r={r} {l}");
            }
        }
    }
}

#[test]
fn second_family_top_coefficient() {
    let spec = FamilySpec::preset("quartic-16n4").unwrap();
    for q in [2u64, 3, 5] {
        for r in 0..q {
            let data = ResidueData::new(&spec, q, r);
            let g1 = data.big_gamma[1] as i64;
            for l in labels(q) {
                let nu = data.nu_full(l);
                let b = coeffs_closed(&spec, &data, l, CORRECT_VARIANT);
                let qq = int(q);
                let b2 = bernoulli2(nu.at(g1));
                assert_eq!(b[2], int(4) * &qq * &qq * &b2);
                // The printed (2q³/3)(6ν² - 6ν + 1) carries one extra factor q.
                let x = nu.at(g1);
                let printed = int(2) * &qq * &qq * &qq / int(3) * (int(6) * x * x - int(6) * x + int(1));
                assert_eq!(printed, &b[2] * &qq);
            }
        }
    }
}

/// `x_{S_j(n) + i}(n) = ν^{Γ_j(r) + i}(r)` for `0 ≤ i ≤ γ_{2j+1}(r)`.
#[test]
fn residue_sequence_matches_fields() {
    for name in ["rd-n2p2", "quartic-16n4"] {
        let spec = FamilySpec::preset(name).unwrap();
        for q in [2u64, 3, 5] {
            for n in spec.n_min..=9 {
                let Sample::Ready(inst) = spec.instance(n).unwrap() else { continue };
                let r = n % q;
                let data = ResidueData::new(&spec, q, r);
                let minus = inst.field.minus_cf();
                let ctx = inst.ray(q, 1_000_000).unwrap();
                for l in ctx.f_delta().unwrap() {
                    let len = 2 * minus.period();
                    let x = yamamoto_xy(l, q, minus, len);
                    let nu = data.nu(l, 2 * data.big_gamma[data.pairs] + 2);
                    for j in 0..=data.pairs {
                        let s_j = inst.cf.s_index(j).to_usize().unwrap();
                        let g_j = data.big_gamma[j] as i64;
                        for i in 0..=data.gamma_at(2 * j + 1) {
                            assert_eq!(
                                &x.xs[s_j + i as usize],
                                nu.at(g_j + i as i64),
                                "{name} n={n} q={q} {l} j={j} i={i}"
                            );
                        }
                    }
                }
            }
        }
    }
}

/// `x_{S_j + q + i} = x_{S_j + i}` for `0 ≤ i ≤ a_{2j+1}(n) - q`.
#[test]
fn runs_of_twos_are_periodic() {
    let spec = FamilySpec::preset("rd-n2p2").unwrap();
    for q in [2u64, 3] {
        for n in [6u64, 7, 10, 11] {
            let Sample::Ready(inst) = spec.instance(n).unwrap() else { continue };
            let minus = inst.field.minus_cf();
            let ctx = inst.ray(q, 1_000_000).unwrap();
            let a1 = n as usize;
            assert!(a1 >= q as usize);
            for l in ctx.f_delta().unwrap() {
                let x = yamamoto_xy(l, q, minus, minus.period()).xs;
                for i in 0..=a1 - q as usize {
                    assert_eq!(x[q as usize + i], x[i], "n={n} q={q} {l} i={i}");
                }
            }
        }
    }
}

#[test]
fn orbits_repeat_with_period_q() {
    for name in ["rd-n2p2", "quartic-16n4"] {
        let spec = FamilySpec::preset(name).unwrap();
        for q in [2u64, 3, 5] {
            let fc = FamilyContext::new(spec.clone(), q, FamilyOptions::default()).unwrap();
            for r in 0..q {
                let data = ResidueData::new(&spec, q, r);
                for l in fc.labels_at(r).unwrap() {
                    let orbit = data.orbit(l).unwrap();
                    for (_, ctx) in fc.first_usable(r, 3).unwrap() {
                        assert_eq!(ctx.orbit(l).unwrap().members, orbit, "{name} q={q} r={r} {l}");
                    }
                }
            }
        }
    }
}

#[test]
fn quartic_q3_has_degree_two_rows() {
    let fc = FamilyContext::new(FamilySpec::preset("quartic-16n4").unwrap(), 3, FamilyOptions::default()).unwrap();
    let rep = fc.report().unwrap();
    assert!(rep.all_ok());
    assert!(rep.rows.iter().all(|row| row.quasi.coeffs.len() == 3));
    assert!(rep.rows.iter().any(|row| row.quasi.coeffs[2] != int(0)));
    // Four points over-determine degree two.
    let row = &rep.rows[0];
    let fit = fc.fit_oracle(row.label, row.r, &[0, 1, 2, 3]).unwrap();
    assert!(fit.consistent);
    assert_eq!(fit.coeffs, row.quasi.coeffs);
}

#[test]
fn constant_family_is_degree_zero() {
    use rayzeta_core::family::Poly;
    // δ - 1 = [[3, 1]] for every n: the field Q(√21) at each n.
    let spec = FamilySpec::new("const", Poly::from_i64(&[21]), vec![Poly::from_i64(&[3]), Poly::from_i64(&[1])], 0, Some(20))
        .unwrap();
    let Sample::Ready(_) = spec.instance(0).unwrap() else { panic!() };
    let fc = FamilyContext::new(spec, 2, FamilyOptions::default()).unwrap();
    let rep = fc.report().unwrap();
    assert!(rep.all_ok());
    for row in &rep.rows {
        assert_eq!(row.quasi.coeffs.len(), 1);
        let fit = row.fit.as_ref().unwrap();
        assert!(fit.consistent);
        assert!(fit.used.iter().all(|(_, z)| *z == row.quasi.coeffs[0]));
    }
}
