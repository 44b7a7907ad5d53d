//! The four subcommands. Each returns a JSON document, a flat table and an
//! exit code; rendering is left to the caller.

use std::sync::Arc;

use num_bigint::BigInt;
use rayzeta_core::exactmath::rat_string;
use rayzeta_core::family::{FamilyContext, FamilyOptions, FamilyReport, FamilySpec, Poly, QuasiPoly, Sample};
use rayzeta_core::hecke::{hecke_l0_family, CharSpan, DirichletChar};
use rayzeta_core::shintani::{FieldData, RayContext, RayLabel};
use rayzeta_core::verify::{self, VerifyOptions};
use rayzeta_core::{ErrorKind, Rational};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{kind_code, CliError, EXIT_OK, EXIT_VERIFICATION};

pub struct Output {
    pub json: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub code: i32,
}

fn rats(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(rat_string).collect()
}

fn label_json(l: RayLabel) -> Value {
    json!([l.c, l.d])
}

fn labels_json(ls: &[RayLabel]) -> Value {
    Value::Array(ls.iter().map(|&l| label_json(l)).collect())
}

fn labels_text(ls: &[RayLabel]) -> String {
    ls.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn family_spec(cfg: &RunConfig) -> Result<FamilySpec, CliError> {
    match (&cfg.preset, &cfg.f_poly, &cfg.a_polys) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => Err(CliError::Config(
            "give either a preset or an inline family (f_poly and a_polys), not both".into(),
        )),
        (Some(name), None, None) => Ok(FamilySpec::preset(name)?),
        (None, Some(f), Some(a)) => {
            let f: Poly = f.parse()?;
            let a = a.iter().map(|p| p.parse()).collect::<Result<Vec<Poly>, _>>()?;
            Ok(FamilySpec::new("inline", f, a, cfg.n_min.unwrap_or(0), None)?)
        }
        (None, Some(_), None) | (None, None, Some(_)) => Err(CliError::Config(
            "an inline family needs both f_poly and a_polys".into(),
        )),
        (None, None, None) => Err(CliError::Config(
            "no family given (use --preset or --f-poly with --a-polys)".into(),
        )),
    }
}

fn family_json(spec: &FamilySpec) -> Value {
    json!({
        "name": spec.name,
        "f_poly": spec.f.to_string(),
        "a_polys": spec.a.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "n_min": spec.n_min,
    })
}

fn selected_labels(cfg: &RunConfig, ctx: &RayContext) -> Result<Vec<RayLabel>, CliError> {
    match cfg.label {
        Some([c, d]) => Ok(vec![ctx.label(c, d)?]),
        None => Ok(ctx.f_delta()?),
    }
}

pub fn zeta(cfg: &RunConfig) -> Result<Output, CliError> {
    let q = cfg.single_q()?;
    let max_terms = cfg.max_terms()?;
    let mut fields: Vec<(Option<u64>, Arc<FieldData>)> = Vec::new();
    let mut skipped = Vec::new();
    let mut family = Value::Null;
    if let Some(radicand) = &cfg.radicand {
        if cfg.preset.is_some() || cfg.f_poly.is_some() {
            return Err(CliError::Config("give either a radicand or a family, not both".into()));
        }
        let d: BigInt = radicand
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("radicand {radicand:?} is not an integer")))?;
        fields.push((None, Arc::new(FieldData::maximal_order(d)?)));
    } else {
        let spec = family_spec(cfg)?;
        family = family_json(&spec);
        let ns = cfg
            .n
            .as_ref()
            .ok_or_else(|| CliError::Config("--n is required with a family".into()))?
            .expand()?;
        for n in ns {
            match spec.instance(n)? {
                Sample::Ready(inst) => fields.push((Some(n), inst.field.clone())),
                Sample::Skipped { n, reason } => {
                    eprintln!("warning: skipping n = {n}: {reason}");
                    skipped.push(json!({"n": n, "reason": reason}));
                }
            }
        }
    }
    let mut instances = Vec::new();
    let mut rows = Vec::new();
    for (n, field) in fields {
        let ctx = RayContext::new(field.clone(), q)?.with_max_terms(max_terms);
        let mut out_rows = Vec::new();
        for label in selected_labels(cfg, &ctx)? {
            let z = ctx.partial_zeta0(label)?;
            let orbit = ctx.orbit(label)?;
            out_rows.push(json!({
                "label": label_json(label),
                "value": rat_string(&z),
                "orbit": labels_json(&orbit.members),
            }));
            rows.push(vec![
                n.map(|n| n.to_string()).unwrap_or_default(),
                field.basis().field().radicand().to_string(),
                q.to_string(),
                ctx.lambda().to_string(),
                field.period().to_string(),
                label.c.to_string(),
                label.d.to_string(),
                rat_string(&z),
                labels_text(&orbit.members),
            ]);
        }
        instances.push(json!({
            "n": n,
            "radicand": field.basis().field().radicand().to_string(),
            "delta": field.delta().to_string(),
            "ideal_norm": field.ideal_norm().to_string(),
            "eps": field.eps().to_string(),
            "minus_cf": field.minus_cf().terms().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "m": field.period(),
            "lambda": ctx.lambda(),
            "rows": out_rows,
        }));
    }
    Ok(Output {
        json: json!({
            "command": "zeta",
            "q": q,
            "family": family,
            "instances": instances,
            "skipped": skipped.len(),
            "skipped_n": skipped,
        }),
        columns: vec!["n", "radicand", "q", "lambda", "m", "C", "D", "value", "orbit"],
        rows,
        code: EXIT_OK,
    })
}

fn family_options(cfg: &RunConfig) -> Result<FamilyOptions, CliError> {
    let mut opts = FamilyOptions {
        max_terms: cfg.max_terms()?,
        ..FamilyOptions::default()
    };
    if let Some([lo, hi]) = cfg.k_range {
        opts.k_values = (lo..=hi).collect();
        opts.k_search = opts.k_search.max(hi);
    }
    Ok(opts)
}

/// A structured report for a refused family, or the error itself.
fn refusal(cmd: &str, spec: &FamilySpec, q: u64, e: rayzeta_core::Error) -> Result<Output, CliError> {
    if e.kind() != ErrorKind::Hypothesis {
        return Err(e.into());
    }
    let msg = e.to_string();
    eprintln!("error: {msg}");
    Ok(Output {
        json: json!({
            "command": cmd,
            "family": family_json(spec),
            "q": q,
            "status": "hypothesis_violated",
            "error": msg,
            "rows": [],
        }),
        columns: vec!["status", "error"],
        rows: vec![vec!["hypothesis_violated".into(), msg]],
        code: kind_code(ErrorKind::Hypothesis),
    })
}

fn family_rows(rep: &FamilyReport, filter: Option<[u64; 2]>) -> (Vec<Value>, Vec<Vec<String>>) {
    let mut json_rows = Vec::new();
    let mut table = Vec::new();
    for row in &rep.rows {
        if filter.is_some_and(|[c, d]| row.label != RayLabel { c, d }) {
            continue;
        }
        let fit = row.fit.as_ref();
        json_rows.push(json!({
            "r": row.r,
            "label": label_json(row.label),
            "orbit": labels_json(&row.quasi.orbit),
            "k_form": rats(&row.quasi.coeffs),
            "n_form": rats(&row.n_form),
            "members": row.quasi.members.iter().map(|(l, cs)| json!({"label": label_json(*l), "coeffs": rats(cs)})).collect::<Vec<_>>(),
            "variant": row.quasi.variant.name(),
            "agreeing_variants": row.quasi.agreeing.iter().map(|v| v.name()).collect::<Vec<_>>(),
            "checked_k": row.quasi.checked_k,
            "bounds": {
                "members_12q2": row.member_bound_failures.is_empty(),
                "k_form_12q2": row.k_bound_failures.is_empty(),
                "n_form_12q_i_plus_2": row.n_bound_failures.is_empty(),
            },
            "oracle": row.oracle.as_str(),
            "fit": fit.map(|f| rats(&f.coeffs)),
            "fit_k": fit.map(|f| f.used.iter().map(|(k, _)| *k).collect::<Vec<_>>()),
            "skipped_k": fit.map(|f| f.skipped.iter().map(|(k, why)| json!({"k": k, "reason": why})).collect::<Vec<_>>()),
        }));
        let bounds_ok = row.member_bound_failures.is_empty()
            && row.k_bound_failures.is_empty()
            && row.n_bound_failures.is_empty();
        for (i, (a, c)) in row.quasi.coeffs.iter().zip(&row.n_form).enumerate() {
            table.push(vec![
                row.r.to_string(),
                row.label.c.to_string(),
                row.label.d.to_string(),
                i.to_string(),
                rat_string(a),
                rat_string(c),
                bounds_ok.to_string(),
                row.oracle.as_str().to_string(),
                labels_text(&row.quasi.orbit),
            ]);
        }
    }
    (json_rows, table)
}

pub fn family(cfg: &RunConfig) -> Result<Output, CliError> {
    let q = cfg.single_q()?;
    let spec = family_spec(cfg)?;
    let opts = family_options(cfg)?;
    let k_range = [opts.k_values.first().copied(), opts.k_values.last().copied()];
    let fc = FamilyContext::new(spec.clone(), q, opts)?;
    let rep = match fc.report() {
        Ok(rep) => rep,
        Err(e) => return refusal("family", &spec, q, e),
    };
    let (rows_json, rows) = family_rows(&rep, cfg.label);
    let ok = rep.all_ok();
    Ok(Output {
        json: json!({
            "command": "family",
            "family": family_json(&spec),
            "q": q,
            "degree": rep.degree,
            "k_range": k_range,
            "empty_residues": rep.empty_residues,
            "status": if ok { "ok" } else { "check_failed" },
            "rows": rows_json,
        }),
        columns: vec!["r", "C", "D", "power", "k_form", "n_form", "bounds_ok", "oracle", "orbit"],
        rows,
        code: if ok { EXIT_OK } else { EXIT_VERIFICATION },
    })
}

fn span_json(x: &CharSpan) -> Value {
    let map: serde_json::Map<String, Value> = x
        .terms()
        .iter()
        .map(|(a, c)| (format!("chi({a})"), Value::String(rat_string(c))))
        .collect();
    Value::Object(map)
}

fn character(cfg: &RunConfig, q: u64) -> Result<DirichletChar, CliError> {
    match &cfg.character {
        None => Ok(DirichletChar::trivial(q)?),
        Some(c) => {
            if c.modulus != q {
                return Err(CliError::Config(format!(
                    "character modulus {} differs from q = {q}",
                    c.modulus
                )));
            }
            if c.generators.is_empty() && c.order == 1 {
                return Ok(DirichletChar::trivial(q)?);
            }
            Ok(DirichletChar::from_generators(c.modulus, c.order, &c.generators)?)
        }
    }
}

pub fn lfunc(cfg: &RunConfig) -> Result<Output, CliError> {
    let q = cfg.single_q()?;
    let spec = family_spec(cfg)?;
    let chi = character(cfg, q)?;
    let digits = cfg.digits.unwrap_or(6);
    let fc = FamilyContext::new(spec.clone(), q, family_options(cfg)?)?;
    let fam = match hecke_l0_family(&fc, &chi) {
        Ok(f) => f,
        Err(e) => return refusal("lfunc", &spec, q, e),
    };
    let n_poly: QuasiPoly<CharSpan> = fam.poly.to_n_form();
    let bounds_ok = n_poly.n_form_denominator_failures().is_empty();
    let mut rows_json = Vec::new();
    let mut rows = Vec::new();
    for ((r, k_row), (_, n_row)) in fam.poly.rows().zip(n_poly.rows()) {
        let reps = fam
            .representatives
            .iter()
            .find(|(rr, _)| *rr == r)
            .map(|(_, l)| l.clone())
            .unwrap_or_default();
        rows_json.push(json!({
            "r": r,
            "representatives": labels_json(&reps),
            "k_form": k_row.iter().map(span_json).collect::<Vec<_>>(),
            "n_form": n_row.iter().map(span_json).collect::<Vec<_>>(),
            "k_form_approx": k_row.iter().map(|x| json!({"approx": x.render_complex(&chi, digits)})).collect::<Vec<_>>(),
        }));
        for (form, row) in [("k", k_row), ("n", n_row)] {
            for (i, x) in row.iter().enumerate() {
                for (a, c) in x.terms() {
                    rows.push(vec![
                        r.to_string(),
                        form.to_string(),
                        i.to_string(),
                        format!("chi({a})"),
                        rat_string(c),
                    ]);
                }
            }
        }
    }
    let values: serde_json::Map<String, Value> = (0..q)
        .filter_map(|a| chi.exponent(a).map(|e| (a.to_string(), json!(e))))
        .collect();
    Ok(Output {
        json: json!({
            "command": "lfunc",
            "family": family_json(&spec),
            "q": q,
            "character": {"modulus": chi.modulus(), "order": chi.order(), "exponents": values},
            "degree": fc.degree(),
            "n_form_bounds_ok": bounds_ok,
            "checked": fam.checked.iter().map(|(n, v)| json!({"n": n, "value": span_json(v)})).collect::<Vec<_>>(),
            "rows": rows_json,
            "status": if bounds_ok { "ok" } else { "check_failed" },
        }),
        columns: vec!["r", "form", "power", "symbol", "coeff"],
        rows,
        code: if bounds_ok { EXIT_OK } else { EXIT_VERIFICATION },
    })
}

pub fn verify_cmd(cfg: &RunConfig) -> Result<Output, CliError> {
    let mut opts = VerifyOptions {
        max_terms: cfg.max_terms()?,
        n_max: cfg.n_max,
        ..VerifyOptions::default()
    };
    if let Some(qs) = &cfg.q {
        if qs.iter().any(|&q| q < 2) {
            return Err(CliError::Config("every modulus must be at least 2".into()));
        }
        opts.qs = qs.clone();
    }
    let reports = verify::run(&opts, cfg.criterion.as_deref())?;
    let passed = reports.iter().all(|r| r.passed);
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.id.clone(),
                if r.passed { "pass" } else { "fail" }.to_string(),
                r.checks.to_string(),
                r.failure_count.to_string(),
                r.millis.to_string(),
                r.title.clone(),
            ]
        })
        .collect();
    for r in &reports {
        eprintln!("{} {} ({} checks, {} failures)", r.id, if r.passed { "PASS" } else { "FAIL" }, r.checks, r.failure_count);
    }
    Ok(Output {
        json: json!({
            "command": "verify",
            "qs": opts.qs,
            "n_max": opts.n_max,
            "passed": passed,
            "criteria": reports.iter().map(|r| json!({
                "id": r.id,
                "title": r.title,
                "passed": r.passed,
                "checks": r.checks,
                "failure_count": r.failure_count,
                "failures": r.failures,
                "notes": r.notes,
                "millis": r.millis,
            })).collect::<Vec<_>>(),
        }),
        columns: vec!["id", "status", "checks", "failures", "millis", "title"],
        rows,
        code: if passed { EXIT_OK } else { EXIT_VERIFICATION },
    })
}
