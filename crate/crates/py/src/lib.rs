//! Python bindings. Rationals cross the boundary as `fractions.Fraction`,
//! labels as `(C, D)` tuples.

use std::sync::Arc;

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use rayzeta_core::family::{FamilyContext, FamilyOptions, FamilySpec, Poly, Sample};
use rayzeta_core::hecke::{hecke_l0, hecke_l0_family, CharSpan, DirichletChar};
use rayzeta_core::shintani::{FieldData, RayLabel, DEFAULT_MAX_TERMS};
use rayzeta_core::verify::{self, VerifyOptions};
use rayzeta_core::{Error, ErrorKind, Rational};

create_exception!(rayzeta, HypothesisError, PyException);
create_exception!(rayzeta, VerificationError, PyException);

fn py_err(e: Error) -> PyErr {
    match e.kind() {
        ErrorKind::Config => PyValueError::new_err(e.to_string()),
        ErrorKind::Hypothesis => HypothesisError::new_err(e.to_string()),
        ErrorKind::Verification => VerificationError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, x: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((x.numer().clone(), x.denom().clone()))
}

fn fractions<'py>(py: Python<'py>, xs: &[Rational]) -> PyResult<Bound<'py, PyList>> {
    let items = xs.iter().map(|x| fraction(py, x)).collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

fn span<'py>(py: Python<'py>, x: &CharSpan) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (a, c) in x.terms() {
        d.set_item(*a, fraction(py, c)?)?;
    }
    Ok(d)
}

fn tuples(ls: &[RayLabel]) -> Vec<(u64, u64)> {
    ls.iter().map(|l| (l.c, l.d)).collect()
}

/// The maximal order of `Q(√radicand)`, or the order with basis `1, δ` of a
/// family member.
#[pyclass(frozen, module = "rayzeta")]
struct Field {
    inner: Arc<FieldData>,
}

#[pymethods]
impl Field {
    #[new]
    fn new(radicand: BigInt) -> PyResult<Self> {
        Ok(Field {
            inner: Arc::new(FieldData::maximal_order(radicand).map_err(py_err)?),
        })
    }

    #[getter]
    fn radicand(&self) -> BigInt {
        self.inner.basis().field().radicand().clone()
    }

    #[getter]
    fn delta(&self) -> String {
        self.inner.delta().to_string()
    }

    #[getter]
    fn eps(&self) -> String {
        self.inner.eps().to_string()
    }

    #[getter]
    fn minus_cf(&self) -> Vec<BigInt> {
        self.inner.minus_cf().terms().to_vec()
    }

    #[getter]
    fn period(&self) -> usize {
        self.inner.period()
    }

    /// Partial zeta values at `s = 0` of the ray classes modulo `q`, keyed by label.
    #[pyo3(signature = (q, max_terms = DEFAULT_MAX_TERMS))]
    fn zeta_table<'py>(&self, py: Python<'py>, q: u64, max_terms: u64) -> PyResult<Bound<'py, PyDict>> {
        let ctx = rayzeta_core::shintani::RayContext::new(self.inner.clone(), q)
            .map_err(py_err)?
            .with_max_terms(max_terms);
        let table = py.detach(|| ctx.zeta_table()).map_err(py_err)?;
        let d = PyDict::new(py);
        for (l, z) in table {
            d.set_item((l.c, l.d), fraction(py, &z)?)?;
        }
        Ok(d)
    }

    #[pyo3(signature = (q, c, d, max_terms = DEFAULT_MAX_TERMS))]
    fn partial_zeta0<'py>(&self, py: Python<'py>, q: u64, c: u64, d: u64, max_terms: u64) -> PyResult<Bound<'py, PyAny>> {
        let ctx = rayzeta_core::shintani::RayContext::new(self.inner.clone(), q)
            .map_err(py_err)?
            .with_max_terms(max_terms);
        let label = ctx.label(c, d).map_err(py_err)?;
        let z = py.detach(|| ctx.partial_zeta0(label)).map_err(py_err)?;
        fraction(py, &z)
    }

    fn orbit(&self, q: u64, c: u64, d: u64) -> PyResult<Vec<(u64, u64)>> {
        let ctx = rayzeta_core::shintani::RayContext::new(self.inner.clone(), q).map_err(py_err)?;
        let label = ctx.label(c, d).map_err(py_err)?;
        Ok(tuples(&ctx.orbit(label).map_err(py_err)?.members))
    }

    /// `L(0, χ)` as `{a: coefficient of χ(a)}`.
    fn hecke_l0<'py>(&self, py: Python<'py>, chi: &Character) -> PyResult<Bound<'py, PyDict>> {
        let ctx = rayzeta_core::shintani::RayContext::new(self.inner.clone(), chi.inner.modulus()).map_err(py_err)?;
        let v = py.detach(|| hecke_l0(&ctx, &chi.inner)).map_err(py_err)?;
        span(py, &v)
    }

    fn __repr__(&self) -> String {
        format!("Field(radicand={}, delta={})", self.inner.basis().field().radicand(), self.inner.delta())
    }
}

/// A Dirichlet character modulo `q` with values in the `order`-th roots of unity.
#[pyclass(frozen, module = "rayzeta")]
struct Character {
    inner: DirichletChar,
}

#[pymethods]
impl Character {
    /// `generators` maps residues to exponents: `χ(g) = exp(2πi e / order)`.
    #[new]
    #[pyo3(signature = (modulus, order = 1, generators = Vec::new()))]
    fn new(modulus: u64, order: u64, generators: Vec<(u64, u64)>) -> PyResult<Self> {
        let inner = if generators.is_empty() && order == 1 {
            DirichletChar::trivial(modulus)
        } else {
            DirichletChar::from_generators(modulus, order, &generators)
        };
        Ok(Character {
            inner: inner.map_err(py_err)?,
        })
    }

    #[getter]
    fn modulus(&self) -> u64 {
        self.inner.modulus()
    }

    #[getter]
    fn order(&self) -> u64 {
        self.inner.order()
    }

    fn exponent(&self, a: u64) -> Option<u64> {
        self.inner.exponent(a)
    }

    fn value(&self, a: u64) -> (f64, f64) {
        self.inner.complex_value(a)
    }
}

/// A family `δ(n) - 1 = [[a_1(n), ..., a_s(n)]]` with `f(n)` under the root.
#[pyclass(frozen, module = "rayzeta")]
struct Family {
    spec: FamilySpec,
}

#[pymethods]
impl Family {
    #[new]
    #[pyo3(signature = (preset = None, f_poly = None, a_polys = None, n_min = 0))]
    fn new(preset: Option<&str>, f_poly: Option<&str>, a_polys: Option<Vec<String>>, n_min: u64) -> PyResult<Self> {
        let spec = match (preset, f_poly, a_polys) {
            (Some(name), None, None) => FamilySpec::preset(name),
            (None, Some(f), Some(a)) => (|| {
                let f: Poly = f.parse()?;
                let a = a.iter().map(|p| p.parse()).collect::<Result<Vec<Poly>, _>>()?;
                FamilySpec::new("inline", f, a, n_min, None)
            })(),
            _ => return Err(PyValueError::new_err("give either preset or both f_poly and a_polys")),
        };
        Ok(Family {
            spec: spec.map_err(py_err)?,
        })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.spec.name
    }

    #[getter]
    fn degree(&self) -> usize {
        self.spec.degree()
    }

    /// The field at `n`, or `None` when `n` is skipped.
    fn field(&self, n: u64) -> PyResult<Option<Field>> {
        Ok(match self.spec.instance(n).map_err(py_err)? {
            Sample::Ready(inst) => Some(Field {
                inner: inst.field.clone(),
            }),
            Sample::Skipped { .. } => None,
        })
    }

    /// One dict per (residue, label) with k- and n-form coefficients and checks.
    #[pyo3(signature = (q, max_terms = DEFAULT_MAX_TERMS))]
    fn report<'py>(&self, py: Python<'py>, q: u64, max_terms: u64) -> PyResult<Bound<'py, PyList>> {
        let opts = FamilyOptions {
            max_terms,
            ..FamilyOptions::default()
        };
        let fc = FamilyContext::new(self.spec.clone(), q, opts).map_err(py_err)?;
        let rep = py.detach(|| fc.report()).map_err(py_err)?;
        let out = PyList::empty(py);
        for row in &rep.rows {
            let d = PyDict::new(py);
            d.set_item("r", row.r)?;
            d.set_item("label", (row.label.c, row.label.d))?;
            d.set_item("orbit", tuples(&row.quasi.orbit))?;
            d.set_item("k_form", fractions(py, &row.quasi.coeffs)?)?;
            d.set_item("n_form", fractions(py, &row.n_form)?)?;
            d.set_item("variant", row.quasi.variant.name())?;
            d.set_item("oracle", row.oracle.as_str())?;
            d.set_item(
                "bounds_ok",
                row.member_bound_failures.is_empty() && row.k_bound_failures.is_empty() && row.n_bound_failures.is_empty(),
            )?;
            out.append(d)?;
        }
        Ok(out)
    }

    /// `{r: [coefficient dicts by power of k]}` for `L(0, χ)` on `n ≡ r mod q`.
    #[pyo3(signature = (chi, max_terms = DEFAULT_MAX_TERMS))]
    fn hecke_l0<'py>(&self, py: Python<'py>, chi: &Character, max_terms: u64) -> PyResult<Bound<'py, PyDict>> {
        let opts = FamilyOptions {
            max_terms,
            ..FamilyOptions::default()
        };
        let fc = FamilyContext::new(self.spec.clone(), chi.inner.modulus(), opts).map_err(py_err)?;
        let fam = py.detach(|| hecke_l0_family(&fc, &chi.inner)).map_err(py_err)?;
        let d = PyDict::new(py);
        for (r, row) in fam.poly.rows() {
            let items = row.iter().map(|x| span(py, x)).collect::<PyResult<Vec<_>>>()?;
            d.set_item(r, items)?;
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Family(name={:?}, f={}, degree={})", self.spec.name, self.spec.f, self.spec.degree())
    }
}

/// Runs the acceptance criteria; returns one dict per criterion.
#[pyfunction]
#[pyo3(signature = (criterion = None, qs = None, n_max = None))]
fn run_verify<'py>(
    py: Python<'py>,
    criterion: Option<String>,
    qs: Option<Vec<u64>>,
    n_max: Option<u64>,
) -> PyResult<Bound<'py, PyList>> {
    let mut opts = VerifyOptions {
        n_max,
        ..VerifyOptions::default()
    };
    if let Some(qs) = qs {
        opts.qs = qs;
    }
    let reports = py.detach(|| verify::run(&opts, criterion.as_deref())).map_err(py_err)?;
    let out = PyList::empty(py);
    for r in reports {
        let d = PyDict::new(py);
        d.set_item("id", &r.id)?;
        d.set_item("title", &r.title)?;
        d.set_item("passed", r.passed)?;
        d.set_item("checks", r.checks)?;
        d.set_item("failure_count", r.failure_count)?;
        d.set_item("failures", &r.failures)?;
        d.set_item("notes", &r.notes)?;
        out.append(d)?;
    }
    Ok(out)
}

#[pymodule]
fn rayzeta(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<Character>()?;
    m.add_class::<Family>()?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add("HypothesisError", m.py().get_type::<HypothesisError>())?;
    m.add("VerificationError", m.py().get_type::<VerificationError>())?;
    Ok(())
}
