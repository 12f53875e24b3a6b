//! Python bindings: `import nda`.
//!
//! Reports come back as plain dicts built from their serde form.

use nda_core::exprlang::{self, EvalError, EvalResult};
use nda_core::{
    check_archimedean, check_law, find_largest_number, practical_convergence, search_identities,
    verify_archimedean_theorem, Error, IdentityPattern, Law, Overflow, SequenceSpec,
};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

create_exception!(nda, NdaError, PyValueError, "Base class for nda errors.");
create_exception!(nda, SpecError, NdaError, "Malformed spec or argument.");
create_exception!(
    nda,
    ValidationError,
    NdaError,
    "The functional parameter was rejected."
);
create_exception!(
    nda,
    EvaluationError,
    NdaError,
    "An operation left the carrier."
);

fn err(e: Error) -> PyErr {
    let msg = e.to_string();
    if e.is_validation() {
        ValidationError::new_err(msg)
    } else if e.is_evaluation() {
        EvaluationError::new_err(msg)
    } else {
        SpecError::new_err(msg)
    }
}

fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn report<'py>(py: Python<'py>, r: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(r).map_err(|e| NdaError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// An arithmetic built from `<kind>:<f>@<carrier>`.
#[pyclass(frozen, module = "nda")]
struct Arithmetic {
    inner: nda_core::Arithmetic,
}

#[pymethods]
impl Arithmetic {
    #[new]
    #[pyo3(signature = (spec, overflow = None))]
    fn new(spec: &str, overflow: Option<&str>) -> PyResult<Self> {
        let mut inner: nda_core::Arithmetic = spec.parse().map_err(err)?;
        if let Some(o) = overflow {
            let o: Overflow = o.parse().map_err(err)?;
            inner = inner.with_overflow(o).map_err(err)?;
        }
        Ok(Arithmetic { inner })
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.carrier().size()
    }

    #[getter]
    fn max(&self) -> f64 {
        self.inner.carrier().max()
    }

    #[getter]
    fn multiplicative(&self) -> bool {
        self.inner.multiplicative()
    }

    fn add(&self, a: f64, b: f64) -> PyResult<f64> {
        self.inner.add(a, b).map_err(err)
    }

    fn mul(&self, a: f64, b: f64) -> PyResult<f64> {
        self.inner.mul(a, b).map_err(err)
    }

    fn sub(&self, a: f64, b: f64) -> PyResult<f64> {
        self.inner.sub(a, b).map_err(err)
    }

    /// `m (+) m (+) ... (+) m` with `k` terms.
    fn nsum(&self, m: f64, k: u64) -> PyResult<f64> {
        self.inner.nsum(m, k).map_err(err)
    }

    fn mll(&self, a: f64, b: f64) -> PyResult<bool> {
        self.inner.mll(a, b).map_err(err)
    }

    fn mll_dual(&self, a: f64, b: f64) -> PyResult<bool> {
        self.inner.mll_dual(a, b).map_err(err)
    }

    fn mlll(&self, a: f64, b: f64) -> PyResult<bool> {
        self.inner.mlll(a, b).map_err(err)
    }

    /// Renders a carrier value with the carrier's precision.
    fn format(&self, v: f64) -> PyResult<String> {
        Ok(self.inner.format(self.inner.index(v).map_err(err)?))
    }

    /// Evaluates an expression; values come back as floats, relations as bools.
    fn eval<'py>(&self, py: Python<'py>, expr: &str) -> PyResult<Bound<'py, PyAny>> {
        match exprlang::eval_str(expr, &self.inner) {
            Ok(EvalResult::Value { value, .. }) => Ok(value.into_pyobject(py)?.into_any()),
            Ok(EvalResult::Bool(b)) => Ok(b.into_pyobject(py)?.to_owned().into_any()),
            Err(EvalError::Syntax(e)) => Err(SpecError::new_err(e.to_string())),
            Err(EvalError::Arith(e)) => Err(err(e)),
        }
    }

    #[pyo3(name = "check_law")]
    fn law<'py>(&self, py: Python<'py>, law: &str, r: usize) -> PyResult<Bound<'py, PyAny>> {
        let law: Law = law.parse().map_err(err)?;
        let rep = py.detach(|| check_law(&self.inner, law, r));
        report(py, &rep)
    }

    fn archimedean<'py>(&self, py: Python<'py>, r: usize) -> PyResult<Bound<'py, PyAny>> {
        let rep = py.detach(|| check_archimedean(&self.inner, r));
        report(py, &rep)
    }

    fn theorem<'py>(&self, py: Python<'py>, r: usize) -> PyResult<Bound<'py, PyAny>> {
        let rep = py.detach(|| verify_archimedean_theorem(&self.inner, r));
        report(py, &rep)
    }

    fn largest_number(&self) -> Option<f64> {
        find_largest_number(&self.inner)
    }

    /// Pattern is `a_plus_b_eq_a` or `a_times_a_eq_a`.
    fn search_identities(&self, pattern: &str, r: usize) -> PyResult<Vec<Vec<f64>>> {
        let p: IdentityPattern = pattern.parse().map_err(err)?;
        search_identities(&self.inner, p, r).map_err(err)
    }

    fn partial_sums<'py>(
        &self,
        py: Python<'py>,
        seq: &str,
        n: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let seq: SequenceSpec = seq.parse().map_err(err)?;
        let ps = nda_core::arith_partial_sums(&self.inner, &seq, n).map_err(err)?;
        report(py, &ps)
    }

    fn __repr__(&self) -> String {
        format!("Arithmetic('{}')", self.inner)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

#[pyfunction]
#[pyo3(signature = (seq, budget, window = nda_core::series::DEFAULT_WINDOW, tol = nda_core::series::DEFAULT_TOLERANCE))]
fn practical_convergence_py<'py>(
    py: Python<'py>,
    seq: &str,
    budget: usize,
    window: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let seq: SequenceSpec = seq.parse().map_err(err)?;
    let v = practical_convergence(&seq, budget, window, tol).map_err(err)?;
    report(py, &v)
}

/// Parses and pretty-prints an expression (minimal parentheses).
#[pyfunction]
fn normalize(expr: &str) -> PyResult<String> {
    exprlang::parse(expr)
        .map(|ast| ast.to_string())
        .map_err(|e| SpecError::new_err(e.to_string()))
}

#[pymodule]
fn nda(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<Arithmetic>()?;
    let f = wrap_pyfunction!(practical_convergence_py, m)?;
    m.add("practical_convergence", f)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add("NdaError", py.get_type::<NdaError>())?;
    m.add("SpecError", py.get_type::<SpecError>())?;
    m.add("ValidationError", py.get_type::<ValidationError>())?;
    m.add("EvaluationError", py.get_type::<EvaluationError>())?;
    Ok(())
}
