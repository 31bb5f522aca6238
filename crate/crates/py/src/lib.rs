//! Python bindings. Rationals cross the boundary as exact `"p/q"` strings.

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use serde_json::Value;

use masslin::exact::{format_rational, parse_rational};
use masslin::invariant::{characteristic_number_with, FacetIntegrals};
use masslin::io::Input;
use masslin::masslinear::{is_mass_linear, SamplingConfig};
use masslin::polytope::{is_delzant, Chamber, HalfSpaceSystem};
use masslin::{Error, Rational};

create_exception!(masslin_py, MasslinError, PyValueError);
create_exception!(masslin_py, NotDelzantError, MasslinError);

fn err(e: Error) -> PyErr {
    match e {
        Error::NotDelzant(_) => NotDelzantError::new_err(e.to_string()),
        _ => MasslinError::new_err(e.to_string()),
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any().unbind(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any().unbind(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind(),
        },
        Value::String(s) => PyString::new(py, s).into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for x in items {
                list.append(to_py(py, x)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn report(py: Python<'_>, value: &impl serde::Serialize) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| MasslinError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn direction(b: Vec<i64>) -> Vec<BigInt> {
    b.into_iter().map(BigInt::from).collect()
}

fn rationals(values: &[String]) -> PyResult<Vec<Rational>> {
    values.iter().map(|s| parse_rational(s).map_err(err)).collect()
}

/// A polytope `{x : <x, n_j> <= k_j}` with primitive integral conormals.
#[pyclass(module = "masslin_py", frozen)]
struct Polytope {
    sys: HalfSpaceSystem,
}

#[pymethods]
impl Polytope {
    #[new]
    fn new(conormals: Vec<Vec<i64>>, offsets: Vec<String>) -> PyResult<Self> {
        let conormals = conormals.into_iter().map(direction).collect();
        let sys = HalfSpaceSystem::new(conormals, rationals(&offsets)?).map_err(err)?;
        Ok(Self { sys })
    }

    /// Polytope file or family spec, as JSON text.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let sys = Input::parse(text).and_then(|i| i.build()).map_err(err)?;
        Ok(Self { sys })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.sys.dim()
    }

    #[getter]
    fn facet_count(&self) -> usize {
        self.sys.facet_count()
    }

    #[getter]
    fn offsets(&self) -> Vec<String> {
        self.sys.offsets().iter().map(format_rational).collect()
    }

    fn vertices(&self) -> Vec<Vec<String>> {
        self.sys
            .vertices()
            .iter()
            .map(|v| v.point.iter().map(format_rational).collect())
            .collect()
    }

    fn is_delzant(&self) -> bool {
        is_delzant(&self.sys).delzant
    }

    fn center_of_mass(&self) -> PyResult<Vec<String>> {
        let fi = FacetIntegrals::compute(&self.sys).map_err(err)?;
        Ok(fi.center_of_mass().iter().map(format_rational).collect())
    }

    /// Full report of `I(k; b)` as a dict.
    #[pyo3(signature = (b, formal = false))]
    fn invariant(&self, py: Python<'_>, b: Vec<i64>, formal: bool) -> PyResult<Py<PyAny>> {
        let r = characteristic_number_with(&self.sys, &direction(b), formal).map_err(err)?;
        report(py, &r)
    }

    /// Just the value of `I(k; b)`.
    fn invariant_value(&self, b: Vec<i64>) -> PyResult<String> {
        let fi = FacetIntegrals::compute(&self.sys).map_err(err)?;
        fi.value(&direction(b)).map(|v| format_rational(&v)).map_err(err)
    }

    #[pyo3(signature = (b, seed = 0, samples = None))]
    fn mass_linear(&self, py: Python<'_>, b: Vec<i64>, seed: u64, samples: Option<usize>) -> PyResult<Py<PyAny>> {
        let ch = Chamber::new(self.sys.clone()).map_err(err)?;
        let cfg = SamplingConfig {
            validation: samples,
            seed,
        };
        let verdict = is_mass_linear(&ch, &direction(b), &cfg).map_err(err)?;
        report(py, &verdict)
    }

    fn with_offsets(&self, offsets: Vec<String>) -> PyResult<Self> {
        let sys = self.sys.with_offsets(rationals(&offsets)?).map_err(err)?;
        Ok(Self { sys })
    }

    fn __repr__(&self) -> String {
        format!("Polytope(dim={}, facets={})", self.sys.dim(), self.sys.facet_count())
    }
}

/// Closed-form invariant of a family given as JSON.
#[pyfunction]
fn closed_form_invariant(family: &str, b: Vec<i64>) -> PyResult<String> {
    let spec = match Input::parse(family).map_err(err)? {
        Input::Family(f) => f,
        Input::Polytope(_) => return Err(MasslinError::new_err("expected a family spec")),
    };
    spec.closed_form_invariant(&direction(b))
        .map(|v| format_rational(&v))
        .map_err(err)
}

/// Runs a named check suite and returns its report.
#[pyfunction]
fn run_suite(py: Python<'_>, name: &str) -> PyResult<Py<PyAny>> {
    let r = masslin::verify::run_suite(name).map_err(err)?;
    let mut v = serde_json::to_value(&r).map_err(|e| MasslinError::new_err(e.to_string()))?;
    v["passed"] = Value::Bool(r.passed());
    to_py(py, &v)
}

#[pymodule]
fn masslin_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Polytope>()?;
    m.add_function(wrap_pyfunction!(closed_form_invariant, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add("MasslinError", m.py().get_type::<MasslinError>())?;
    m.add("NotDelzantError", m.py().get_type::<NotDelzantError>())?;
    m.add("SUITES", masslin::verify::SUITES.to_vec())?;
    Ok(())
}
