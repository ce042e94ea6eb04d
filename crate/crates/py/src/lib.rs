//! Python bindings. Build the cdylib and import it as `spherelab`.

use std::cell::RefCell;

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use spherelab::deriv::MultiIndex;
use spherelab::transforms::{SphericalDensity, TransformSpec};
use spherelab::verify::{Suite, VerifyOptions};
use spherelab::{convexity, deriv, harmonics, mesh, specfun, transforms, verify};

const LEVEL: usize = 32;

fn py_err(e: spherelab::Error) -> PyErr {
    if e.is_config() {
        PyValueError::new_err(e.to_string())
    } else {
        PyArithmeticError::new_err(e.to_string())
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for spherelab::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// JSON value to plain Python objects (dict, list, float, ...).
fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
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

fn report<'py, T: Serialize>(py: Python<'py>, r: &T) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(r).map_err(|e| PyValueError::new_err(e.to_string()))?)
}

/// An even density on the unit sphere S^{n-1}.
#[pyclass(name = "Density", module = "spherelab", frozen, from_py_object)]
#[derive(Clone)]
struct PyDensity {
    inner: SphericalDensity,
}

#[pymethods]
impl PyDensity {
    /// Named preset with default parameters.
    #[staticmethod]
    fn preset(name: &str, dim: usize) -> PyResult<Self> {
        Ok(PyDensity { inner: SphericalDensity::named(name, dim).py()? })
    }

    #[staticmethod]
    #[pyo3(signature = (dim, value = 1.0))]
    fn constant(dim: usize, value: f64) -> PyResult<Self> {
        Ok(PyDensity { inner: SphericalDensity::constant(dim, value).py()? })
    }

    /// Atomic measure from `[(u, weight), ...]`.
    #[staticmethod]
    fn atoms(dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> PyResult<Self> {
        Ok(PyDensity { inner: SphericalDensity::atoms(dim, atoms).py()? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyDensity { inner: SphericalDensity::from_json(text).py()? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Value at a unit vector (the even part unless built raw).
    fn __call__(&self, xi: Vec<f64>) -> PyResult<f64> {
        if xi.len() != self.inner.dim() {
            return Err(py_err(spherelab::Error::DimensionMismatch { expected: self.inner.dim(), got: xi.len() }));
        }
        Ok(self.inner.eval(&xi))
    }

    fn __repr__(&self) -> String {
        format!("Density({})", self.inner.to_json())
    }
}

#[pyfunction]
fn gamma(x: f64) -> PyResult<f64> {
    specfun::gamma_fn(x).py()
}

#[pyfunction]
fn c_const(t: f64) -> PyResult<f64> {
    specfun::c_const(t).py()
}

/// `H^p(x) = int |<x, xi>|^p f(xi) dxi`.
#[pyfunction]
#[pyo3(signature = (f, p, x, level = LEVEL))]
fn lp_cosine(f: &PyDensity, p: f64, x: Vec<f64>, level: usize) -> PyResult<f64> {
    let spec = TransformSpec::new(p, f.inner.dim(), level).py()?;
    transforms::lp_cosine(&f.inner, &spec, &x).py()
}

/// `(T_p f)(x)^{1/p}`, the support function value.
#[pyfunction]
#[pyo3(signature = (f, p, x, level = LEVEL))]
fn support_value(f: &PyDensity, p: f64, x: Vec<f64>, level: usize) -> PyResult<f64> {
    let spec = TransformSpec::new(p, f.inner.dim(), level).py()?;
    transforms::support_value(&f.inner, &spec, &x).py()
}

#[pyfunction]
#[pyo3(signature = (f, x, level = LEVEL))]
fn radon(f: &PyDensity, x: Vec<f64>, level: usize) -> PyResult<f64> {
    transforms::radon(&f.inner, &x, level).py()
}

#[pyfunction]
fn zonotope_support(f: &PyDensity, x: Vec<f64>) -> PyResult<f64> {
    transforms::zonotope_support(&f.inner, &x).py()
}

#[pyfunction]
#[pyo3(signature = (f, k, alpha, x, level = LEVEL))]
fn analytic_deriv_odd(f: &PyDensity, k: u32, alpha: Vec<u32>, x: Vec<f64>, level: usize) -> PyResult<f64> {
    deriv::analytic_deriv_odd(&f.inner, k, &MultiIndex::new(alpha), &x, level).py()
}

#[pyfunction]
#[pyo3(signature = (f, p, alpha, x, level = LEVEL))]
fn analytic_deriv_frac(f: &PyDensity, p: f64, alpha: Vec<u32>, x: Vec<f64>, level: usize) -> PyResult<f64> {
    deriv::analytic_deriv_frac(&f.inner, p, &MultiIndex::new(alpha), &x, level).py()
}

/// Central differences with one Richardson step of `D^alpha f(x)` for a
/// Python callable `f(list) -> float`.
#[pyfunction]
#[pyo3(signature = (f, alpha, x, h = None))]
fn finite_diff(f: &Bound<'_, PyAny>, alpha: Vec<u32>, x: Vec<f64>, h: Option<f64>) -> PyResult<f64> {
    // Keep the first Python exception so it is re-raised unchanged.
    let failure: RefCell<Option<PyErr>> = RefCell::new(None);
    let field = |p: &[f64]| -> spherelab::Result<f64> {
        f.call1((p.to_vec(),)).and_then(|v| v.extract::<f64>()).map_err(|e| {
            let msg = e.to_string();
            failure.borrow_mut().get_or_insert(e);
            spherelab::Error::Domain(msg)
        })
    };
    let out = deriv::finite_diff(&field, &MultiIndex::new(alpha), &x, h);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    out.py()
}

#[pyfunction]
#[pyo3(signature = (f, p, u, level = LEVEL))]
fn grad_hp(f: &PyDensity, p: f64, u: Vec<f64>, level: usize) -> PyResult<Vec<f64>> {
    deriv::grad_hp(&f.inner, p, &u, level).py()
}

#[pyfunction]
#[pyo3(signature = (f, p, u, level = LEVEL))]
fn hessian_hp(f: &PyDensity, p: f64, u: Vec<f64>, level: usize) -> PyResult<Vec<Vec<f64>>> {
    Ok(deriv::hessian_hp(&f.inner, p, &u, level).py()?.into())
}

#[pyfunction]
#[pyo3(signature = (f, p, u, level = LEVEL))]
fn hessian_h(f: &PyDensity, p: f64, u: Vec<f64>, level: usize) -> PyResult<Vec<Vec<f64>>> {
    Ok(deriv::hessian_h(&f.inner, p, &u, level).py()?.into())
}

/// Principal radii of curvature at the outer normal `u`, ascending.
#[pyfunction]
#[pyo3(signature = (f, p, u, level = LEVEL))]
fn principal_radii(f: &PyDensity, p: f64, u: Vec<f64>, level: usize) -> PyResult<Vec<f64>> {
    Ok(convexity::reverse_weingarten(&f.inner, p, &u, level).py()?.radii)
}

#[pyfunction]
#[pyo3(signature = (f, p, u, x, level = LEVEL))]
fn lindquist(f: &PyDensity, p: f64, u: Vec<f64>, x: Vec<f64>, level: usize) -> PyResult<f64> {
    convexity::lindquist(&f.inner, p, &u, &x, level).py()
}

#[pyfunction]
#[pyo3(signature = (f, p, u, level = LEVEL))]
fn boundary_point(f: &PyDensity, p: f64, u: Vec<f64>, level: usize) -> PyResult<Vec<f64>> {
    convexity::boundary_point(&f.inner, p, &u, level).py()
}

/// Direction grid: uniform angles for dim 2, Fibonacci spiral for dim 3.
#[pyfunction]
#[pyo3(signature = (dim, count, seed = 0))]
fn direction_grid(dim: usize, count: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    convexity::direction_grid(dim, count, seed).py()
}

/// Curvature report over `directions` as a dict.
#[pyfunction]
#[pyo3(signature = (f, p, directions, level = LEVEL))]
fn curvature_report<'py>(
    py: Python<'py>,
    f: &PyDensity,
    p: f64,
    directions: Vec<Vec<f64>>,
    level: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let inner = f.inner.clone();
    let r = py.detach(move || convexity::curvature_report(&inner, p, &directions, level)).py()?;
    report(py, &r)
}

#[pyfunction]
#[pyo3(signature = (f, p, directions, level = LEVEL))]
fn convexity_check<'py>(
    py: Python<'py>,
    f: &PyDensity,
    p: f64,
    directions: Vec<Vec<f64>>,
    level: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let inner = f.inner.clone();
    let r = py.detach(move || convexity::convexity_check(&inner, p, &directions, level)).py()?;
    report(py, &r)
}

/// Measured multipliers and the ratios `rho_l` for even `l <= lmax`.
#[pyfunction]
#[pyo3(signature = (lmax = 6, level = 48))]
fn inversion_ratio_check(py: Python<'_>, lmax: usize, level: usize) -> PyResult<Bound<'_, PyAny>> {
    let r = py.detach(move || harmonics::inversion_ratio_check(lmax, level)).py()?;
    report(py, &r)
}

/// Boundary mesh as OBJ text.
#[pyfunction]
#[pyo3(signature = (f, p, count, level = LEVEL))]
fn mesh_obj(py: Python<'_>, f: &PyDensity, p: f64, count: usize, level: usize) -> PyResult<String> {
    let inner = f.inner.clone();
    Ok(py.detach(move || mesh::body_mesh(&inner, p, count, level)).py()?.to_obj())
}

/// Runs a verification suite: "derivatives", "inversion", "convexity" or
/// "all".
#[pyfunction]
#[pyo3(signature = (suite = "all", dim = 3, p = None, density = None, level = LEVEL, grid = 200, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn run_suite<'py>(
    py: Python<'py>,
    suite: &str,
    dim: usize,
    p: Option<f64>,
    density: Option<PyDensity>,
    level: usize,
    grid: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().py()?;
    let opts = VerifyOptions {
        dim,
        p,
        density: density.map(|d| d.inner),
        level,
        grid,
        seed,
        ..VerifyOptions::default()
    };
    let r = py.detach(move || verify::run_suite(suite, &opts)).py()?;
    report(py, &r)
}

#[pymodule]
#[pyo3(name = "spherelab")]
fn spherelab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyDensity>()?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(c_const, m)?)?;
    m.add_function(wrap_pyfunction!(lp_cosine, m)?)?;
    m.add_function(wrap_pyfunction!(support_value, m)?)?;
    m.add_function(wrap_pyfunction!(radon, m)?)?;
    m.add_function(wrap_pyfunction!(zonotope_support, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_deriv_odd, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_deriv_frac, m)?)?;
    m.add_function(wrap_pyfunction!(finite_diff, m)?)?;
    m.add_function(wrap_pyfunction!(grad_hp, m)?)?;
    m.add_function(wrap_pyfunction!(hessian_hp, m)?)?;
    m.add_function(wrap_pyfunction!(hessian_h, m)?)?;
    m.add_function(wrap_pyfunction!(principal_radii, m)?)?;
    m.add_function(wrap_pyfunction!(lindquist, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_point, m)?)?;
    m.add_function(wrap_pyfunction!(direction_grid, m)?)?;
    m.add_function(wrap_pyfunction!(curvature_report, m)?)?;
    m.add_function(wrap_pyfunction!(convexity_check, m)?)?;
    m.add_function(wrap_pyfunction!(inversion_ratio_check, m)?)?;
    m.add_function(wrap_pyfunction!(mesh_obj, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
