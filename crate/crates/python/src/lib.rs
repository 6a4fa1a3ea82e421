//! Python bindings: polynomials, index sets, auxiliary data, counting,
//! exponential sums, the increment iteration and the acceptance suite.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pintersect_core::acceptance::{run_all, Level};
use pintersect_core::counting::{count_r_direct, count_r_fft, greedy_avoider, GapMode, IndexSet};
use pintersect_core::fourier::{gauss_sum, gauss_sums_all, weyl_sum, Frequency};
use pintersect_core::increment::{run_iteration, IncrementConfig};
use pintersect_core::intersective::{certify_p_intersective, AuxFactory};
use pintersect_core::primes::{h_range_needs, psi as psi_core, weighted_primes, PrimeTable};
use pintersect_core::{Error, IntPoly};

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::PolyParse(_) | Error::NotCoprime { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// An integer polynomial; coefficients lowest degree first.
#[pyclass(name = "Poly", from_py_object)]
#[derive(Clone)]
struct PyPoly {
    inner: IntPoly,
}

#[pymethods]
impl PyPoly {
    #[new]
    fn new(coeffs: Vec<i64>) -> Self {
        Self {
            inner: IntPoly::from_i64(&coeffs),
        }
    }

    /// From the JSON encoding, e.g. `'["-1","0","1"]'`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: text.parse().map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("polynomials serialize")
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn coeffs(&self) -> Vec<String> {
        self.inner.coeffs().iter().map(|c| c.to_string()).collect()
    }

    fn __call__(&self, x: i64) -> String {
        self.inner.eval_i64(x).to_string()
    }

    fn __repr__(&self) -> String {
        format!("Poly({})", self.inner.pretty())
    }
}

/// A subset of `[1, L]`.
#[pyclass(name = "IndexSet", from_py_object)]
#[derive(Clone)]
struct PyIndexSet {
    inner: IndexSet,
}

#[pymethods]
impl PyIndexSet {
    #[new]
    fn new(length: u64, members: Vec<u64>) -> PyResult<Self> {
        Ok(Self {
            inner: IndexSet::new(length, members).map_err(err)?,
        })
    }

    /// The greedy subset of `[1, n]` avoiding every difference `h(p)`
    /// (`mode="primes"`) or `h(n)` (`mode="all-n"`).
    #[staticmethod]
    #[pyo3(signature = (poly, n, mode = "primes"))]
    fn greedy(poly: &PyPoly, n: u64, mode: &str) -> PyResult<Self> {
        let mode: GapMode = mode.parse().map_err(err)?;
        Ok(Self {
            inner: greedy_avoider(&poly.inner, n, mode),
        })
    }

    #[getter]
    fn length(&self) -> u64 {
        self.inner.length()
    }

    #[getter]
    fn members(&self) -> Vec<u64> {
        self.inner.members().to_vec()
    }

    #[getter]
    fn density(&self) -> f64 {
        self.inner.sigma()
    }

    fn __len__(&self) -> usize {
        self.inner.size()
    }

    fn __contains__(&self, x: u64) -> bool {
        self.inner.contains(x)
    }

    fn __repr__(&self) -> String {
        format!("IndexSet(L={}, size={})", self.inner.length(), self.inner.size())
    }
}

/// Auxiliary data for one polynomial, computed on demand per modulus.
#[pyclass(name = "Aux")]
struct PyAux {
    factory: AuxFactory,
    table: PrimeTable,
}

impl PyAux {
    fn weights(&mut self, d: u64, l: u64, s: u64) -> PyResult<(pintersect_core::intersective::AuxData, pintersect_core::primes::WeightedPrimes)> {
        let aux = self.factory.aux_mut(d).map_err(err)?;
        let need = h_range_needs(&aux, l, s).map_err(err)?;
        if need > self.table.limit() {
            self.table = PrimeTable::load_or_sieve(need.max(2 * self.table.limit())).map_err(err)?;
        }
        let wp = weighted_primes(&aux, l, s, &self.table).map_err(err)?;
        Ok((aux, wp))
    }
}

#[pymethods]
impl PyAux {
    #[new]
    fn new(poly: &PyPoly) -> PyResult<Self> {
        Ok(Self {
            factory: AuxFactory::new(&poly.inner).map_err(err)?,
            table: PrimeTable::sieve(1 << 16),
        })
    }

    /// `{d, r_d, lambda_d, h_d, b_d}`.
    fn data(&mut self, py: Python<'_>, d: u64) -> PyResult<Py<PyAny>> {
        let aux = self.factory.aux_mut(d).map_err(err)?;
        to_py(py, &aux)
    }

    fn lam(&mut self, d: u64) -> PyResult<String> {
        Ok(self.factory.lambda_mut(d).map_err(err)?.to_string())
    }

    /// `G(a, q)` as a complex number.
    fn gauss(&mut self, d: u64, a: i64, q: u64) -> PyResult<num_complex::Complex64> {
        let aux = self.factory.aux_mut(d).map_err(err)?;
        gauss_sum(&aux, a, q).map_err(err)
    }

    /// Every `G(a, q)` with `gcd(a, q) = 1`, as dicts `{a, re, im, abs, ratio}`.
    fn gauss_all(&mut self, py: Python<'_>, d: u64, q: u64) -> PyResult<Py<PyAny>> {
        let aux = self.factory.aux_mut(d).map_err(err)?;
        to_py(py, &gauss_sums_all(&aux, q).map_err(err)?)
    }

    /// `R_d(B)`, by FFT or directly.
    #[pyo3(signature = (b, d = 1, s = None, method = "fft"))]
    fn count(&mut self, b: &PyIndexSet, d: u64, s: Option<u64>, method: &str) -> PyResult<f64> {
        let s = s.unwrap_or_else(|| default_s(self.factory.poly()));
        let (_, wp) = self.weights(d, b.inner.length(), s)?;
        let r = match method {
            "fft" => count_r_fft(&b.inner, &wp),
            "direct" => count_r_direct(&b.inner, &wp, false),
            _ => return Err(PyValueError::new_err("method is 'fft' or 'direct'")),
        };
        Ok(r.map_err(err)?.value)
    }

    /// `(S_M(α), Ψ_d)` with `α = num/den`, or `α = num` when `den` is omitted.
    #[pyo3(signature = (d, length, num, den = None, s = None))]
    fn weyl(&mut self, d: u64, length: u64, num: f64, den: Option<u64>, s: Option<u64>) -> PyResult<(num_complex::Complex64, f64)> {
        let s = s.unwrap_or_else(|| default_s(self.factory.poly()));
        let (aux, wp) = self.weights(d, length, s)?;
        let alpha = match den {
            Some(q) if num.fract() == 0.0 && q > 0 => Frequency::rational(num as i64, q),
            Some(_) => return Err(PyValueError::new_err("rational frequency needs an integer numerator and den > 0")),
            None => Frequency::Real(num),
        };
        let z = weyl_sum(&aux, &wp, wp.range.m_floor, alpha).map_err(err)?;
        Ok((z, wp.psi_total))
    }
}

fn default_s(h: &IntPoly) -> u64 {
    (1u64 << h.degree().min(16)) + 6
}

/// The verdict on P-intersectivity as a dict.
#[pyfunction]
#[pyo3(signature = (poly, qmax = 10_000))]
fn certify(py: Python<'_>, poly: &PyPoly, qmax: u64) -> PyResult<Py<PyAny>> {
    to_py(py, &certify_p_intersective(&poly.inner, qmax).map_err(err)?)
}

/// `ψ(X; a, q)`.
#[pyfunction]
fn psi(x: u64, a: i64, q: u64) -> PyResult<f64> {
    let table = PrimeTable::load_or_sieve(x.max(2)).map_err(err)?;
    psi_core(&table, x, a, q).map_err(err)
}

/// The density-increment trace for `A` as a dict.
#[pyfunction]
#[pyo3(signature = (a, poly, budget = None))]
fn iterate(py: Python<'_>, a: &PyIndexSet, poly: &PyPoly, budget: Option<u64>) -> PyResult<Py<PyAny>> {
    let mut config = IncrementConfig::for_poly(&poly.inner);
    config.budget = budget;
    let trace = run_iteration(&a.inner, &poly.inner, config).map_err(err)?;
    to_py(py, &trace)
}

/// The acceptance report as a dict.
#[pyfunction]
#[pyo3(signature = (level = "fast", seed = pintersect_core::config::DEFAULT_SEED))]
fn verify(py: Python<'_>, level: &str, seed: u64) -> PyResult<Py<PyAny>> {
    let level: Level = level.parse().map_err(err)?;
    let report = py.detach(|| run_all(level, seed));
    to_py(py, &report)
}

#[pymodule]
fn pintersect(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoly>()?;
    m.add_class::<PyIndexSet>()?;
    m.add_class::<PyAux>()?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(iterate, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
