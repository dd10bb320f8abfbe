//! Python bindings: curves, modular symbols, the stabilized p-adic L-approximant,
//! finite BF sums and the end-to-end check.

use std::collections::BTreeMap;

use ecbf_core::bf::{self, FiniteBFSystem};
use ecbf_core::curve::{self, EllipticCurve};
use ecbf_core::modsym::{self, ModularSymbols};
use ecbf_core::padic::newton_invariants;
use ecbf_core::verifier;
use ecbf_core::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Singular
        | Error::NonMinimal { .. }
        | Error::AdditiveReduction(_)
        | Error::Domain(_)
        | Error::NotOrdinary(_)
        | Error::InvalidSystem(_)
        | Error::Fixture(_)
        | Error::Parse(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Curve", module = "ecbf", frozen)]
#[derive(Clone)]
struct PyCurve {
    inner: EllipticCurve,
}

#[pymethods]
impl PyCurve {
    #[new]
    fn new(a: [i64; 5]) -> PyResult<Self> {
        Ok(PyCurve { inner: EllipticCurve::new(a).map_err(to_py)? })
    }

    #[getter]
    fn coefficients(&self) -> [i128; 5] {
        self.inner.coefficients()
    }
    #[getter]
    fn discriminant(&self) -> i128 {
        self.inner.disc
    }
    #[getter]
    fn bad_primes(&self) -> Vec<u64> {
        self.inner.bad_primes.clone()
    }
    fn conductor(&self) -> PyResult<u64> {
        self.inner.conductor().map_err(to_py)
    }
    fn is_good_ordinary(&self, p: u64) -> bool {
        curve::is_good_ordinary(&self.inner, p)
    }
    fn a_p(&self, l: u64) -> PyResult<i64> {
        curve::prime_coefficient(&self.inner, l).map_err(to_py)
    }
    /// `[a_1, ..., a_bound]`.
    fn an(&self, bound: usize) -> PyResult<Vec<i64>> {
        curve::an_sequence(&self.inner, bound).map_err(to_py)
    }
    fn local_data<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let mut out = Vec::new();
        for &q in &self.inner.bad_primes {
            let ld = curve::local_data_semistable(&self.inner, q).map_err(to_py)?;
            let d = PyDict::new(py);
            d.set_item("prime", ld.prime)?;
            d.set_item("kodaira", ld.kodaira_symbol())?;
            d.set_item("split", ld.split)?;
            d.set_item("tamagawa", ld.tamagawa)?;
            d.set_item("component_order", ld.component_order)?;
            out.push(d);
        }
        Ok(out)
    }
    fn torsion_order(&self) -> PyResult<u64> {
        Ok(curve::torsion_order(&self.inner).map_err(to_py)?.order)
    }
    #[pyo3(signature = (bits = 128))]
    fn omega_plus(&self, bits: usize) -> PyResult<f64> {
        Ok(modsym::real_period(&self.inner, bits).map_err(to_py)?.omega_plus_f64())
    }
    fn __repr__(&self) -> String {
        format!("Curve({:?})", self.inner.coefficients())
    }
}

#[pyclass(name = "ModularSymbols", module = "ecbf", frozen)]
struct PyModularSymbols {
    inner: ModularSymbols,
}

#[pymethods]
impl PyModularSymbols {
    #[new]
    #[pyo3(signature = (curve, bits = 128, bound = modsym::DEFAULT_DENOMINATOR_BOUND))]
    fn new(py: Python<'_>, curve: &PyCurve, bits: usize, bound: u64) -> PyResult<Self> {
        let e = curve.inner.clone();
        let inner = py.allow_threads(|| ModularSymbols::new(&e, bits, bound)).map_err(to_py)?;
        Ok(PyModularSymbols { inner })
    }

    /// `[num/den]^+` as a `fractions.Fraction`.
    fn plus<'py>(&self, py: Python<'py>, num: i64, den: i64) -> PyResult<Bound<'py, PyAny>> {
        let v = self.inner.plus(num, den).map_err(to_py)?;
        py.import("fractions")?.getattr("Fraction")?.call1((v.to_string(),))
    }

    /// Coefficients of `theta_n` modulo `p^precision`, keyed by residue class.
    fn theta(&self, p: u64, n: i32, precision: u32) -> PyResult<BTreeMap<u64, u128>> {
        Ok(modsym::theta_element(&self.inner, p, n, precision).map_err(to_py)?.coeffs)
    }

    /// `G_n` with its unit root and Iwasawa invariants.
    fn stabilized_lp<'py>(&self, py: Python<'py>, p: u64, n: u32, precision: u32) -> PyResult<Bound<'py, PyDict>> {
        let lp = modsym::stabilized_lp(&self.inner, p, n, precision).map_err(to_py)?;
        let inv = newton_invariants(&lp.g).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("a_p", lp.a_p)?;
        d.set_item("alpha", lp.alpha.residue)?;
        d.set_item("coefficients", lp.g.coeffs.clone())?;
        d.set_item("mu", inv.mu)?;
        d.set_item("lambda", inv.lambda)?;
        Ok(d)
    }

    /// `v_p` of the product of `G_n(zeta - 1)` over the nontrivial `p^n`-th roots of unity.
    #[pyo3(signature = (p, n, precision = 8))]
    fn lhs_valuation(&self, p: u64, n: u32, precision: u32) -> PyResult<u32> {
        Ok(verifier::lhs_valuation_with(&self.inner, p, n, precision).map_err(to_py)?.valuation)
    }

    /// Full report as a dict. Raises `ValueError` if the hypotheses fail.
    #[pyo3(signature = (p, n, fixture, precision = 8))]
    fn check_theorem<'py>(&self, py: Python<'py>, p: u64, n: u32, fixture: &str, precision: u32) -> PyResult<Bound<'py, PyAny>> {
        let fix = verifier::load_fixture(fixture).map_err(to_py)?;
        let report = verifier::check_theorem_with(&self.inner, p, n, &fix, precision).map_err(|e| match e {
            Error::Hypothesis(_) => PyValueError::new_err(e.to_string()),
            e => to_py(e),
        })?;
        json_to_py(py, &report.to_json())
    }
}

#[pyclass(name = "BFSystem", module = "ecbf", frozen)]
struct PyBFSystem {
    inner: FiniteBFSystem,
}

#[pymethods]
impl PyBFSystem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyBFSystem { inner: FiniteBFSystem::from_json(text).map_err(to_py)? })
    }
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyBFSystem { inner: FiniteBFSystem::load(path).map_err(to_py)? })
    }
    #[getter]
    fn group_order(&self) -> u128 {
        self.inner.group_order()
    }
    #[getter]
    fn kernel_order(&self) -> u128 {
        self.inner.kernel_order()
    }
    fn is_perfect(&self) -> bool {
        self.inner.is_perfect()
    }
    /// `method` is `"brute"`, `"closed"` or `"split"`.
    #[pyo3(signature = (method = "brute"))]
    fn sum(&self, py: Python<'_>, method: &str) -> PyResult<u128> {
        let s = &self.inner;
        py.allow_threads(|| match method {
            "brute" => bf::bf_sum_bruteforce(s).map_err(to_py),
            "closed" => bf::bf_sum_closed(s).map_err(to_py),
            "split" => bf::isotypic_split_sum(s).map(|r| r.value).map_err(to_py),
            other => Err(PyValueError::new_err(format!("unknown method {other:?}"))),
        })
    }
    fn isotypic_sums(&self) -> PyResult<Option<BTreeMap<u32, u128>>> {
        Ok(bf::isotypic_split_sum(&self.inner).map_err(to_py)?.component_values)
    }
}

#[pyfunction]
fn parse_fixture<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let fix = verifier::parse_fixture(text).map_err(to_py)?;
    fix.validate().map_err(to_py)?;
    json_to_py(py, text)
}

#[pyfunction]
fn primes_above(l: u64, p: u64, n: u32) -> u64 {
    verifier::primes_above(l, p, n)
}

#[pymodule]
fn ecbf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCurve>()?;
    m.add_class::<PyModularSymbols>()?;
    m.add_class::<PyBFSystem>()?;
    m.add_function(wrap_pyfunction!(parse_fixture, m)?)?;
    m.add_function(wrap_pyfunction!(primes_above, m)?)?;
    m.add("__all__", PyList::new(m.py(), ["Curve", "ModularSymbols", "BFSystem", "parse_fixture", "primes_above"])?)?;
    Ok(())
}
