//! Python module `singleshot`: codes, Pauli operators, memory runs, sweeps and oracles.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ::singleshot::code::{CodeFamily, CodeId, StabilizerCode};
use ::singleshot::config::ExperimentConfig;
use ::singleshot::io::rows_to_csv;
use ::singleshot::memory::{estimate_failure, sweep, worker_pool, FailureEstimate, MemoryRunConfig};
use ::singleshot::noise::{FlipModelSpec, NoiseModelSpec, PauliSector};
use ::singleshot::pauli_algebra::{BitVec, PauliOp};
use ::singleshot::{bounds, verify, VERSION};

fn py_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// An n-qubit Pauli operator, phases dropped. Parsed from strings like "XIZY".
#[pyclass(name = "Pauli", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPauli {
    inner: PauliOp,
}

#[pymethods]
impl PyPauli {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyPauli { inner: text.parse().map_err(py_err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn weight(&self) -> usize {
        self.inner.weight()
    }

    fn commutes(&self, other: &PyPauli) -> PyResult<bool> {
        self.inner.commutes(&other.inner).map_err(py_err)
    }

    fn __mul__(&self, other: &PyPauli) -> PyResult<PyPauli> {
        Ok(PyPauli { inner: self.inner.try_mul(&other.inner).map_err(py_err)? })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Pauli('{}')", self.inner)
    }
}

/// A stabilizer code from one of the built-in families.
#[pyclass(name = "Code", frozen)]
struct PyCode {
    inner: StabilizerCode,
}

#[pymethods]
impl PyCode {
    /// `family` is one of "repetition", "toric2d", "toric3d_z".
    #[new]
    fn new(family: &str, size: usize) -> PyResult<Self> {
        let family: CodeFamily = family.parse().map_err(py_err)?;
        Ok(PyCode { inner: CodeId::new(family, size).build().map_err(py_err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn num_checks(&self) -> usize {
        self.inner.num_checks()
    }

    #[getter]
    fn num_logical(&self) -> usize {
        self.inner.num_logical()
    }

    /// Syndrome bits as a "0"/"1" string.
    fn syndrome(&self, error: &PyPauli) -> PyResult<String> {
        Ok(self.inner.syndrome(&error.inner).map_err(py_err)?.to_string())
    }

    /// The table correction for a valid syndrome.
    fn correction(&self, syndrome: &str) -> PyResult<PyPauli> {
        let s = BitVec::parse(syndrome).map_err(py_err)?;
        Ok(PyPauli { inner: self.inner.correction(&s).map_err(py_err)? })
    }

    fn is_correctable(&self, error: &PyPauli) -> PyResult<bool> {
        self.inner.is_correctable(&error.inner).map_err(py_err)
    }

    /// Repaired syndrome for raw measurement outcomes.
    fn syndrome_repair(&self, outcomes: &str) -> PyResult<String> {
        let x = BitVec::parse(outcomes).map_err(py_err)?;
        Ok(self.inner.syndrome_repair(&x).map_err(py_err)?.to_string())
    }

    /// JSON description (checks, gauge generators, logicals, metachecks).
    fn describe(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.describe()).map_err(py_err)
    }
}

fn estimate_dict<'py>(py: Python<'py>, e: &FailureEstimate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("failures", e.failures)?;
    d.set_item("trials", e.trials)?;
    d.set_item("mean", e.mean)?;
    d.set_item("lo", e.lo)?;
    d.set_item("hi", e.hi)?;
    Ok(d)
}

/// Failure estimate for a memory run given as JSON (the trajectory-dump config schema).
#[pyfunction]
#[pyo3(signature = (config_json, workers=None))]
fn memory_failure<'py>(py: Python<'py>, config_json: &str, workers: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
    let cfg: MemoryRunConfig = serde_json::from_str(config_json).map_err(py_err)?;
    let est = py.detach(|| worker_pool(workers).and_then(|p| estimate_failure(&cfg, &p))).map_err(py_err)?;
    estimate_dict(py, &est)
}

/// Failure estimate under iid X noise at rate `lam` and iid outcome flips at rate `eta`.
#[pyfunction]
#[pyo3(signature = (family, size, lam, eta, rounds, trials, seed=0, workers=None))]
#[allow(clippy::too_many_arguments)]
fn iid_failure<'py>(
    py: Python<'py>,
    family: &str,
    size: usize,
    lam: f64,
    eta: f64,
    rounds: usize,
    trials: usize,
    seed: u64,
    workers: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = MemoryRunConfig {
        code: CodeId::new(family.parse().map_err(py_err)?, size),
        noise: NoiseModelSpec::IidLocal { lambda: lam, pauli: PauliSector::X },
        flips: if eta > 0.0 { FlipModelSpec::Iid { eta } } else { FlipModelSpec::None },
        rounds,
        trials,
        seed,
        initial_error: None,
    };
    let est = py.detach(|| worker_pool(workers).and_then(|p| estimate_failure(&cfg, &p))).map_err(py_err)?;
    estimate_dict(py, &est)
}

/// Runs the sweep of a TOML experiment file's text and returns the CSV.
#[pyfunction]
#[pyo3(signature = (config_toml, workers=None))]
fn run_sweep(py: Python<'_>, config_toml: &str, workers: Option<usize>) -> PyResult<String> {
    let cfg = ExperimentConfig::parse(config_toml).map_err(py_err)?;
    py.detach(|| {
        let grid = cfg.grid()?;
        let pool = worker_pool(workers)?;
        let pf = cfg.bounds.as_ref().map(|b| b.functions()).transpose()?;
        let rows = sweep(&grid, &pool, pf.as_ref(), |_| Ok(()))?;
        rows_to_csv(&rows, pf.is_some())
    })
    .map_err(py_err)
}

/// Every oracle check; one dict per report.
#[pyfunction]
#[pyo3(signature = (seed=0))]
fn verify_all<'py>(py: Python<'py>, seed: u64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let reports = py.detach(|| verify::run_all(seed)).map_err(py_err)?;
    reports
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("proposition", &r.proposition)?;
            d.set_item("instance", &r.instance)?;
            d.set_item("pass", r.pass)?;
            d.set_item("instances", r.instances)?;
            d.set_item("violations", r.violations)?;
            d.set_item("lhs", r.lhs)?;
            d.set_item("rhs", r.rhs)?;
            Ok(d)
        })
        .collect()
}

/// `min(1, n(δ1+δ2) + δ3)`.
#[pyfunction]
fn lifetime_bound(n_rounds: usize, delta1: f64, delta2: f64, delta3: f64) -> f64 {
    bounds::lifetime_bound(n_rounds, delta1, delta2, delta3)
}

#[pymodule]
fn singleshot(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", VERSION)?;
    m.add_class::<PyPauli>()?;
    m.add_class::<PyCode>()?;
    m.add_function(wrap_pyfunction!(memory_failure, m)?)?;
    m.add_function(wrap_pyfunction!(iid_failure, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    m.add_function(wrap_pyfunction!(lifetime_bound, m)?)?;
    Ok(())
}
