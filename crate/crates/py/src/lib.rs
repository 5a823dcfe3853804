//! Python module `rootsep`.
//!
//! Reports are returned as JSON strings in the same schema the command line
//! prints; callers decode them with `json.loads`.

use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use rootsep_cli::{
    cmd_bench, cmd_bounds, cmd_verify, parse_strategies, BenchParams, CliError, Potentials,
};
use rootsep_core::bounds::actual_weighted_product;
use rootsep_core::instance::{parse_instance, Instance as CoreInstance, InstanceDocument};
use rootsep_core::roots::roots_from_coefficients;
use rootsep_core::spectral::{self, Strategy};
use rootsep_core::{Complex64, PotentialVector, RootMultiset, WeightedRootGraph};

create_exception!(rootsep, InputError, PyValueError, "Malformed or out-of-range input.");
create_exception!(rootsep, InfeasibleError, PyValueError, "Potentials violate an edge constraint.");
create_exception!(rootsep, NumericError, PyArithmeticError, "A numeric routine failed.");

fn to_py(e: CliError) -> PyErr {
    let msg = e.to_string();
    match e {
        CliError::Input(_) => InputError::new_err(msg),
        CliError::Infeasible(_) => InfeasibleError::new_err(msg),
        CliError::Numeric(_) => NumericError::new_err(msg),
    }
}

fn core_err(e: rootsep_core::Error) -> PyErr {
    to_py(e.into())
}

fn potentials(strategy: &str, mu: Option<Vec<u32>>) -> PyResult<Potentials> {
    match mu {
        Some(mus) => Ok(Potentials::Explicit(PotentialVector::new(mus).map_err(core_err)?)),
        None => Ok(Potentials::Strategies(parse_strategies(strategy).map_err(to_py)?)),
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialize")
}

/// A validated instance: distinct roots with multiplicities and a weighted graph.
#[pyclass(frozen, module = "rootsep")]
struct Instance {
    inner: CoreInstance,
}

#[pymethods]
impl Instance {
    #[new]
    #[pyo3(signature = (roots, edges, multiplicities=None))]
    fn new(
        roots: Vec<Complex64>,
        edges: Vec<(usize, usize, u32)>,
        multiplicities: Option<Vec<u32>>,
    ) -> PyResult<Self> {
        let rm = match multiplicities {
            Some(m) => RootMultiset::new(roots, m),
            None => RootMultiset::simple(roots),
        }
        .map_err(core_err)?;
        let graph = WeightedRootGraph::new(rm.r(), edges).map_err(core_err)?;
        Ok(Self {
            inner: CoreInstance {
                roots: rm,
                graph,
                approximation: None,
            },
        })
    }

    /// Parses a `dmm-instance/1` document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_instance(text).map_err(core_err)?,
        })
    }

    fn to_json(&self) -> String {
        json(&InstanceDocument::from_instance(&self.inner.roots, &self.inner.graph))
    }

    #[getter]
    fn roots(&self) -> Vec<Complex64> {
        self.inner.roots.roots().to_vec()
    }

    #[getter]
    fn multiplicities(&self) -> Vec<u32> {
        self.inner.roots.multiplicities().to_vec()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize, u32)> {
        self.inner.graph.edges().iter().map(|e| (e.i, e.j, e.w)).collect()
    }

    #[getter]
    fn approximate(&self) -> bool {
        self.inner.is_approximate()
    }

    /// `log₂` of the weighted product of edge lengths.
    fn actual_log2(&self) -> f64 {
        actual_weighted_product(&self.inner.roots, &self.inner.graph)
    }

    fn nuclear_norm(&self) -> f64 {
        spectral::nuclear_norm(&self.inner.graph)
    }

    /// Potentials chosen by one strategy.
    fn potentials(&self, strategy: &str) -> PyResult<Vec<u32>> {
        let s: Strategy = strategy.parse().map_err(core_err)?;
        Ok(s.potentials(&self.inner.graph).map_err(core_err)?.mus().to_vec())
    }

    /// Every bound, as a `dmm-report/1` JSON string.
    #[pyo3(signature = (strategy="all", mu=None, tolerance=1e-6))]
    fn bounds(&self, strategy: &str, mu: Option<Vec<u32>>, tolerance: f64) -> PyResult<String> {
        let p = potentials(strategy, mu)?;
        Ok(json(&cmd_bounds(&self.inner, &p, tolerance).map_err(to_py)?))
    }

    /// Reduction replay and Hadamard checks, as a `dmm-report/1` JSON string.
    #[pyo3(signature = (strategy="all", mu=None, tolerance=1e-6))]
    fn verify(&self, strategy: &str, mu: Option<Vec<u32>>, tolerance: f64) -> PyResult<String> {
        let p = potentials(strategy, mu)?;
        Ok(json(&cmd_verify(&self.inner, &p, tolerance).map_err(to_py)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(r={}, edges={}, approximate={})",
            self.inner.roots.r(),
            self.inner.graph.edges().len(),
            self.inner.is_approximate()
        )
    }
}

/// Distinct roots and multiplicities of a polynomial, coefficients lowest degree first.
#[pyfunction]
fn roots(coefficients: Vec<Complex64>) -> PyResult<(Vec<Complex64>, Vec<u32>)> {
    let approx = roots_from_coefficients(&coefficients).map_err(core_err)?;
    Ok((
        approx.multiset.roots().to_vec(),
        approx.multiset.multiplicities().to_vec(),
    ))
}

/// Seeded sweep, returned as CSV text.
#[pyfunction(name = "bench")]
#[pyo3(signature = (seed=0, trials=500, r_min=2, r_max=6, w_max=6, tolerance=1e-6))]
fn run_bench(
    py: Python<'_>,
    seed: u64,
    trials: usize,
    r_min: usize,
    r_max: usize,
    w_max: u32,
    tolerance: f64,
) -> PyResult<String> {
    let params = BenchParams {
        seed,
        trials,
        r_min,
        r_max,
        w_max,
        tolerance,
    };
    py.detach(|| cmd_bench(&params)).map_err(to_py)
}

#[pymodule]
fn rootsep(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_function(wrap_pyfunction!(roots, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    m.add("InputError", m.py().get_type::<InputError>())?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add("NumericError", m.py().get_type::<NumericError>())?;
    Ok(())
}
