//! Python module `belltide`: protocols, correlators and the optimizer.

use std::f64::consts::FRAC_PI_4;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use belltide::correlators::{self, ScenarioKind};
use belltide::optimizer::{self, Crossing};
use belltide::protocols::{self, AncillaState, QuadratureSpec};
use belltide::qcore::StateVector;

fn err(e: belltide::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kind(name: &str) -> PyResult<ScenarioKind> {
    name.parse().map_err(err)
}

#[pyclass(name = "OptimizerConfig", from_py_object)]
#[derive(Clone)]
pub struct PyOptimizerConfig {
    #[pyo3(get, set)]
    pub grid_points_per_dim: usize,
    #[pyo3(get, set)]
    pub restarts: usize,
    #[pyo3(get, set)]
    pub simplex_tolerance: f64,
    #[pyo3(get, set)]
    pub max_iterations: usize,
    #[pyo3(get, set)]
    pub rng_seed: u64,
    #[pyo3(get, set)]
    pub grid_seed_cap: usize,
    #[pyo3(get, set)]
    pub grid_refinements: usize,
}

impl From<optimizer::OptimizerConfig> for PyOptimizerConfig {
    fn from(c: optimizer::OptimizerConfig) -> Self {
        Self {
            grid_points_per_dim: c.grid_points_per_dim,
            restarts: c.restarts,
            simplex_tolerance: c.simplex_tolerance,
            max_iterations: c.max_iterations,
            rng_seed: c.rng_seed,
            grid_seed_cap: c.grid_seed_cap,
            grid_refinements: c.grid_refinements,
        }
    }
}

impl PyOptimizerConfig {
    fn inner(&self) -> optimizer::OptimizerConfig {
        optimizer::OptimizerConfig {
            grid_points_per_dim: self.grid_points_per_dim,
            restarts: self.restarts,
            simplex_tolerance: self.simplex_tolerance,
            max_iterations: self.max_iterations,
            rng_seed: self.rng_seed,
            grid_seed_cap: self.grid_seed_cap,
            grid_refinements: self.grid_refinements,
        }
    }
}

fn config_or_default(c: Option<PyOptimizerConfig>) -> optimizer::OptimizerConfig {
    c.map(|c| c.inner()).unwrap_or_default()
}

#[pymethods]
impl PyOptimizerConfig {
    #[new]
    #[pyo3(signature = (grid_points_per_dim=5, restarts=20, simplex_tolerance=1e-10, max_iterations=2000, rng_seed=0, grid_seed_cap=optimizer::DEFAULT_GRID_SEED_CAP, grid_refinements=4))]
    fn new(
        grid_points_per_dim: usize,
        restarts: usize,
        simplex_tolerance: f64,
        max_iterations: usize,
        rng_seed: u64,
        grid_seed_cap: usize,
        grid_refinements: usize,
    ) -> PyResult<Self> {
        let c = Self {
            grid_points_per_dim,
            restarts,
            simplex_tolerance,
            max_iterations,
            rng_seed,
            grid_seed_cap,
            grid_refinements,
        };
        c.inner().validate().map_err(err)?;
        Ok(c)
    }

    /// Reduced grid and restarts.
    #[staticmethod]
    fn quick() -> Self {
        optimizer::OptimizerConfig::quick().into()
    }

    fn __repr__(&self) -> String {
        format!(
            "OptimizerConfig(grid_points_per_dim={}, restarts={}, simplex_tolerance={:e}, max_iterations={}, rng_seed={})",
            self.grid_points_per_dim, self.restarts, self.simplex_tolerance, self.max_iterations, self.rng_seed
        )
    }
}

/// One correlator at a fixed entanglement angle.
#[pyclass(name = "Scenario", frozen)]
pub struct PyScenario(correlators::Scenario);

#[pymethods]
impl PyScenario {
    #[new]
    fn new(kind_name: &str, theta: f64) -> PyResult<Self> {
        Ok(Self(
            correlators::Scenario::new(kind(kind_name)?, theta).map_err(err)?,
        ))
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().name()
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta()
    }

    /// `(name, kind)` for each free setting.
    fn layout(&self) -> Vec<(String, String)> {
        self.0
            .layout()
            .into_iter()
            .map(|p| (p.name, format!("{:?}", p.kind).to_lowercase()))
            .collect()
    }

    fn evaluate(&self, settings: Vec<f64>) -> PyResult<f64> {
        self.0.evaluate(&settings).map_err(err)
    }

    fn canonicalize(&self, settings: Vec<f64>) -> Vec<f64> {
        self.0.canonicalize(&settings).0
    }

    fn __repr__(&self) -> String {
        format!("Scenario('{}', theta={})", self.0.kind(), self.0.theta())
    }
}

#[pyclass(name = "CorrelatorResult", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyCorrelatorResult(correlators::CorrelatorResult);

#[pymethods]
impl PyCorrelatorResult {
    #[getter]
    fn scenario(&self) -> &'static str {
        self.0.scenario.kind().name()
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.scenario.theta()
    }

    #[getter]
    fn value(&self) -> f64 {
        self.0.value
    }

    #[getter]
    fn settings(&self) -> Vec<f64> {
        self.0.settings.0.clone()
    }

    #[getter]
    fn evaluations(&self) -> u64 {
        self.0.evaluations
    }

    #[getter]
    fn converged(&self) -> bool {
        self.0.converged
    }

    #[getter]
    fn peak_evaluated(&self) -> f64 {
        self.0.peak_evaluated
    }

    fn __repr__(&self) -> String {
        format!(
            "CorrelatorResult('{}', theta={}, value={}, converged={})",
            self.0.scenario.kind(),
            self.0.scenario.theta(),
            self.0.value,
            self.0.converged
        )
    }
}

#[pyclass(name = "SweepResult", frozen)]
pub struct PySweepResult(optimizer::SweepResult);

#[pymethods]
impl PySweepResult {
    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind.name()
    }

    #[getter]
    fn theta_grid(&self) -> Vec<f64> {
        self.0.theta_grid.clone()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values.clone()
    }

    #[getter]
    fn converged(&self) -> Vec<bool> {
        self.0.points.iter().map(|p| p.converged).collect()
    }

    #[getter]
    fn points(&self) -> Vec<PyCorrelatorResult> {
        self.0
            .points
            .iter()
            .cloned()
            .map(PyCorrelatorResult)
            .collect()
    }

    fn __len__(&self) -> usize {
        self.0.values.len()
    }
}

#[pyclass(name = "ProtocolRun", frozen)]
pub struct PyProtocolRun {
    run: protocols::ProtocolRun,
    target: StateVector,
}

#[pymethods]
impl PyProtocolRun {
    #[getter]
    fn scheme(&self) -> String {
        format!("{:?}", self.run.scheme)
    }

    #[getter]
    fn classical_bits(&self) -> u32 {
        self.run.classical_bits
    }

    /// `(outcome, probability)` per branch.
    #[getter]
    fn branches(&self) -> Vec<(String, f64)> {
        self.run
            .branches
            .iter()
            .map(|b| (b.outcome.to_string(), b.probability))
            .collect()
    }

    fn total_probability(&self) -> f64 {
        self.run.total_probability()
    }

    /// Fidelity of Bob's corrected state, averaged over outcomes.
    fn fidelity(&self) -> PyResult<f64> {
        self.run.fidelity(&self.target).map_err(err)
    }

    fn worst_branch_fidelity(&self) -> PyResult<f64> {
        self.run.worst_branch_fidelity(&self.target).map_err(err)
    }
}

fn ancilla(bloch: (f64, f64)) -> PyResult<AncillaState> {
    AncillaState::from_bloch(bloch.0, bloch.1).map_err(err)
}

#[pyfunction]
fn teleport_fidelity(theta: f64) -> PyResult<f64> {
    protocols::teleport_fidelity_closed(theta).map_err(err)
}

/// Haar quadrature of the teleportation fidelity.
#[pyfunction]
#[pyo3(signature = (theta, bands=2000, azimuths=8))]
fn teleport_fidelity_numeric(
    py: Python<'_>,
    theta: f64,
    bands: usize,
    azimuths: usize,
) -> PyResult<f64> {
    let spec = QuadratureSpec { bands, azimuths };
    py.detach(|| protocols::teleport_fidelity_numeric(theta, &spec))
        .map_err(err)
}

/// Teleports the qubit with Bloch angles `eta = (polar, azimuth)`.
#[pyfunction]
fn run_teleport(theta: f64, eta: (f64, f64)) -> PyResult<PyProtocolRun> {
    let e = ancilla(eta)?;
    Ok(PyProtocolRun {
        run: protocols::run_teleport(theta, &e).map_err(err)?,
        target: e.state(),
    })
}

#[pyfunction]
fn run_rsp_vn(theta: f64, phi: f64) -> PyResult<PyProtocolRun> {
    Ok(PyProtocolRun {
        run: protocols::run_rsp_vn(theta, phi).map_err(err)?,
        target: protocols::TargetSpec::new(theta, phi).map_err(err)?.state(),
    })
}

#[pyfunction]
#[pyo3(signature = (theta, phi, ancilla_bloch=(0.0, 0.0)))]
fn run_rsp_bell(theta: f64, phi: f64, ancilla_bloch: (f64, f64)) -> PyResult<PyProtocolRun> {
    Ok(PyProtocolRun {
        run: protocols::run_rsp_bell(theta, phi, &ancilla(ancilla_bloch)?).map_err(err)?,
        target: protocols::TargetSpec::new(theta, phi).map_err(err)?.state(),
    })
}

#[pyfunction]
fn chsh_teleport(
    theta: f64,
    eta1: (f64, f64),
    eta2: (f64, f64),
    n1: [f64; 3],
    n2: [f64; 3],
) -> PyResult<f64> {
    correlators::chsh_teleport(theta, &ancilla(eta1)?, &ancilla(eta2)?, n1, n2).map_err(err)
}

#[pyfunction]
fn chsh_rsp_vn(theta: f64, phi1: f64, phi2: f64, n1: [f64; 3], n2: [f64; 3]) -> PyResult<f64> {
    correlators::chsh_rsp_vn(theta, phi1, phi2, n1, n2).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (theta, phi1, phi2, n1, n2, ancilla_bloch=(0.0, 0.0)))]
fn chsh_rsp_bell(
    theta: f64,
    phi1: f64,
    phi2: f64,
    n1: [f64; 3],
    n2: [f64; 3],
    ancilla_bloch: (f64, f64),
) -> PyResult<f64> {
    correlators::chsh_rsp_bell_with_ancilla(theta, phi1, phi2, n1, n2, &ancilla(ancilla_bloch)?)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (scenario, theta, config=None))]
fn maximize(
    py: Python<'_>,
    scenario: &str,
    theta: f64,
    config: Option<PyOptimizerConfig>,
) -> PyResult<PyCorrelatorResult> {
    let s = correlators::Scenario::new(kind(scenario)?, theta).map_err(err)?;
    let cfg = config_or_default(config);
    py.detach(|| optimizer::maximize(&s, &cfg))
        .map(PyCorrelatorResult)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (scenario, theta_min=0.0, theta_max=FRAC_PI_4, steps=65, config=None, warm_start=true))]
fn sweep(
    py: Python<'_>,
    scenario: &str,
    theta_min: f64,
    theta_max: f64,
    steps: usize,
    config: Option<PyOptimizerConfig>,
    warm_start: bool,
) -> PyResult<PySweepResult> {
    let k = kind(scenario)?;
    let cfg = config_or_default(config);
    py.detach(|| optimizer::sweep_with(k, theta_min, theta_max, steps, &cfg, warm_start))
        .map(PySweepResult)
        .map_err(err)
}

/// Angle where the maximized correlator reaches `level`, or `None`.
#[pyfunction]
#[pyo3(signature = (scenario, level=2.0, config=None))]
fn find_crossing(
    py: Python<'_>,
    scenario: &str,
    level: f64,
    config: Option<PyOptimizerConfig>,
) -> PyResult<Option<f64>> {
    let k = kind(scenario)?;
    let cfg = config_or_default(config);
    let c = py
        .detach(|| optimizer::find_crossing(k, level, &cfg))
        .map_err(err)?;
    Ok(match c {
        Crossing::Found { theta, .. } => Some(theta),
        Crossing::NoCrossing { .. } => None,
    })
}

#[pymodule]
#[pyo3(name = "belltide")]
pub fn belltide_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("TSIRELSON", correlators::TSIRELSON)?;
    m.add(
        "SCENARIOS",
        ScenarioKind::ALL
            .iter()
            .map(|k| k.name())
            .collect::<Vec<_>>(),
    )?;
    m.add_class::<PyOptimizerConfig>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyCorrelatorResult>()?;
    m.add_class::<PySweepResult>()?;
    m.add_class::<PyProtocolRun>()?;
    m.add_function(wrap_pyfunction!(teleport_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(teleport_fidelity_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(run_teleport, m)?)?;
    m.add_function(wrap_pyfunction!(run_rsp_vn, m)?)?;
    m.add_function(wrap_pyfunction!(run_rsp_bell, m)?)?;
    m.add_function(wrap_pyfunction!(chsh_teleport, m)?)?;
    m.add_function(wrap_pyfunction!(chsh_rsp_vn, m)?)?;
    m.add_function(wrap_pyfunction!(chsh_rsp_bell, m)?)?;
    m.add_function(wrap_pyfunction!(maximize, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(find_crossing, m)?)?;
    Ok(())
}
