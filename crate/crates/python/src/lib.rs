//! Python bindings: dispersion branches, envelope coefficients, growth
//! curves, and full validation runs, mirroring the `mmswave` CLI surface.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use mmswave::harness::{self, ScenarioConfig};
use mmswave::susceptibility::SusceptibilityModel;
use mmswave::{mms, modes, presets};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A rational susceptibility model (toy kernel or Lorentz oscillator).
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Model {
    inner: SusceptibilityModel,
}

#[pymethods]
impl Model {
    /// Toy kernel with denominator gamma - i a omega.
    #[staticmethod]
    fn toy(gamma: f64, a: f64) -> PyResult<Self> {
        Ok(Model {
            inner: SusceptibilityModel::toy(gamma, a).map_err(err)?,
        })
    }

    /// Lorentz oscillator with denominator a omega^2 + i b omega + c.
    #[staticmethod]
    fn lorentz(a: f64, b: f64, c: f64) -> PyResult<Self> {
        Ok(Model {
            inner: SusceptibilityModel::lorentz(a, b, c).map_err(err)?,
        })
    }

    fn chi_hat(&self, omega: Complex64) -> PyResult<Complex64> {
        self.inner.chi_hat(omega).map_err(err)
    }

    fn chi_derivs(&self, omega: Complex64) -> PyResult<(Complex64, Complex64)> {
        self.inner.chi_derivs(omega).map_err(err)
    }

    fn n_squared(&self, omega: Complex64) -> PyResult<Complex64> {
        self.inner.n_squared(omega).map_err(err)
    }

    /// All complex dispersion roots omega(k).
    fn dispersion_roots(&self, k: f64) -> PyResult<Vec<Complex64>> {
        modes::roots(&modes::dispersion_poly(&self.inner, k)).map_err(err)
    }

    fn label(&self) -> &'static str {
        self.inner.label()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// The resolved forward branch at a carrier wavenumber.
#[pyclass(frozen)]
struct Branch {
    #[pyo3(get)]
    k0: f64,
    #[pyo3(get)]
    omega0: Complex64,
    #[pyo3(get)]
    vg: Complex64,
    #[pyo3(get)]
    omega_3k: Complex64,
    #[pyo3(get)]
    vg_3k: Complex64,
}

#[pymethods]
impl Branch {
    fn __repr__(&self) -> String {
        format!(
            "Branch(k0={}, omega0={}, vg={}, omega_3k={}, vg_3k={})",
            self.k0, self.omega0, self.vg, self.omega_3k, self.vg_3k
        )
    }
}

/// Envelope-equation coefficients for one branch.
#[pyclass(frozen)]
struct Coefficients {
    #[pyo3(get)]
    alpha: Complex64,
    #[pyo3(get)]
    beta: Complex64,
    #[pyo3(get)]
    c1: Complex64,
    #[pyo3(get)]
    c2: Complex64,
    #[pyo3(get)]
    d2: Complex64,
    #[pyo3(get)]
    a1: f64,
    #[pyo3(get)]
    a2: f64,
    #[pyo3(get)]
    posedness: String,
}

#[pymethods]
impl Coefficients {
    fn __repr__(&self) -> String {
        format!(
            "Coefficients(a1={}, a2={}, posedness={})",
            self.a1, self.a2, self.posedness
        )
    }
}

/// Resolve the forward dispersion branch at carrier k0.
#[pyfunction]
fn branch_at(model: &Model, k0: f64) -> PyResult<Branch> {
    let b = modes::branch_at(&model.inner, k0).map_err(err)?;
    Ok(Branch {
        k0: b.k0,
        omega0: b.omega0,
        vg: b.vg,
        omega_3k: b.omega_3k,
        vg_3k: b.vg_3k,
    })
}

/// Envelope coefficients (alpha, beta, c1, c2, d2, growth a1/a2) at k0.
#[pyfunction]
fn coefficients(model: &Model, k0: f64) -> PyResult<Coefficients> {
    let b = modes::branch_at(&model.inner, k0).map_err(err)?;
    let c = mms::compute_coefficients(&model.inner, &b).map_err(err)?;
    let posedness = match mms::classify(&c) {
        mms::Posedness::WellPosed => "well_posed",
        mms::Posedness::IllPosed => "ill_posed",
        mms::Posedness::Marginal => "marginal",
    };
    Ok(Coefficients {
        alpha: c.alpha,
        beta: c.beta,
        c1: c.c1,
        c2: c.c2,
        d2: c.d2,
        a1: c.a1,
        a2: c.a2,
        posedness: posedness.to_string(),
    })
}

/// Growth-curve values Re lambda(k) = a1 k^2 + a2 k at the given points.
#[pyfunction]
fn growth_curve(model: &Model, k0: f64, ks: Vec<f64>) -> PyResult<Vec<f64>> {
    let b = modes::branch_at(&model.inner, k0).map_err(err)?;
    let c = mms::compute_coefficients(&model.inner, &b).map_err(err)?;
    Ok(mms::growth_curve(&c, &ks))
}

/// Names of the shipped validation scenarios.
#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    presets::PRESET_NAMES.to_vec()
}

/// The configuration of a shipped scenario, as a JSON string.
#[pyfunction]
fn preset_config(name: &str) -> PyResult<String> {
    let config = presets::preset(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown preset {name}")))?;
    serde_json::to_string_pretty(&config).map_err(err)
}

/// Run a validation scenario from a JSON configuration string; returns the
/// report as a JSON string. When `out` is given, the report and field CSVs
/// are also written there.
#[pyfunction]
#[pyo3(signature = (config_json, out=None))]
fn simulate(config_json: &str, out: Option<&str>) -> PyResult<String> {
    let config: ScenarioConfig = serde_json::from_str(config_json).map_err(err)?;
    let run = harness::run_scenario(&config).map_err(err)?;
    if let Some(dir) = out {
        harness::export_report(&run, std::path::Path::new(dir)).map_err(err)?;
    }
    serde_json::to_string_pretty(&run.report).map_err(err)
}

/// Run a shipped preset end to end; returns the report as a JSON string.
#[pyfunction]
#[pyo3(signature = (name, out=None))]
fn run_preset(name: &str, out: Option<&str>) -> PyResult<String> {
    let config = presets::preset(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown preset {name}")))?;
    let json = serde_json::to_string(&config).map_err(err)?;
    simulate(&json, out)
}

#[pymodule]
fn mmswave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Branch>()?;
    m.add_class::<Coefficients>()?;
    m.add_function(wrap_pyfunction!(branch_at, m)?)?;
    m.add_function(wrap_pyfunction!(coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(growth_curve, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset_config, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    Ok(())
}
