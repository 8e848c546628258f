//! Python bindings. Structured results cross the boundary as JSON strings;
//! the `vortexkit` Python package decodes them.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ::vortexkit::harness::{self, config, io, LeapfrogParams, Scenario};
use ::vortexkit::metrics::{self, SignedMeasure};
use ::vortexkit::point_vortex::{self, PointVortexState};
use ::vortexkit::{Domain, Error, Harmonics, Vec2};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::InvalidInput(_) | Error::MassMismatch { .. } => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn measure(atoms: Vec<(f64, f64, f64)>) -> SignedMeasure {
    SignedMeasure::new(atoms.into_iter().map(|(x, y, w)| (Vec2::new(x, y), w)).collect())
}

/// TOML text of the standard two-patch unit-disk scenario.
#[pyfunction]
#[pyo3(signature = (eps=0.05))]
fn standard_scenario(eps: f64) -> String {
    Scenario::standard(eps).to_toml()
}

/// Runs a scenario given as TOML text; returns the run record as JSON.
#[pyfunction]
fn run(py: Python<'_>, scenario_toml: &str) -> PyResult<String> {
    let s = Scenario::from_toml(scenario_toml).map_err(to_py)?;
    let record = py.detach(|| harness::run(&s)).map_err(to_py)?;
    json(&record)
}

/// Frames of a JSON run record rendered as the CSV written by the CLI.
#[pyfunction]
fn frames_csv(record_json: &str) -> PyResult<String> {
    let r: harness::RunRecord = serde_json::from_str(record_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(io::frames_to_csv(&r.frames))
}

/// Oracle report for the `[domain]` table of a scenario (or a bare domain file).
#[pyfunction]
fn validate(py: Python<'_>, config_toml: &str) -> PyResult<String> {
    #[derive(serde::Deserialize)]
    struct File {
        domain: config::DomainConfig,
    }
    let f: File = toml::from_str(config_toml).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let domain = f.domain.build().map_err(to_py)?;
    let report = py.detach(|| harness::validate(&domain)).map_err(to_py)?;
    json(&report)
}

/// Leapfrog demo; `params_toml` overrides the default parameter set.
#[pyfunction]
#[pyo3(signature = (params_toml=None))]
fn leapfrog(params_toml: Option<&str>) -> PyResult<String> {
    let p = match params_toml {
        Some(t) => toml::from_str::<LeapfrogParams>(t).map_err(|e| PyValueError::new_err(e.to_string()))?,
        None => LeapfrogParams::default(),
    };
    let out = harness::demo_leapfrog(&p).map_err(to_py)?;
    json(&out)
}

/// Signed `W₁` between two atomic measures given as `(x, y, weight)` triples.
#[pyfunction]
fn w1_signed(f: Vec<(f64, f64, f64)>, g: Vec<(f64, f64, f64)>) -> PyResult<f64> {
    metrics::w1_signed(&measure(f), &measure(g)).map_err(to_py)
}

/// Kirchhoff–Routh velocities of point vortices in the disk `|x − c| < r`.
#[pyfunction]
#[pyo3(signature = (positions, strengths, radius=1.0, center=(0.0, 0.0), delta=1e-3))]
fn disk_vortex_velocities(
    positions: Vec<(f64, f64)>,
    strengths: Vec<f64>,
    radius: f64,
    center: (f64, f64),
    delta: f64,
) -> PyResult<Vec<(f64, f64)>> {
    let domain = Domain::disk(Vec2::new(center.0, center.1), radius, 64).map_err(to_py)?;
    let h = Harmonics::new(domain).map_err(to_py)?;
    let state = PointVortexState::new(positions.into_iter().map(|(x, y)| Vec2::new(x, y)).collect(), strengths, vec![])
        .map_err(to_py)?;
    let v = point_vortex::kr_rhs(&state, &h, delta).map_err(to_py)?;
    Ok(v.into_iter().map(|v| (v.x, v.y)).collect())
}

#[pymodule]
fn vortexkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(standard_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(frames_csv, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(leapfrog, m)?)?;
    m.add_function(wrap_pyfunction!(w1_signed, m)?)?;
    m.add_function(wrap_pyfunction!(disk_vortex_velocities, m)?)?;
    Ok(())
}
