//! Python bindings: run experiments and render reports from Python.

use ltdesk::harness::{self, ExperimentConfig, Format, Report, EXPERIMENTS};
use ltdesk::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::ConfigInvalid(_) | Error::UnknownExperiment(_) | Error::InvalidContext(_) | Error::PrecisionTooLarge { .. } => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// `(name, description)` for every experiment.
#[pyfunction]
fn list_experiments() -> Vec<(String, String)> {
    EXPERIMENTS.iter().map(|(n, d)| (n.to_string(), d.to_string())).collect()
}

/// Runs one experiment and returns the JSON report. `config` is a JSON
/// object overlaid on the experiment defaults.
#[pyfunction]
#[pyo3(signature = (experiment, config = None, seed = None))]
fn run_experiment(experiment: &str, config: Option<&str>, seed: Option<u64>) -> PyResult<String> {
    let mut value: serde_json::Value = match config {
        Some(text) => serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?,
        None => serde_json::json!({}),
    };
    let obj = value.as_object_mut().ok_or_else(|| PyValueError::new_err("config must be a JSON object"))?;
    obj.insert("experiment".into(), experiment.into());
    if let Some(seed) = seed {
        obj.insert("seed".into(), seed.into());
    }
    let cfg = ExperimentConfig::from_json(&value).map_err(to_py)?;
    let report = harness::run(&cfg.experiment, &cfg).map_err(to_py)?;
    Ok(String::from_utf8(harness::emit(&report, Format::Json)).expect("reports are UTF-8"))
}

/// Re-renders a JSON report as `json`, `csv` or `text`.
#[pyfunction]
#[pyo3(signature = (report, format = "text"))]
fn emit(report: &str, format: &str) -> PyResult<String> {
    let format: Format = format.parse().map_err(to_py)?;
    let parsed: Report = serde_json::from_str(report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(String::from_utf8(harness::emit(&parsed, format)).expect("reports are UTF-8"))
}

#[pymodule]
fn ltdesk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SCHEMA_VERSION", harness::SCHEMA_VERSION)?;
    m.add_function(wrap_pyfunction!(list_experiments, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(emit, m)?)?;
    Ok(())
}
