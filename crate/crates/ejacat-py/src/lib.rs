//! Python bindings: thin JSON-string wrappers over the library's API
//! layer, so Python sees exactly the same documents as the CLI.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ejacat::api::{
    build_report, classify_json, classify_spec, compose_report, parse_embedding, ComposeMethod,
};
use ejacat::category::{assess_morphism, LinearMapJson, MorphismCategory};
use ejacat::constructors::{build_spec, parse_spec, EmbeddingKind};
use ejacat::suites::run_suite;
use ejacat::{Config, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::ParseError(_) | Error::InvalidSpec(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(format!("serialization: {e}"))
}

fn config_for(seed: Option<u64>, force: bool) -> Config {
    let mut config = Config::with_seed(seed.unwrap_or(7));
    config.force = force;
    config
}

/// Library version string.
#[pyfunction]
fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Build an algebra from a spec string; returns the algebra document JSON.
#[pyfunction]
#[pyo3(signature = (spec, seed=None))]
fn build(spec: &str, seed: Option<u64>) -> PyResult<String> {
    let doc = build_report(spec, &config_for(seed, false)).map_err(py_err)?;
    serde_json::to_string(&doc).map_err(json_err)
}

/// Compose two specs and classify the result; returns the report JSON.
#[pyfunction]
#[pyo3(signature = (left, right, embedding="std", method="closure", seed=None, force=false))]
fn compose(
    left: &str,
    right: &str,
    embedding: &str,
    method: &str,
    seed: Option<u64>,
    force: bool,
) -> PyResult<String> {
    let config = config_for(seed, force);
    let kind = parse_embedding(embedding).map_err(py_err)?;
    let method = ComposeMethod::parse(method).map_err(py_err)?;
    let doc = compose_report(left, right, kind, method, &config).map_err(py_err)?;
    serde_json::to_string(&doc).map_err(json_err)
}

/// Classify a spec string or an algebra document (JSON text).
#[pyfunction]
#[pyo3(signature = (input, seed=None))]
fn classify(input: &str, seed: Option<u64>) -> PyResult<String> {
    let config = config_for(seed, false);
    let doc = if input.trim_start().starts_with('{') {
        classify_json(input, &config).map_err(py_err)?
    } else {
        classify_spec(input, &config).map_err(py_err)?
    };
    serde_json::to_string(&doc).map_err(json_err)
}

/// Run a named check suite; returns the suite report JSON.
#[pyfunction]
#[pyo3(signature = (suite, max_param=2, seed=None))]
fn verify(suite: &str, max_param: usize, seed: Option<u64>) -> PyResult<String> {
    let report = run_suite(suite, max_param, &config_for(seed, false)).map_err(py_err)?;
    serde_json::to_string(&report).map_err(json_err)
}

/// Assess a linear map (JSON document) as a morphism `src → dst` for a
/// category; returns `{category, passed, verdict}` JSON.
#[pyfunction]
#[pyo3(signature = (map_json, src, dst, category, seed=None))]
fn check_morphism(
    map_json: &str,
    src: &str,
    dst: &str,
    category: &str,
    seed: Option<u64>,
) -> PyResult<String> {
    let config = config_for(seed, false);
    let category = MorphismCategory::parse(category).map_err(py_err)?;
    let doc: LinearMapJson = serde_json::from_str(map_json)
        .map_err(|e| PyValueError::new_err(format!("invalid map JSON: {e}")))?;
    let phi = doc.to_map().map_err(py_err)?;
    let src_built =
        build_spec(&parse_spec(src, EmbeddingKind::Standard).map_err(py_err)?, &config)
            .map_err(py_err)?;
    let dst_built =
        build_spec(&parse_spec(dst, EmbeddingKind::Standard).map_err(py_err)?, &config)
            .map_err(py_err)?;
    let verdict =
        assess_morphism(&phi, &src_built, &dst_built, category, &config).map_err(py_err)?;
    let passed = match category {
        MorphismCategory::InvQm => {
            verdict.completely_positive && verdict.intertwiner.unwrap_or(false)
        }
        _ => verdict.relatively_cjp,
    };
    serde_json::to_string(&serde_json::json!({
        "category": category.name(),
        "passed": passed,
        "verdict": verdict,
    }))
    .map_err(json_err)
}

#[pymodule]
fn ejacat_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(version, m)?)?;
    m.add_function(wrap_pyfunction!(build, m)?)?;
    m.add_function(wrap_pyfunction!(compose, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(check_morphism, m)?)?;
    Ok(())
}
