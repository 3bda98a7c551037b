//! Stable JSON-facing layer shared by the CLI and the Python bindings:
//! algebra documents, compose/classify reports, and the operations that
//! produce them from spec strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classify::{classify, Summand};
use crate::composites::{canonical_tensor, composite_axiom_suite, fixed_point_composite, CompositeResult};
use crate::config::Config;
use crate::constructors::{build_spec, parse_spec, BuiltAlgebra, EmbeddingKind};
use crate::error::{Error, Result};
use crate::jordan_core::EjcAlgebra;
use crate::linalg::RealSubspace;
use crate::star_algebra::{AlgElement, ElementJson, StarAlgebra};

/// JSON shape of a built algebra: ambient blocks, Hermitian basis, label.
#[derive(Serialize, Deserialize)]
pub struct AlgebraJson {
    pub ambient: StarAlgebra,
    pub basis: Vec<ElementJson>,
    pub label: Option<String>,
}

impl AlgebraJson {
    pub fn from_algebra(a: &EjcAlgebra) -> AlgebraJson {
        let basis = (0..a.dim()).map(|i| a.basis_element(i).value.to_json()).collect();
        AlgebraJson {
            ambient: a.ambient().clone(),
            basis,
            label: a.label().map(str::to_string),
        }
    }

    /// Reconstruct and re-validate; the basis must span a closed Jordan
    /// subalgebra, exactly as if it had been built here.
    pub fn to_algebra(&self, config: &Config) -> Result<EjcAlgebra> {
        let ambient = StarAlgebra::new(self.ambient.blocks.clone())?;
        let mut rows = Vec::with_capacity(self.basis.len());
        for e in &self.basis {
            let v = AlgElement::from_json(&ambient, e)?;
            v.check_hermitian(config.tol_herm)?;
            rows.push(v.flatten_herm());
        }
        let subspace = RealSubspace::span(&rows, config.tol_rank)?;
        let alg = EjcAlgebra::new(ambient, subspace, self.label.clone(), config)?;
        alg.validate_closed(config)?;
        Ok(alg)
    }
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub classification: String,
    pub dimension: usize,
    pub rank: usize,
    pub summands: Vec<Summand>,
}

#[derive(Serialize)]
pub struct CheckJson {
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Serialize)]
pub struct ComposeReport {
    pub classification: String,
    pub dimension: usize,
    pub rank: usize,
    pub iterations: usize,
    pub left: String,
    pub right: String,
    pub method: String,
    pub checks: BTreeMap<&'static str, CheckJson>,
    #[serde(skip)]
    pub all_checks_passed: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum ComposeMethod {
    Closure,
    FixedPoint,
}

impl ComposeMethod {
    pub fn parse(s: &str) -> Result<ComposeMethod> {
        match s.to_ascii_lowercase().as_str() {
            "closure" => Ok(ComposeMethod::Closure),
            "fixedpoint" => Ok(ComposeMethod::FixedPoint),
            _ => Err(Error::ParseError(format!(
                "unknown method '{s}' (expected closure or fixedpoint)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ComposeMethod::Closure => "closure",
            ComposeMethod::FixedPoint => "fixedpoint",
        }
    }
}

pub fn parse_embedding(s: &str) -> Result<EmbeddingKind> {
    match s.to_ascii_lowercase().as_str() {
        "std" | "standard" => Ok(EmbeddingKind::Standard),
        "universal" => Ok(EmbeddingKind::Universal),
        _ => Err(Error::ParseError(format!(
            "unknown embedding '{s}' (expected std or universal)"
        ))),
    }
}

/// Build an algebra from a spec string (default embedding: standard).
pub fn build_report(spec: &str, config: &Config) -> Result<AlgebraJson> {
    let built = build_spec(&parse_spec(spec, EmbeddingKind::Standard)?, config)?;
    Ok(AlgebraJson::from_algebra(&built.algebra))
}

pub fn compose_pair(
    left: &BuiltAlgebra,
    right: &BuiltAlgebra,
    method: ComposeMethod,
    config: &Config,
) -> Result<CompositeResult> {
    match method {
        ComposeMethod::Closure => canonical_tensor(&left.algebra, &right.algebra, config),
        ComposeMethod::FixedPoint => {
            let (Some(pa), Some(pb)) = (&left.involution, &right.involution) else {
                return Err(Error::NotInvolutiveObject);
            };
            fixed_point_composite(&left.algebra, pa, &right.algebra, pb, config)
        }
    }
}

/// Compose two specs, classify the result, and run a small axiom battery
/// on the composite.
pub fn compose_report(
    left: &str,
    right: &str,
    embedding: EmbeddingKind,
    method: ComposeMethod,
    config: &Config,
) -> Result<ComposeReport> {
    let left_built = build_spec(&parse_spec(left, embedding)?, config)?;
    let right_built = build_spec(&parse_spec(right, embedding)?, config)?;
    let result = compose_pair(&left_built, &right_built, method, config)?;
    let report = classify(&result.algebra, config)?;
    let axioms = composite_axiom_suite(
        &result,
        &left_built.algebra,
        &right_built.algebra,
        20,
        1e-9,
        config,
    )?;
    let mut checks = BTreeMap::new();
    for c in &axioms.checks {
        checks.insert(c.name, CheckJson { passed: c.passed, worst: c.worst, tolerance: c.tolerance });
    }
    Ok(ComposeReport {
        classification: report.canonical_label,
        dimension: report.dimension,
        rank: report.rank,
        iterations: result.iterations,
        left: left_built.algebra.label().unwrap_or(left).to_string(),
        right: right_built.algebra.label().unwrap_or(right).to_string(),
        method: method.name().to_string(),
        all_checks_passed: axioms.all_pass(),
        checks,
    })
}

/// Classify a built algebra into the JSON report shape.
pub fn classify_report(algebra: &EjcAlgebra, config: &Config) -> Result<ClassifyReport> {
    let report = classify(algebra, config)?;
    Ok(ClassifyReport {
        classification: report.canonical_label,
        dimension: report.dimension,
        rank: report.rank,
        summands: report.summands,
    })
}

/// Classify a spec string.
pub fn classify_spec(spec: &str, config: &Config) -> Result<ClassifyReport> {
    let built = build_spec(&parse_spec(spec, EmbeddingKind::Standard)?, config)?;
    classify_report(&built.algebra, config)
}

/// Classify an algebra document (the `build` output format).
pub fn classify_json(text: &str, config: &Config) -> Result<ClassifyReport> {
    let doc: AlgebraJson = serde_json::from_str(text)
        .map_err(|e| Error::ParseError(format!("invalid algebra JSON: {e}")))?;
    classify_report(&doc.to_algebra(config)?, config)
}
