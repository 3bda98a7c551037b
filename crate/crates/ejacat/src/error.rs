use thiserror::Error;

/// Errors surfaced by construction, analysis and composition routines.
///
/// Exit-code mapping for the CLI lives in the binary crate: parse failures
/// exit 2, guardrail refusals exit 3, everything else that fails exits 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: relative defect {defect:.3e}")]
    NotHermitian { defect: f64 },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("element does not belong to this algebra")]
    ParentMismatch,
    #[error("map is not involutive: relative defect {defect:.3e}")]
    NotInvolutive { defect: f64 },
    #[error("map is not *-linear: relative defect {defect:.3e}")]
    NotStarLinear { defect: f64 },
    #[error("jordan product left the subspace: residual {residual:.3e}")]
    ClosureViolation { residual: f64 },
    #[error("element is not a projection: defect {defect:.3e}")]
    NotProjection { defect: f64 },
    #[error("jordan frame search failed after {retries} random draws")]
    FrameSearchFailed { retries: usize },
    #[error("invalid algebra spec: {0}")]
    InvalidSpec(String),
    #[error("jordan closure failed to stabilize below the ambient dimension")]
    NoConvergence,
    #[error("involution does not fix the algebra: residual {residual:.3e}")]
    InvolutionDoesNotFix { residual: f64 },
    #[error("order automorphism tag not supported for extension: {0}")]
    UnsupportedTag(String),
    #[error("no JNW family matches rank {rank}, dimension {dim}")]
    UnknownFingerprint { rank: usize, dim: usize },
    #[error("central element draws were degenerate after {retries} attempts")]
    DegenerateDraw { retries: usize },
    #[error("conditioning on an effect with probability {p:.3e}")]
    ZeroProbabilityConditioning { p: f64 },
    #[error("ambient Hermitian dimension {dim} exceeds guardrail {limit} (pass force to override)")]
    GuardrailExceeded { dim: usize, limit: usize },
    #[error("hermitian eigensolver broke down on a {n}×{n} matrix")]
    EigenBreakdown { n: usize },
    #[error("object is not involutive: fixed points differ from subspace")]
    NotInvolutiveObject,
    #[error("maps are not composable: {0}")]
    NotComposable(String),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
