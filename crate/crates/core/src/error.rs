use alloc::string::String;

/// Errors raised by geometry construction, meshing, solving and estimation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("resolution too coarse: {detail} (minimum resolution {min_resolution})")]
    ResolutionTooCoarse { detail: String, min_resolution: usize },
    #[error("unknown boundary tag: {0}")]
    UnknownTag(String),
    #[error("solver failure: {reason} (relative residual {residual:e})")]
    SolverFailure { reason: String, residual: f64 },
    #[error("gauge required: the system has no Dirichlet constraint and no pure-Neumann flag")]
    GaugeRequired,
    #[error("mesh incompatibility: {0}")]
    MeshIncompatibility(String),
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = core::result::Result<T, Error>;
