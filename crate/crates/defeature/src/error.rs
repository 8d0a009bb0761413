use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::expr::ParseError;

/// Pipeline stage a core error is attributed to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Geometry,
    Mesh,
    ReferenceSolve,
    DefeaturedSolve,
    ExtensionSolve,
    AssembleUd,
    Defects,
    FluxResidual,
    Estimator,
    Error,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Geometry => "geometry",
            Stage::Mesh => "mesh",
            Stage::ReferenceSolve => "reference solve",
            Stage::DefeaturedSolve => "defeatured solve",
            Stage::ExtensionSolve => "extension solve",
            Stage::AssembleUd => "u_d assembly",
            Stage::Defects => "defects",
            Stage::FluxResidual => "flux residual",
            Stage::Estimator => "estimator",
            Stage::Error => "error norm",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{}: {source}", stage.name())]
    Core {
        stage: Stage,
        #[source]
        source: defeature_core::Error,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error("expression: {0}")]
    Expr(#[from] ParseError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Process exit code for an invalid configuration or input.
pub const EXIT_VALIDATION: i32 = 2;
/// Process exit code for a numerical (solver) failure.
pub const EXIT_SOLVER: i32 = 3;

impl HarnessError {
    pub fn core(stage: Stage) -> impl FnOnce(defeature_core::Error) -> HarnessError {
        move |source| HarnessError::Core { stage, source }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }

    /// Exit code of the command line: 3 for solver failures, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core { source: defeature_core::Error::SolverFailure { .. }, .. } => EXIT_SOLVER,
            _ => EXIT_VALIDATION,
        }
    }
}
