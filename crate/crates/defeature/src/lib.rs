//! Verification harness for the defeaturing error estimator: experiment
//! catalog, TOML configuration, sweeps, CSV/JSON reports and mesh dumps.

pub mod case;
pub mod catalog;
pub mod check;
pub mod config;
pub mod dump;
pub mod error;
pub mod expr;
pub mod report;
pub mod run;

pub use case::{CaseSpec, DataSpec};
pub use error::{HarnessError, Result, Stage};
pub use report::{emit_report, Format};
pub use run::{fit_rate, run_case, run_points, run_sweep, CaseReport, SweepReport};
