//! Geometry families, nested quadrilateral/hexahedral meshing, a Galerkin
//! Poisson solver and the a posteriori defeaturing error estimator.
//!
//! The crate is `no_std` with `alloc`; I/O, configuration and the command line
//! live in the `defeature` crate.

#![no_std]

extern crate alloc;

pub mod defeaturing;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod mesh;
pub mod quadrature;

/// A point of ℝ³; 2D geometry leaves the last coordinate at zero.
pub type Point = [f64; 3];

pub use defeaturing::{
    analyze, assemble_ud, c_sigma, clement_project, estimator, estimator_tilde, flux_residual, oscillation, sigma_defects,
    Analysis, AnalysisOptions, EstimatorReport, SigmaTrace,
};
pub use error::{Error, Result};
pub use fem::{flux_trace, h1_seminorm_diff, solve_poisson, solve_spd, ProblemData, ScalarField, SolverOptions};
pub use geometry::{build_domain, DomainDescription, Family, Params, Tag};
pub use mesh::{boundary_quadrature, generate_pair, MeshOptions, MeshPair};
