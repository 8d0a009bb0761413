//! A fully resolved experiment: geometry, data, ε values, mesh and solver
//! settings.

use serde::{Deserialize, Serialize};

use defeature_core::fem::ProblemData;
use defeature_core::geometry::ExtensionChoice;
use defeature_core::{Family, MeshOptions, Params, SolverOptions};

use crate::error::{HarnessError, Result};
use crate::expr::Expr;

/// Problem data as expressions in `x, y, z, eps`; `f_neg` and `f_ext` default to `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    #[serde(default = "zero")]
    pub f: String,
    #[serde(default)]
    pub f_neg: Option<String>,
    #[serde(default)]
    pub f_ext: Option<String>,
    #[serde(default = "zero")]
    pub h: String,
    #[serde(default = "zero")]
    pub g: String,
    #[serde(default = "zero")]
    pub g_feature: String,
    #[serde(default = "zero")]
    pub g0: String,
    #[serde(default = "zero")]
    pub g_tilde: String,
}

fn zero() -> String {
    String::from("0")
}

impl Default for DataSpec {
    fn default() -> Self {
        DataSpec { f: zero(), f_neg: None, f_ext: None, h: zero(), g: zero(), g_feature: zero(), g0: zero(), g_tilde: zero() }
    }
}

impl DataSpec {
    pub fn with_f(f: &str) -> Self {
        DataSpec { f: f.into(), ..Default::default() }
    }

    pub fn compile(&self) -> Result<CompiledData> {
        let p = |s: &str| Expr::parse(s).map_err(HarnessError::from);
        let f = p(&self.f)?;
        Ok(CompiledData {
            f_neg: match &self.f_neg {
                Some(s) => p(s)?,
                None => f.clone(),
            },
            f_ext: match &self.f_ext {
                Some(s) => p(s)?,
                None => f.clone(),
            },
            f,
            h: p(&self.h)?,
            g: p(&self.g)?,
            g_feature: p(&self.g_feature)?,
            g0: p(&self.g0)?,
            g_tilde: p(&self.g_tilde)?,
        })
    }
}

/// Parsed data expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledData {
    pub f: Expr,
    pub f_neg: Expr,
    pub f_ext: Expr,
    pub h: Expr,
    pub g: Expr,
    pub g_feature: Expr,
    pub g0: Expr,
    pub g_tilde: Expr,
}

impl CompiledData {
    /// Data functions with `eps` bound.
    pub fn bind(&self, eps: f64) -> ProblemData {
        ProblemData {
            f: self.f.bind(eps),
            f_neg: self.f_neg.bind(eps),
            f_ext: self.f_ext.bind(eps),
            h: self.h.bind(eps),
            g: self.g.bind(eps),
            g_feature: self.g_feature.bind(eps),
            g0: self.g0.bind(eps),
            g_tilde: self.g_tilde.bind(eps),
        }
    }
}

/// Reference values of one case or sweep, used by the acceptance run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub estimator: Option<f64>,
    pub error: Option<f64>,
    pub effectivity: Option<f64>,
    /// Convergence rate in ε of error and estimator.
    pub slope: Option<f64>,
}

/// One experiment ready to run.
#[derive(Clone, Debug)]
pub struct CaseSpec {
    pub id: String,
    pub title: String,
    pub family: Family,
    pub extension: ExtensionChoice,
    /// Feature sizes, strictly decreasing.
    pub eps: Vec<f64>,
    pub data: DataSpec,
    pub compiled: CompiledData,
    pub mesh: MeshOptions,
    /// Uniform refinement of the reference problem pair used for the error.
    pub reference_factor: usize,
    pub solver: SolverOptions,
    /// Oscillation projection degree.
    pub m: usize,
    pub expected: Expected,
}

impl CaseSpec {
    pub fn new(id: &str, title: &str, family: Family, eps: Vec<f64>, data: DataSpec) -> Result<CaseSpec> {
        let compiled = data.compile()?;
        Ok(CaseSpec {
            id: id.into(),
            title: title.into(),
            family,
            extension: ExtensionChoice::Identity,
            eps,
            data,
            compiled,
            mesh: MeshOptions::for_dim(family.dim()),
            reference_factor: 1,
            solver: SolverOptions::default(),
            m: 1,
            expected: Expected::default(),
        })
    }

    pub fn params(&self, eps: f64) -> Params {
        Params::new(eps).with_extension(self.extension)
    }

    /// Re-parse the data after editing [`CaseSpec::data`].
    pub fn recompile(&mut self) -> Result<()> {
        self.compiled = self.data.compile()?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps.is_empty() {
            return Err(HarnessError::Config(format!("case `{}` has no ε value", self.id)));
        }
        if let Some(e) = self.eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(HarnessError::Config(format!("case `{}`: ε = {e} is not positive", self.id)));
        }
        if self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(HarnessError::Config(format!("case `{}`: ε list must be strictly decreasing", self.id)));
        }
        if self.reference_factor == 0 {
            return Err(HarnessError::Config(format!("case `{}`: reference factor must be ≥ 1", self.id)));
        }
        if !(self.solver.tol > 0.0) || self.solver.max_iter == 0 {
            return Err(HarnessError::Config(format!("case `{}`: solver tolerance and iteration cap must be positive", self.id)));
        }
        self.mesh.validate().map_err(HarnessError::core(crate::error::Stage::Mesh))
    }
}
