//! Experiment configuration: a TOML file of `key = value` lines grouped in
//! sections, one `[case.<name>]` section per experiment.
//!
//! ```toml
//! [output]
//! dir = "results"          # default "results"
//! formats = ["csv", "json"] # default ["csv"]
//! threads = 4               # sweep workers, 0 = all cores (default)
//! timing = true             # false writes runtime_s = 0 for byte-stable output
//! dump_mesh = false         # also write mesh and field dumps (see `dump`)
//!
//! [case.halfdisk]
//! catalog = "fig7.neg.halfdisk"  # start from a built-in case (optional)
//! eps = [0.01, 0.005, 0.0025]    # or: sweep = { first = 0.01, ratio = 0.5, count = 5 }
//! resolution = 8
//!
//! [case.custom]
//! family = "square-corner-neg"
//! eps = [0.01]
//! extension = "identity"    # identity | bounding-box | custom-arc
//! resolution = 8            # elements across the feature size
//! grading = 0.8             # size ratio toward the feature, in (0, 1]
//! coarse = 16               # far-field elements per unit length
//! reference_factor = 1      # refinement of the pair used for |u − u_d|
//! tol = 1e-10
//! max_iter = 20000
//! direct = true             # sparse Cholesky (true) or Jacobi-PCG (false)
//! m = 1                     # oscillation projection degree
//!
//! [case.custom.data]        # expressions in x, y, z, eps (see `expr`)
//! f = "10*cos(3*pi*x)*sin(5*pi*y)"
//! h = "0"
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use defeature_core::geometry::ExtensionChoice;
use defeature_core::Family;

use crate::case::{CaseSpec, DataSpec};
use crate::catalog;
use crate::error::{HarnessError, Result, Stage};
use crate::report::Format;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    case: BTreeMap<String, RawCase>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    formats: Option<Vec<Format>>,
    threads: Option<usize>,
    timing: Option<bool>,
    dump_mesh: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    first: f64,
    ratio: f64,
    count: usize,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    f: Option<String>,
    f_neg: Option<String>,
    f_ext: Option<String>,
    h: Option<String>,
    g: Option<String>,
    g_feature: Option<String>,
    g0: Option<String>,
    g_tilde: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCase {
    catalog: Option<String>,
    title: Option<String>,
    family: Option<String>,
    extension: Option<String>,
    eps: Option<Vec<f64>>,
    sweep: Option<RawSweep>,
    resolution: Option<usize>,
    grading: Option<f64>,
    coarse: Option<usize>,
    reference_factor: Option<usize>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    direct: Option<bool>,
    m: Option<usize>,
    data: Option<RawData>,
}

/// Output settings.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
    pub threads: usize,
    pub timing: bool,
    pub dump_mesh: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: PathBuf::from("results"), formats: vec![Format::Csv], threads: 0, timing: true, dump_mesh: false }
    }
}

/// A parsed and validated configuration.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub output: OutputSpec,
    pub cases: Vec<CaseSpec>,
}

fn resolve_case(name: &str, raw: RawCase) -> Result<CaseSpec> {
    let err = |m: String| HarnessError::Config(format!("case `{name}`: {m}"));
    let mut spec = match (&raw.catalog, &raw.family) {
        (Some(id), _) => {
            let mut s = catalog::case(id)?;
            if let Some(f) = &raw.family {
                s.family = Family::from_name(f).map_err(HarnessError::core(Stage::Geometry))?;
                s.mesh = defeature_core::MeshOptions::for_dim(s.family.dim());
            }
            s
        }
        (None, Some(f)) => {
            let family = Family::from_name(f).map_err(HarnessError::core(Stage::Geometry))?;
            CaseSpec::new(name, name, family, Vec::new(), DataSpec::default())?
        }
        (None, None) => return Err(err(String::from("needs `catalog` or `family`"))),
    };
    spec.id = name.to_string();
    if let Some(t) = raw.title {
        spec.title = t;
    }
    if let Some(e) = raw.extension {
        spec.extension = ExtensionChoice::from_name(&e).map_err(HarnessError::core(Stage::Geometry))?;
    }
    match (raw.eps, raw.sweep) {
        (Some(_), Some(_)) => return Err(err(String::from("give either `eps` or `sweep`, not both"))),
        (Some(e), None) => spec.eps = e,
        (None, Some(s)) => {
            if s.count == 0 || !(s.ratio > 0.0 && s.ratio < 1.0) {
                return Err(err(String::from("sweep needs count ≥ 1 and ratio in (0, 1)")));
            }
            spec.eps = (0..s.count).map(|k| s.first * s.ratio.powi(k as i32)).collect();
        }
        (None, None) => {}
    }
    if let Some(r) = raw.resolution {
        spec.mesh.resolution = r;
    }
    if let Some(g) = raw.grading {
        spec.mesh.grading = g;
    }
    if let Some(c) = raw.coarse {
        spec.mesh.coarse = c;
    }
    if let Some(r) = raw.reference_factor {
        spec.reference_factor = r;
    }
    if let Some(t) = raw.tol {
        spec.solver.tol = t;
    }
    if let Some(i) = raw.max_iter {
        spec.solver.max_iter = i;
    }
    if let Some(d) = raw.direct {
        spec.solver.direct = d;
    }
    if let Some(m) = raw.m {
        spec.m = m;
    }
    if let Some(d) = raw.data {
        let set = |slot: &mut String, v: Option<String>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut spec.data.f, d.f);
        set(&mut spec.data.h, d.h);
        set(&mut spec.data.g, d.g);
        set(&mut spec.data.g_feature, d.g_feature);
        set(&mut spec.data.g0, d.g0);
        set(&mut spec.data.g_tilde, d.g_tilde);
        if d.f_neg.is_some() {
            spec.data.f_neg = d.f_neg;
        }
        if d.f_ext.is_some() {
            spec.data.f_ext = d.f_ext;
        }
    }
    spec.recompile()?;
    spec.validate()?;
    Ok(spec)
}

/// Parse a configuration from TOML text.
pub fn parse(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
    let d = OutputSpec::default();
    let output = OutputSpec {
        dir: raw.output.dir.unwrap_or(d.dir),
        formats: raw.output.formats.unwrap_or(d.formats),
        threads: raw.output.threads.unwrap_or(d.threads),
        timing: raw.output.timing.unwrap_or(d.timing),
        dump_mesh: raw.output.dump_mesh.unwrap_or(d.dump_mesh),
    };
    if raw.case.is_empty() {
        return Err(HarnessError::Config(String::from("no [case.<name>] section")));
    }
    let cases = raw.case.into_iter().map(|(name, c)| resolve_case(&name, c)).collect::<Result<Vec<_>>>()?;
    Ok(ExperimentConfig { output, cases })
}

/// Read and parse a configuration file.
pub fn load(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
    parse(&text)
}
