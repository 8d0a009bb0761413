//! Case runner, ε sweeps and rate fitting.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use defeature_core::defeaturing::{build_report, solve_defeatured, solve_exact, solve_extension, EstimatorReport};
use defeature_core::{assemble_ud, build_domain, flux_residual, generate_pair, h1_seminorm_diff, sigma_defects, MeshOptions, MeshPair, ProblemData};

use crate::case::CaseSpec;
use crate::error::{HarnessError, Result, Stage};

/// Per-σ estimator split as reported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaRow {
    pub tag: String,
    pub feature: usize,
    pub measure: f64,
    /// Mean of the computed defect.
    pub mean: f64,
    /// Mean predicted from the data alone (flux balance).
    pub predicted_mean: Option<f64>,
    pub fluctuation: f64,
    pub c_sigma: f64,
    pub contribution2: f64,
}

/// Estimator, indicator and oscillation of one feature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub feature: usize,
    pub estimator: f64,
    pub estimator_tilde: f64,
    pub osc: f64,
    /// Largest data-only predicted mean in magnitude over the feature's σ.
    pub flux_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub exact_vertices: usize,
    pub exact_elements: usize,
    pub defeatured_vertices: usize,
    pub defeatured_elements: usize,
    pub extension_vertices: usize,
    pub extension_elements: usize,
    /// Vertices of the exact mesh used for the reference solution.
    pub reference_vertices: usize,
}

/// Everything measured for one ε.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case: String,
    pub family: String,
    pub extension: String,
    pub dim: usize,
    pub eps: f64,
    pub estimator: f64,
    pub estimator_tilde: f64,
    pub osc_m: usize,
    pub osc: f64,
    /// `|u − u_d|_{1,Ω}`.
    pub error: Option<f64>,
    pub effectivity: Option<f64>,
    /// Largest data-only predicted mean in magnitude over all σ.
    pub flux_residual: f64,
    pub features: Vec<FeatureRow>,
    pub sigma: Vec<SigmaRow>,
    pub theory_covered: bool,
    pub mesh: MeshStats,
    pub runtime_s: f64,
}

/// Least-squares fit of `log y` against `log x`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(HarnessError::Config(String::from("rate fit needs at least 2 points")));
    }
    if let Some(p) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(HarnessError::Config(format!("rate fit needs positive values, got ({}, {})", p.0, p.1)));
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::Config(String::from("rate fit needs at least two distinct abscissae")));
    }
    Ok(sxy / sxx)
}

fn max_abs(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a })
}

fn to_rows(report: &EstimatorReport, predicted: &[(usize, String, f64)]) -> (Vec<FeatureRow>, Vec<SigmaRow>) {
    let sigma: Vec<SigmaRow> = report
        .sigma
        .iter()
        .map(|s| SigmaRow {
            tag: s.tag.name().into(),
            feature: s.feature,
            measure: s.measure,
            mean: s.mean,
            predicted_mean: predicted.iter().find(|(k, t, _)| *k == s.feature && t == s.tag.name()).map(|p| p.2),
            fluctuation: s.fluctuation,
            c_sigma: s.c_sigma,
            contribution2: s.contribution2,
        })
        .collect();
    let features = (0..report.per_feature.len())
        .map(|k| FeatureRow {
            feature: k,
            estimator: report.per_feature[k],
            estimator_tilde: report.per_feature_tilde[k],
            osc: report.per_feature_osc[k],
            flux_residual: max_abs(predicted.iter().filter(|p| p.0 == k).map(|p| p.2)),
        })
        .collect();
    (features, sigma)
}

/// The reference error `|u − u_d|_{1,Ω}` on a pair refined `factor` times.
fn reference_error(spec: &CaseSpec, eps: f64, data: &ProblemData, pair: &MeshPair) -> Result<(f64, usize)> {
    let domain = build_domain(spec.family, spec.params(eps)).map_err(HarnessError::core(Stage::Geometry))?;
    let refined;
    let pair = if spec.reference_factor == 1 {
        pair
    } else {
        let options = MeshOptions { refine: pair.exact.options.refine * spec.reference_factor, ..pair.exact.options };
        refined = generate_pair(&domain, &options).map_err(HarnessError::core(Stage::Mesh))?;
        &refined
    };
    let u0 = solve_defeatured(&pair.defeatured, data, &spec.solver).map_err(HarnessError::core(Stage::DefeaturedSolve))?;
    let u0_tilde = match &pair.extension {
        Some(ext) => Some(solve_extension(ext, &u0, data, &spec.solver).map_err(HarnessError::core(Stage::ExtensionSolve))?),
        None => None,
    };
    let u_d = assemble_ud(&pair.exact, &u0, u0_tilde.as_ref()).map_err(HarnessError::core(Stage::AssembleUd))?;
    let u = solve_exact(&pair.exact, data, &spec.solver).map_err(HarnessError::core(Stage::ReferenceSolve))?;
    let err = h1_seminorm_diff(&u, &u_d, |_| true).map_err(HarnessError::core(Stage::Error))?;
    Ok((err, pair.exact.n_vertices()))
}

/// Run the full pipeline for one ε: geometry, meshes, defeatured and
/// extension solves, u_d, defects, estimator, oscillation, flux means and
/// the reference error.
pub fn run_case(spec: &CaseSpec, eps: f64) -> Result<CaseReport> {
    let start = Instant::now();
    let domain = build_domain(spec.family, spec.params(eps)).map_err(HarnessError::core(Stage::Geometry))?;
    let pair = generate_pair(&domain, &spec.mesh).map_err(HarnessError::core(Stage::Mesh))?;
    let data = spec.compiled.bind(eps);
    let u0 = solve_defeatured(&pair.defeatured, &data, &spec.solver).map_err(HarnessError::core(Stage::DefeaturedSolve))?;
    let u0_tilde = match &pair.extension {
        Some(ext) => Some(solve_extension(ext, &u0, &data, &spec.solver).map_err(HarnessError::core(Stage::ExtensionSolve))?),
        None => None,
    };
    let u_d = assemble_ud(&pair.exact, &u0, u0_tilde.as_ref()).map_err(HarnessError::core(Stage::AssembleUd))?;
    let traces = sigma_defects(&u_d, u0_tilde.as_ref(), &domain, &data).map_err(HarnessError::core(Stage::Defects))?;
    let flux = flux_residual(&pair, &domain, &data).map_err(HarnessError::core(Stage::FluxResidual))?;
    let (error, reference_vertices) = if spec.reference_factor == 1 {
        let u = solve_exact(&pair.exact, &data, &spec.solver).map_err(HarnessError::core(Stage::ReferenceSolve))?;
        (h1_seminorm_diff(&u, &u_d, |_| true).map_err(HarnessError::core(Stage::Error))?, pair.exact.n_vertices())
    } else {
        reference_error(spec, eps, &data, &pair)?
    };
    let report = build_report(&traces, &domain, flux.clone(), spec.m, Some(error)).map_err(HarnessError::core(Stage::Estimator))?;
    let predicted: Vec<(usize, String, f64)> = flux.iter().map(|f| (f.feature, f.tag.name().to_string(), f.predicted_mean)).collect();
    let (features, sigma) = to_rows(&report, &predicted);
    let ext = pair.extension.as_ref();
    Ok(CaseReport {
        case: spec.id.clone(),
        family: spec.family.name().into(),
        extension: spec.extension.name().into(),
        dim: domain.dim,
        eps,
        estimator: report.estimator,
        estimator_tilde: report.estimator_tilde,
        osc_m: report.osc_m,
        osc: report.osc,
        error: report.error,
        effectivity: report.effectivity,
        flux_residual: max_abs(predicted.iter().map(|p| p.2)),
        features,
        sigma,
        theory_covered: report.theory_covered,
        mesh: MeshStats {
            exact_vertices: pair.exact.n_vertices(),
            exact_elements: pair.exact.n_elements(),
            defeatured_vertices: pair.defeatured.n_vertices(),
            defeatured_elements: pair.defeatured.n_elements(),
            extension_vertices: ext.map_or(0, |m| m.n_vertices()),
            extension_elements: ext.map_or(0, |m| m.n_elements()),
            reference_vertices,
        },
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

/// Fitted rates and effectivity statistics of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub slope_error: Option<f64>,
    pub slope_estimator: Option<f64>,
    pub slope_osc: Option<f64>,
    pub effectivity_min: Option<f64>,
    pub effectivity_max: Option<f64>,
    pub effectivity_mean: Option<f64>,
}

/// A failed sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub eps: f64,
    pub message: String,
    pub exit_code: i32,
}

/// All points of a sweep, in decreasing ε.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub case: String,
    pub title: String,
    pub cases: Vec<CaseReport>,
    pub summary: SweepSummary,
    /// First failing point; `cases` then holds the points before it.
    pub failure: Option<Failure>,
}

fn slope(cases: &[CaseReport], value: impl Fn(&CaseReport) -> Option<f64>) -> Option<f64> {
    let pts: Option<Vec<(f64, f64)>> = cases.iter().map(|c| value(c).map(|v| (c.eps, v))).collect();
    pts.and_then(|p| fit_rate(&p).ok())
}

pub fn summarize(cases: &[CaseReport]) -> SweepSummary {
    let eff: Vec<f64> = cases.iter().filter_map(|c| c.effectivity).collect();
    let has_eff = !eff.is_empty() && eff.len() == cases.len();
    let (slope_error, slope_estimator, slope_osc) = if cases.len() >= 2 {
        (slope(cases, |c| c.error), slope(cases, |c| Some(c.estimator)), slope(cases, |c| Some(c.osc)))
    } else {
        (None, None, None)
    };
    SweepSummary {
        slope_error,
        slope_estimator,
        slope_osc,
        effectivity_min: has_eff.then(|| eff.iter().copied().fold(f64::INFINITY, f64::min)),
        effectivity_max: has_eff.then(|| eff.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        effectivity_mean: has_eff.then(|| eff.iter().sum::<f64>() / eff.len() as f64),
    }
}

/// Run every ε of `spec` on up to `threads` workers (0: all cores). Results
/// are ordered by ε whatever the execution order.
pub fn run_points(spec: &CaseSpec, threads: usize) -> Result<SweepReport> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<CaseReport>> = pool.install(|| spec.eps.par_iter().map(|&e| run_case(spec, e)).collect());
    let mut cases = Vec::new();
    let mut failure = None;
    for (r, &eps) in results.into_iter().zip(&spec.eps) {
        match r {
            Ok(c) => cases.push(c),
            Err(e) => {
                failure = Some(Failure { eps, message: e.to_string(), exit_code: e.exit_code() });
                break;
            }
        }
    }
    let summary = summarize(&cases);
    Ok(SweepReport { case: spec.id.clone(), title: spec.title.clone(), cases, summary, failure })
}

/// [`run_points`] for a sweep of at least three ε values.
pub fn run_sweep(spec: &CaseSpec, threads: usize) -> Result<SweepReport> {
    if spec.eps.len() < 3 {
        return Err(HarnessError::Config(format!("sweep `{}` needs at least 3 ε values, got {}", spec.id, spec.eps.len())));
    }
    run_points(spec, threads)
}
