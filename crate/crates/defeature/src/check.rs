//! Quick invariant suite run by `defeature check`.

use defeature_core::defeaturing::{analyze, AnalysisOptions, SigmaTrace, ETA};
use defeature_core::fem::{solve_poisson, DirichletValue, PoissonProblem};
use defeature_core::geometry::Tag;
use defeature_core::mesh::Region;
use defeature_core::{build_domain, c_sigma, estimator, generate_pair, MeshOptions, Point, SolverOptions};

use crate::catalog;
use crate::error::{HarnessError, Result, Stage};
use crate::run::fit_rate;

/// Outcome of one invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult { name, passed, detail }
    }
}

/// Defect traces of a catalog case at one ε, with the mesh refined `refine` times.
pub fn catalog_traces(id: &str, eps: f64, refine: usize) -> Result<(Vec<SigmaTrace>, usize, f64)> {
    let spec = catalog::case(id)?;
    let domain = build_domain(spec.family, spec.params(eps)).map_err(HarnessError::core(Stage::Geometry))?;
    let options = MeshOptions { refine, ..spec.mesh };
    let pair = generate_pair(&domain, &options).map_err(HarnessError::core(Stage::Mesh))?;
    let data = spec.compiled.bind(eps);
    let a = analyze(&domain, &pair, &data, &AnalysisOptions { reference: false, ..Default::default() })
        .map_err(HarnessError::core(Stage::Estimator))?;
    let predicted = a.flux.iter().find(|f| f.tag == Tag::GammaN).map_or(0.0, |f| f.predicted_mean);
    Ok((a.traces, domain.dim, predicted))
}

/// `E²` summed independently from the samples, without the library estimator.
pub fn estimator2_by_hand(traces: &[SigmaTrace], n: usize) -> f64 {
    let p = 1.0 / (n as f64 - 1.0);
    traces
        .iter()
        .map(|t| {
            let w: f64 = t.samples.iter().map(|s| s.weight).sum();
            let mean = t.samples.iter().map(|s| s.weight * s.defect).sum::<f64>() / w;
            let fl2: f64 = t.samples.iter().map(|s| s.weight * (s.defect - mean).powi(2)).sum();
            let c2 = if n == 2 { t.measure.ln().abs().max(ETA) } else { 1.0 };
            t.measure.powf(p) * fl2 + c2 * t.measure.powf(n as f64 * p) * mean * mean
        })
        .sum()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn check_c_sigma() -> Result<Vec<CheckResult>> {
    let fixed = (ETA + ETA.ln()).abs();
    let x0 = (-ETA).exp();
    let c0 = c_sigma(2, x0).map_err(HarnessError::core(Stage::Estimator))?;
    let mut jump: f64 = 0.0;
    for d in [1e-12, 1e-13, 1e-14] {
        for x in [x0 * (1.0 - d), x0 * (1.0 + d)] {
            let c = c_sigma(2, x).map_err(HarnessError::core(Stage::Estimator))?;
            jump = jump.max((c - c0).abs());
        }
    }
    Ok(vec![
        CheckResult::new("c_sigma fixed point", fixed < 1e-12, format!("|η + log η| = {fixed:.3e}")),
        CheckResult::new("c_sigma continuity", jump < 1e-10, format!("max jump at e^-η = {jump:.3e}")),
    ])
}

/// E vanishes exactly when every defect does; additivity over σ and
/// features; agreement with the hand-summed negative-feature formula.
pub fn check_estimator_algebra() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let (traces, n, _) = catalog_traces("fig7.complex.offset", 1e-2, 1)?;
    let est = |t: &[SigmaTrace]| estimator(t, n).map(|e| e.value).map_err(HarnessError::core(Stage::Estimator));

    let mut zero = traces.clone();
    zero.iter_mut().flat_map(|t| t.samples.iter_mut()).for_each(|s| s.defect = 0.0);
    let e_zero = est(&zero)?;
    let mut spike_ok = true;
    for (i, t) in zero.iter().enumerate() {
        for j in [0, t.samples.len() / 2, t.samples.len() - 1] {
            let mut one = zero.clone();
            one[i].samples[j].defect = 1e-3;
            spike_ok &= est(&one)? > 0.0;
        }
    }
    out.push(CheckResult::new(
        "E = 0 iff all defects vanish",
        e_zero == 0.0 && spike_ok && est(&traces)? > 0.0,
        format!("E(0) = {e_zero:e}, single nonzero sample detected: {spike_ok}"),
    ));

    let whole = est(&traces)?.powi(2);
    let parts: f64 = traces.iter().map(|t| est(core::slice::from_ref(t)).map(|e| e * e)).sum::<Result<f64>>()?;
    let r = rel(whole, parts);
    out.push(CheckResult::new("additivity over σ", r < 1e-14, format!("relative gap {r:.3e} over {} σ", traces.len())));

    let mut worst: f64 = 0.0;
    for (id, eps) in [("fig7.neg.halfdisk", 1e-2), ("fig7.neg.corner", 1e-2), ("fig10.neg.box", 1e-2)] {
        let (t, n, _) = catalog_traces(id, eps, 1)?;
        let e = estimator(&t, n).map_err(HarnessError::core(Stage::Estimator))?.value;
        worst = worst.max(rel(e * e, estimator2_by_hand(&t, n)));
    }
    out.push(CheckResult::new("negative-feature specialization", worst < 1e-14, format!("relative gap {worst:.3e}")));
    Ok(out)
}

/// A linear field solves −Δu = 0 with its own Dirichlet data exactly.
pub fn check_patch() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for id in ["fig7.neg.corner", "table1.star.a", "fig10.pos.corner"] {
        let spec = catalog::case(id)?;
        let domain = build_domain(spec.family, spec.params(spec.eps[0])).map_err(HarnessError::core(Stage::Geometry))?;
        let pair = generate_pair(&domain, &MeshOptions { resolution: 6, ..spec.mesh }).map_err(HarnessError::core(Stage::Mesh))?;
        let lin = |p: &Point| 0.3 + 1.7 * p[0] - 0.9 * p[1] + 0.4 * p[2];
        let zero = |_: Region, _: &Point| 0.0;
        let tags = [Tag::Dirichlet, Tag::NeumannRest, Tag::GammaN, Tag::GammaR, Tag::GammaS, Tag::Gamma0N, Tag::Gamma0P, Tag::GammaTilde];
        let problem = PoissonProblem {
            source: &zero,
            dirichlet: tags.iter().filter(|t| pair.exact.has_tag(**t, None)).map(|t| (*t, DirichletValue::Function(&lin))).collect(),
            neumann: Vec::new(),
            pure_neumann: false,
        };
        let u = solve_poisson(&pair.exact, &problem, &SolverOptions::default()).map_err(HarnessError::core(Stage::ReferenceSolve))?;
        for (v, p) in pair.exact.vertices.iter().enumerate() {
            worst = worst.max((u.values[v] - lin(p)).abs());
        }
    }
    Ok(CheckResult::new("patch test", worst < 1e-10, format!("max nodal error {worst:.3e}")))
}

/// The computed γ_n mean converges to the data-only flux prediction at
/// order ≥ 1 in the mesh size. A polygonal feature keeps geometry error out
/// of the measurement.
pub fn check_flux_mean() -> Result<CheckResult> {
    let mut pts = Vec::new();
    for refine in [1, 2, 4] {
        let (traces, _, predicted) = catalog_traces("fig7.neg.corner", 1e-2, refine)?;
        let t = traces.iter().find(|t| t.tag == Tag::GammaN).ok_or_else(|| HarnessError::Config("no γ_n trace".into()))?;
        pts.push((1.0 / refine as f64, (t.mean() - predicted).abs()));
    }
    let rate = fit_rate(&pts)?;
    Ok(CheckResult::new(
        "flux-mean convergence",
        rate >= 1.0,
        format!("rate {rate:.2}, gaps {:?}", pts.iter().map(|p| format!("{:.2e}", p.1)).collect::<Vec<_>>()),
    ))
}

/// Every quick invariant, in a fixed order.
pub fn run_all() -> Result<Vec<CheckResult>> {
    let mut out = check_c_sigma()?;
    out.extend(check_estimator_algebra()?);
    out.push(check_patch()?);
    out.push(check_flux_mean()?);
    Ok(out)
}
