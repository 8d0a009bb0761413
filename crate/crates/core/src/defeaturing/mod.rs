//! The defeaturing error estimator: extended defeatured solution u_d, defects
//! d_σ on σ ∈ Σ = {γ_n, γ_r, γ_{0,p}}, the estimator E(u_d), the simplified
//! indicator Ẽ, oscillations, and the data-only flux means.

mod projection;
mod solve;

pub use projection::clement_project;
pub use solve::{analyze, assemble_ud, solve_defeatured, solve_exact, solve_extension, Analysis, AnalysisOptions};

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fem::{flux_trace, map_point, ProblemData, ScalarField, BOUNDARY_ORDER};
use crate::geometry::{DomainDescription, Tag};
use crate::mesh::{boundary_quadrature, Mesh, MeshPair, Region};
use crate::quadrature::tensor_rule;
use crate::Point;

/// Ω ≈ 0.5671432904097838, the solution of η = −log η.
pub const ETA: f64 = 0.567_143_290_409_783_8;

/// The constant weighting the mean term: 1 in 3D, `max(|log|σ||, η)^{1/2}` in 2D.
pub fn c_sigma(n: usize, measure: f64) -> Result<f64> {
    if !(measure > 0.0) || !measure.is_finite() {
        return Err(Error::Domain(format!("measure must be positive, got {measure}")));
    }
    match n {
        2 => Ok(measure.ln().abs().max(ETA).sqrt()),
        3 => Ok(1.0),
        _ => Err(Error::Domain(format!("dimension {n} not in {{2, 3}}"))),
    }
}

/// One quadrature sample of a defect.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceSample {
    pub point: Point,
    pub weight: f64,
    /// Unit normal used for the flux (outward from Ω on γ_n, γ_r; outward from F̃_p on γ_{0,p}).
    pub normal: Point,
    /// Index of the flat element of the partition carrying the sample.
    pub part: u32,
    /// Local coordinates of the sample in its flat element, in `[-1, 1]^{n-1}`.
    pub s: [f64; 2],
    pub defect: f64,
}

/// A flat element of the partition of σ: vertices in lexicographic face order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatElement {
    pub vertices: [Point; 4],
    pub n_vertices: usize,
}

/// Defect samples on one σ of one feature.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaTrace {
    pub tag: Tag,
    pub feature: usize,
    pub dim: usize,
    /// Analytic measure |σ|.
    pub measure: f64,
    pub partition: Vec<FlatElement>,
    pub samples: Vec<TraceSample>,
}

impl SigmaTrace {
    /// Measure of σ as seen by the quadrature (the polyline/polygon measure).
    pub fn quadrature_measure(&self) -> f64 {
        self.samples.iter().map(|s| s.weight).sum()
    }

    /// Weighted mean of the defect, `∫_σ d / |σ|` with the quadrature measure.
    pub fn mean(&self) -> f64 {
        let m = self.quadrature_measure();
        if m == 0.0 {
            return 0.0;
        }
        self.samples.iter().map(|s| s.weight * s.defect).sum::<f64>() / m
    }

    /// `‖d − d̄‖²_{0,σ}`.
    pub fn fluctuation2(&self) -> f64 {
        let mean = self.mean();
        self.samples.iter().map(|s| s.weight * (s.defect - mean).powi(2)).sum()
    }

    /// `‖d‖²_{0,σ}`.
    pub fn norm2(&self) -> f64 {
        self.samples.iter().map(|s| s.weight * s.defect * s.defect).sum()
    }
}

/// Per-σ split of the estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaContribution {
    pub tag: Tag,
    pub feature: usize,
    pub measure: f64,
    pub mean: f64,
    /// `‖d − d̄‖_{0,σ}`.
    pub fluctuation: f64,
    pub c_sigma: f64,
    /// `|σ|^{1/(n−1)}‖d − d̄‖² + c_σ²|σ|^{n/(n−1)}d̄²`.
    pub contribution2: f64,
}

/// Estimator value over a set of traces with its per-σ split; `value² = Σ contribution2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub sigma: Vec<SigmaContribution>,
}

fn check_dim(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::Domain(format!("dimension {n} not in {{2, 3}}")))
    }
}

/// `E² = Σ_σ (|σ|^{1/(n−1)}‖d_σ − d̄_σ‖² + c_σ²|σ|^{n/(n−1)}d̄_σ²)`.
pub fn estimator(traces: &[SigmaTrace], n: usize) -> Result<Estimate> {
    check_dim(n)?;
    let p = 1.0 / (n as f64 - 1.0);
    let mut sigma = Vec::with_capacity(traces.len());
    let mut total = 0.0;
    for t in traces {
        let c = c_sigma(n, t.measure)?;
        let mean = t.mean();
        let fl2 = t.fluctuation2();
        let contribution2 = t.measure.powf(p) * fl2 + c * c * t.measure.powf(n as f64 * p) * mean * mean;
        total += contribution2;
        sigma.push(SigmaContribution {
            tag: t.tag,
            feature: t.feature,
            measure: t.measure,
            mean,
            fluctuation: fl2.sqrt(),
            c_sigma: c,
            contribution2,
        });
    }
    Ok(Estimate { value: total.sqrt(), sigma })
}

/// `Ẽ = (Σ_σ c_σ²|σ|^{1/(n−1)}‖d_σ‖²)^{1/2}`.
pub fn estimator_tilde(traces: &[SigmaTrace], n: usize) -> Result<f64> {
    check_dim(n)?;
    let p = 1.0 / (n as f64 - 1.0);
    let mut total = 0.0;
    for t in traces {
        let c = c_sigma(n, t.measure)?;
        total += c * c * t.measure.powf(p) * t.norm2();
    }
    Ok(total.sqrt())
}

/// `osc = |Γ|^{1/(2(n−1))}(Σ_σ ‖d_σ − Π_m d_σ‖²)^{1/2}` with `|Γ|` the total
/// measure of the given traces.
pub fn oscillation(traces: &[SigmaTrace], m: usize, n: usize) -> Result<f64> {
    check_dim(n)?;
    let gamma: f64 = traces.iter().map(|t| t.measure).sum();
    let mut total = 0.0;
    for t in traces {
        let proj = clement_project(t, m)?;
        total += t.samples.iter().zip(&proj).map(|(s, p)| s.weight * (s.defect - p).powi(2)).sum::<f64>();
    }
    Ok(gamma.powf(1.0 / (2.0 * (n as f64 - 1.0))) * total.sqrt())
}

/// Defects of `u_d` on every non-empty σ of every feature. The γ_{0,p} defect
/// uses the extension solution `u0_tilde` and the normal outward from F̃_p.
pub fn sigma_defects(
    u_d: &ScalarField<'_>,
    u0_tilde: Option<&ScalarField<'_>>,
    domain: &DomainDescription,
    data: &ProblemData,
) -> Result<Vec<SigmaTrace>> {
    let exact = u_d.mesh;
    let mut out = Vec::new();
    for k in 0..domain.feature_count() {
        for tag in Tag::SIGMA {
            let measure = domain.measure(tag, Some(k));
            let (field, mesh) = match tag {
                Tag::Gamma0P => match u0_tilde {
                    Some(ut) => (ut, ut.mesh),
                    None if measure > 0.0 => {
                        return Err(Error::Configuration(format!("feature {k} has γ_0p but no extension solution")));
                    }
                    None => continue,
                },
                _ => (u_d, exact),
            };
            if !mesh.has_tag(tag, Some(k)) {
                if measure > 0.0 {
                    return Err(Error::GeometryMismatch(format!("{} of feature {k} is not resolved by the mesh", tag.name())));
                }
                continue;
            }
            let qp = boundary_quadrature(mesh, tag, Some(k), BOUNDARY_ORDER)?;
            let flux = flux_trace(field, &qp)?;
            let (partition, part_of_face) = flat_partition(mesh, tag, k);
            let samples = qp
                .iter()
                .zip(&flux)
                .map(|(bp, dn)| {
                    let defect = match tag {
                        Tag::Gamma0P => -((data.g0)(&bp.point) + dn),
                        _ => (data.g_feature)(&bp.point) - dn,
                    };
                    TraceSample { point: bp.point, weight: bp.weight, normal: bp.normal, part: part_of_face[bp.face as usize], s: bp.s, defect }
                })
                .collect();
            out.push(SigmaTrace { tag, feature: k, dim: domain.dim, measure, partition, samples });
        }
    }
    Ok(out)
}

/// Flat elements of σ (the mesh faces carrying the tag) and the map from the
/// mesh's boundary-face index to the element index.
fn flat_partition(mesh: &Mesh, tag: Tag, feature: usize) -> (Vec<FlatElement>, Vec<u32>) {
    let mut map = alloc::vec![u32::MAX; mesh.boundary.len()];
    let mut parts = Vec::new();
    for (i, bf) in mesh.faces(tag, Some(feature)) {
        let (vertices, n_vertices) = mesh.face_coords(bf);
        map[i] = parts.len() as u32;
        parts.push(FlatElement { vertices, n_vertices });
    }
    (parts, map)
}

/// Data-only prediction of the mean defect on one σ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxResidual {
    pub feature: usize,
    pub tag: Tag,
    /// Mean of d_σ predicted from the data alone.
    pub predicted_mean: f64,
    /// Whether the flux conservation condition (zero mean) holds.
    pub compatible: bool,
}

/// Tolerance below which a predicted mean counts as zero.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

/// Predicted means of the defects from the data alone, by flux balance over
/// F_n (for γ_n), over F̃_p \ F_p (for γ_r) and over F̃_p (for γ_{0,p}).
///
/// For γ_{0,p} the balance gives `∫ (g0 + ∂ũ0/∂n_F) = ∫_{γ0p} g0 − ∫_{γs} g − ∫_{γ̃} g̃ − ∫_{F̃_p} f`;
/// the returned mean carries the defect's sign, i.e. its negative over |γ_{0,p}|.
pub fn flux_residual(pair: &MeshPair, domain: &DomainDescription, data: &ProblemData) -> Result<Vec<FluxResidual>> {
    let mut out = Vec::new();
    for k in 0..domain.feature_count() {
        let kk = k as u16;
        for tag in Tag::SIGMA {
            let mean = match tag {
                Tag::GammaN => {
                    let m = &pair.exact;
                    if !m.has_tag(tag, Some(k)) {
                        continue;
                    }
                    let num = boundary_integral(m, Tag::GammaN, k, &*data.g_feature)?
                        - boundary_integral(&pair.defeatured, Tag::Gamma0N, k, &*data.g0)?
                        - volume_integral(&pair.defeatured, |r| r == Region::Neg(kk), &*data.f_neg);
                    num / boundary_measure(m, tag, k)?
                }
                Tag::GammaR => {
                    let m = &pair.exact;
                    if !m.has_tag(tag, Some(k)) {
                        continue;
                    }
                    let ext = pair.extension.as_ref().ok_or_else(|| Error::Configuration("γ_r without extension mesh".into()))?;
                    let num = boundary_integral(m, Tag::GammaR, k, &*data.g_feature)?
                        - boundary_integral(ext, Tag::GammaTilde, k, &*data.g_tilde)?
                        - volume_integral(ext, |r| r == Region::Ext(kk), &*data.f_ext);
                    num / boundary_measure(m, tag, k)?
                }
                _ => {
                    let Some(ext) = pair.extension.as_ref() else { continue };
                    if !ext.has_tag(tag, Some(k)) {
                        continue;
                    }
                    let num = boundary_integral(ext, Tag::Gamma0P, k, &*data.g0)?
                        - boundary_integral(ext, Tag::GammaS, k, &*data.g_feature)?
                        - boundary_integral(ext, Tag::GammaTilde, k, &*data.g_tilde)?
                        - volume_integral(ext, |r| r == Region::Pos(kk), &*data.f)
                        - volume_integral(ext, |r| r == Region::Ext(kk), &*data.f_ext);
                    -num / boundary_measure(ext, tag, k)?
                }
            };
            out.push(FluxResidual { feature: k, tag, predicted_mean: mean, compatible: mean.abs() <= COMPATIBILITY_TOL });
        }
    }
    Ok(out)
}

fn boundary_integral(mesh: &Mesh, tag: Tag, k: usize, g: &dyn Fn(&Point) -> f64) -> Result<f64> {
    if !mesh.has_tag(tag, Some(k)) {
        return Ok(0.0);
    }
    Ok(boundary_quadrature(mesh, tag, Some(k), BOUNDARY_ORDER)?.iter().map(|bp| bp.weight * g(&bp.point)).sum())
}

fn boundary_measure(mesh: &Mesh, tag: Tag, k: usize) -> Result<f64> {
    boundary_integral(mesh, tag, k, &|_| 1.0)
}

fn volume_integral(mesh: &Mesh, select: impl Fn(Region) -> bool, f: &dyn Fn(&Point) -> f64) -> f64 {
    let rule = tensor_rule(mesh.dim, crate::fem::VOLUME_ORDER);
    let mut s = 0.0;
    for e in 0..mesh.n_elements() {
        if !select(mesh.region[e]) {
            continue;
        }
        let coords = mesh.element_coords(e);
        for (xi, w) in &rule {
            let mp = map_point(mesh.dim, &coords, xi);
            s += f(&mp.x) * w * mp.det;
        }
    }
    s
}

/// Complete estimator report of one case.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorReport {
    pub dim: usize,
    pub sigma: Vec<SigmaContribution>,
    /// E, Ẽ and osc per feature.
    pub per_feature: Vec<f64>,
    pub per_feature_tilde: Vec<f64>,
    pub per_feature_osc: Vec<f64>,
    /// Total E: plain sum of the per-feature estimators.
    pub estimator: f64,
    /// Total Ẽ: plain sum of the per-feature indicators.
    pub estimator_tilde: f64,
    /// Oscillation degree m and total oscillation (plain sum over features).
    pub osc_m: usize,
    pub osc: f64,
    pub flux: Vec<FluxResidual>,
    /// `|u − u_d|_{1,Ω}` when the reference solution is known.
    pub error: Option<f64>,
    pub effectivity: Option<f64>,
    pub theory_covered: bool,
}

/// Assemble the report from the traces of all features.
pub fn build_report(
    traces: &[SigmaTrace],
    domain: &DomainDescription,
    flux: Vec<FluxResidual>,
    m: usize,
    error: Option<f64>,
) -> Result<EstimatorReport> {
    let n = domain.dim;
    let mut sigma = Vec::new();
    let mut per_feature = Vec::new();
    let mut per_feature_tilde = Vec::new();
    let mut per_feature_osc = Vec::new();
    let (mut est, mut est_t, mut osc) = (0.0, 0.0, 0.0);
    for k in 0..domain.feature_count() {
        let tk: Vec<SigmaTrace> = traces.iter().filter(|t| t.feature == k).cloned().collect();
        if tk.is_empty() {
            per_feature.push(0.0);
            per_feature_tilde.push(0.0);
            per_feature_osc.push(0.0);
            continue;
        }
        let e = estimator(&tk, n)?;
        est += e.value;
        per_feature.push(e.value);
        sigma.extend(e.sigma);
        let t = estimator_tilde(&tk, n)?;
        let o = oscillation(&tk, m, n)?;
        est_t += t;
        osc += o;
        per_feature_tilde.push(t);
        per_feature_osc.push(o);
    }
    let effectivity = error.and_then(|err| (err > 0.0).then_some(est / err));
    Ok(EstimatorReport {
        dim: n,
        sigma,
        per_feature,
        per_feature_tilde,
        per_feature_osc,
        estimator: est,
        estimator_tilde: est_t,
        osc_m: m,
        osc,
        flux,
        error,
        effectivity,
        theory_covered: domain.theory_covered,
    })
}
