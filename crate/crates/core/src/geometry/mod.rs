//! Exact geometry of the experiment families: the original domain Ω, the
//! defeatured domain Ω0, the feature decomposition into a negative part F_n
//! and a positive part F_p (with its extension F̃_p), and every tagged
//! boundary piece the estimator needs.
//!
//! Curved pieces are stored as exact parametric primitives; meshes only
//! approximate them.

mod families;

pub use families::{build_domain, star_vertices};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::Point;

/// Identity of a boundary piece.
///
/// ```text
///   γ_n   ∂F_n inside Ω0 (boundary of Ω facing a removed region)
///   γ_0n  ∂F_n on ∂Ω0 (replaced by the defeatured boundary)
///   γ_0p  ∂F_p facing Ω⋆ (the part of ∂Ω0 covered by a protrusion)
///   γ_s   ∂F_p on ∂Ω that is also on ∂F̃_p
///   γ_r   ∂F_p on ∂Ω that is interior to F̃_p
///   γ̃     ∂F̃_p not on ∂F_p
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    GammaN,
    GammaR,
    Gamma0P,
    Gamma0N,
    GammaS,
    GammaTilde,
    Dirichlet,
    NeumannRest,
}

impl Tag {
    pub const ALL: [Tag; 8] = [
        Tag::GammaN,
        Tag::GammaR,
        Tag::Gamma0P,
        Tag::Gamma0N,
        Tag::GammaS,
        Tag::GammaTilde,
        Tag::Dirichlet,
        Tag::NeumannRest,
    ];

    /// Tags that make up the estimator's boundary set Σ.
    pub const SIGMA: [Tag; 3] = [Tag::GammaN, Tag::GammaR, Tag::Gamma0P];

    pub fn name(self) -> &'static str {
        match self {
            Tag::GammaN => "gamma_n",
            Tag::GammaR => "gamma_r",
            Tag::Gamma0P => "gamma_0p",
            Tag::Gamma0N => "gamma_0n",
            Tag::GammaS => "gamma_s",
            Tag::GammaTilde => "gamma_tilde",
            Tag::Dirichlet => "gamma_d",
            Tag::NeumannRest => "gamma_n_rest",
        }
    }

    pub fn from_name(name: &str) -> Result<Tag> {
        Tag::ALL
            .iter()
            .copied()
            .find(|t| t.name() == name)
            .ok_or_else(|| Error::UnknownTag(String::from(name)))
    }

    /// Whether the tag belongs to a single feature (as opposed to the outer boundary).
    pub fn is_feature_tag(self) -> bool {
        !matches!(self, Tag::Dirichlet | Tag::NeumannRest)
    }
}

/// Shape of the hole in the disk family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoleShape {
    /// Ten-branch regular star, inner radius r, outer radius 2r.
    Star,
    /// Circle of radius r.
    Circle,
    /// Axis-aligned square of side 2r.
    Square,
}

/// Whether a simple feature removes material or adds it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Positive,
}

/// Sign classification of the whole feature set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureSign {
    Negative,
    Positive,
    Complex,
}

/// Placement of the two squares of a complex feature on the top side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexLayout {
    /// Protrusion and hole side by side, touching at a corner.
    Offset,
    /// Protrusion and hole overlapping by half a side.
    Straddle,
}

/// Choice of the extended feature F̃_p ⊇ F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionChoice {
    /// F̃_p = F_p.
    Identity,
    /// The bounding box of F_p.
    BoundingBox,
    /// The bounding box with a quarter disk of half the fillet radius removed.
    CustomArc,
}

impl ExtensionChoice {
    pub const ALL: [ExtensionChoice; 3] = [ExtensionChoice::Identity, ExtensionChoice::BoundingBox, ExtensionChoice::CustomArc];

    pub fn name(self) -> &'static str {
        match self {
            ExtensionChoice::Identity => "identity",
            ExtensionChoice::BoundingBox => "bounding-box",
            ExtensionChoice::CustomArc => "custom-arc",
        }
    }

    pub fn from_name(name: &str) -> Result<ExtensionChoice> {
        ExtensionChoice::ALL
            .iter()
            .copied()
            .find(|e| e.name() == name)
            .ok_or_else(|| Error::Configuration(format!("unknown extension choice `{name}`")))
    }
}

/// Closed enumeration of the geometry families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    /// Unit disk with a centred hole of size r.
    DiskHole(HoleShape),
    /// Unit square with a half disk of radius ε centred at (0.5, 1).
    SquareHalfDisk(Sign),
    /// Unit square with the square (1-ε, 1)² removed, or (1-ε, 1)×(1, 1+ε) added.
    SquareCorner(Sign),
    /// Unit square with a protrusion and a hole of side ε on the top side.
    SquareComplex(ComplexLayout),
    /// Unit square with two circular holes of very different sizes.
    TwoHoles,
    /// Unit cube with an ε-box at mid top edge (x ≈ 0.5), removed or added.
    CubeBox(Sign),
    /// Unit cube with an ε-box at the top corner edge (x ≈ 1), removed or added.
    CubeCorner(Sign),
    /// Unit square whose top-left corner is rounded with radius R.
    Round,
    /// L-shaped domain whose re-entrant corner is filled with a fillet of radius 1/2.
    Fillet,
}

impl Family {
    pub fn dim(&self) -> usize {
        match self {
            Family::CubeBox(_) | Family::CubeCorner(_) => 3,
            _ => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::DiskHole(HoleShape::Star) => "disk-hole-star",
            Family::DiskHole(HoleShape::Circle) => "disk-hole-circle",
            Family::DiskHole(HoleShape::Square) => "disk-hole-square",
            Family::SquareHalfDisk(Sign::Negative) => "square-halfdisk-neg",
            Family::SquareHalfDisk(Sign::Positive) => "square-halfdisk-pos",
            Family::SquareCorner(Sign::Negative) => "square-corner-neg",
            Family::SquareCorner(Sign::Positive) => "square-corner-pos",
            Family::SquareComplex(ComplexLayout::Offset) => "square-complex-offset",
            Family::SquareComplex(ComplexLayout::Straddle) => "square-complex-straddle",
            Family::TwoHoles => "two-holes",
            Family::CubeBox(Sign::Negative) => "cube-box-neg",
            Family::CubeBox(Sign::Positive) => "cube-box-pos",
            Family::CubeCorner(Sign::Negative) => "cube-corner-neg",
            Family::CubeCorner(Sign::Positive) => "cube-corner-pos",
            Family::Round => "round",
            Family::Fillet => "fillet",
        }
    }

    pub const ALL: [Family; 16] = [
        Family::DiskHole(HoleShape::Star),
        Family::DiskHole(HoleShape::Circle),
        Family::DiskHole(HoleShape::Square),
        Family::SquareHalfDisk(Sign::Negative),
        Family::SquareHalfDisk(Sign::Positive),
        Family::SquareCorner(Sign::Negative),
        Family::SquareCorner(Sign::Positive),
        Family::SquareComplex(ComplexLayout::Offset),
        Family::SquareComplex(ComplexLayout::Straddle),
        Family::TwoHoles,
        Family::CubeBox(Sign::Negative),
        Family::CubeBox(Sign::Positive),
        Family::CubeCorner(Sign::Negative),
        Family::CubeCorner(Sign::Positive),
        Family::Round,
        Family::Fillet,
    ];

    pub fn from_name(name: &str) -> Result<Family> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::Configuration(format!("unknown geometry family `{name}`")))
    }
}

/// Family parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    /// Feature size: ε, the hole radius r, the round radius R, or the small
    /// hole radius of the two-hole family. Ignored by the fillet family.
    pub size: f64,
    pub extension: ExtensionChoice,
}

impl Params {
    pub fn new(size: f64) -> Self {
        Params { size, extension: ExtensionChoice::Identity }
    }

    pub fn with_extension(mut self, extension: ExtensionChoice) -> Self {
        self.extension = extension;
        self
    }
}

/// An exact parametric boundary primitive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Primitive {
    /// Straight segment from `a` to `b` (2D).
    Segment { a: [f64; 2], b: [f64; 2] },
    /// Circular arc, angle running from `theta0` to `theta1` (2D).
    Arc { center: [f64; 2], radius: f64, theta0: f64, theta1: f64 },
    /// Planar parallelogram `origin + s u + t v`, `s, t ∈ [0, 1]` (3D).
    Rect { origin: Point, u: Point, v: Point },
}

impl Primitive {
    /// Analytic length or area.
    pub fn measure(&self) -> f64 {
        match *self {
            Primitive::Segment { a, b } => (b[0] - a[0]).hypot(b[1] - a[1]),
            Primitive::Arc { radius, theta0, theta1, .. } => radius * (theta1 - theta0).abs(),
            Primitive::Rect { u, v, .. } => norm(&cross(&u, &v)),
        }
    }

    /// Measure by composite Gauss quadrature of the parametrisation's speed,
    /// with the derivative taken by central differences of [`Primitive::point_at`].
    pub fn measure_by_quadrature(&self, subdivisions: usize) -> f64 {
        let (x, w) = crate::quadrature::gauss_legendre(6);
        let n = subdivisions.max(1);
        let speed = |s: f64, t: f64| -> f64 {
            let h = 1e-6;
            match self {
                Primitive::Rect { .. } => {
                    let ds = sub(&self.point_at2(s + h, t), &self.point_at2(s - h, t));
                    let dt = sub(&self.point_at2(s, t + h), &self.point_at2(s, t - h));
                    norm(&cross(&ds, &dt)) / (4.0 * h * h)
                }
                _ => norm(&sub(&self.point_at(s + h), &self.point_at(s - h))) / (2.0 * h),
            }
        };
        let mut total = 0.0;
        match self {
            Primitive::Rect { .. } => {
                for a in 0..n {
                    for b in 0..n {
                        for (i, xi) in x.iter().enumerate() {
                            for (j, xj) in x.iter().enumerate() {
                                let s = (a as f64 + 0.5 * (xi + 1.0)) / n as f64;
                                let t = (b as f64 + 0.5 * (xj + 1.0)) / n as f64;
                                total += w[i] * w[j] * speed(s, t) * 0.25 / (n * n) as f64;
                            }
                        }
                    }
                }
            }
            _ => {
                for a in 0..n {
                    for (i, xi) in x.iter().enumerate() {
                        let s = (a as f64 + 0.5 * (xi + 1.0)) / n as f64;
                        total += w[i] * speed(s, 0.0) * 0.5 / n as f64;
                    }
                }
            }
        }
        total
    }

    /// Point at curve parameter `t ∈ [0, 1]` (for rectangles, the `s = t` diagonal is not
    /// meaningful; use [`Primitive::point_at2`]).
    pub fn point_at(&self, t: f64) -> Point {
        match *self {
            Primitive::Segment { a, b } => {
                [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), 0.0]
            }
            Primitive::Arc { center, radius, theta0, theta1 } => {
                let th = theta0 + t * (theta1 - theta0);
                [center[0] + radius * th.cos(), center[1] + radius * th.sin(), 0.0]
            }
            Primitive::Rect { .. } => self.point_at2(t, 0.0),
        }
    }

    /// Point at surface parameters `(s, t)` of a rectangle.
    pub fn point_at2(&self, s: f64, t: f64) -> Point {
        match *self {
            Primitive::Rect { origin, u, v } => {
                [origin[0] + s * u[0] + t * v[0], origin[1] + s * u[1] + t * v[1], origin[2] + s * u[2] + t * v[2]]
            }
            _ => self.point_at(s),
        }
    }

    /// Euclidean distance from `p` to the primitive.
    pub fn distance(&self, p: &Point) -> f64 {
        match *self {
            Primitive::Segment { a, b } => {
                let d = [b[0] - a[0], b[1] - a[1]];
                let len2 = d[0] * d[0] + d[1] * d[1];
                let t = if len2 > 0.0 {
                    (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
            }
            Primitive::Arc { center, radius, theta0, theta1 } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                let (lo, hi) = if theta0 <= theta1 { (theta0, theta1) } else { (theta1, theta0) };
                let tau = core::f64::consts::TAU;
                let mut th = dy.atan2(dx);
                while th < lo {
                    th += tau;
                }
                while th > lo + tau {
                    th -= tau;
                }
                if th <= hi {
                    (dx.hypot(dy) - radius).abs()
                } else {
                    let e0 = self.point_at(0.0);
                    let e1 = self.point_at(1.0);
                    (p[0] - e0[0]).hypot(p[1] - e0[1]).min((p[0] - e1[0]).hypot(p[1] - e1[1]))
                }
            }
            Primitive::Rect { origin, u, v } => {
                // Closest point by projection onto the plane, clamped to the parallelogram
                // (exact for rectangles, which are the only ones used).
                let q = sub(p, &origin);
                let s = (dot(&q, &u) / dot(&u, &u)).clamp(0.0, 1.0);
                let t = (dot(&q, &v) / dot(&v, &v)).clamp(0.0, 1.0);
                norm(&sub(p, &self.point_at2(s, t)))
            }
        }
    }

    /// A set of sample points covering the primitive (used for diameters).
    fn samples(&self, n: usize) -> Vec<Point> {
        let mut out = Vec::new();
        match self {
            Primitive::Rect { .. } => {
                for i in 0..=n {
                    for j in 0..=n {
                        out.push(self.point_at2(i as f64 / n as f64, j as f64 / n as f64));
                    }
                }
            }
            _ => {
                for i in 0..=n {
                    out.push(self.point_at(i as f64 / n as f64));
                }
            }
        }
        out
    }
}

/// A tagged boundary piece, possibly made of several connected components.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPiece {
    pub tag: Tag,
    /// Owning feature for feature tags; `None` for the outer boundary.
    pub feature: Option<usize>,
    /// Connected components, each a chain of primitives.
    pub components: Vec<Vec<Primitive>>,
}

impl BoundaryPiece {
    pub fn measure(&self) -> f64 {
        self.components.iter().flatten().map(Primitive::measure).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.components.iter().all(|c| c.is_empty())
    }

    pub fn distance(&self, p: &Point) -> f64 {
        self.components
            .iter()
            .flatten()
            .map(|q| q.distance(p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Analytic size data of one feature, used by the invariant checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureInfo {
    /// Characteristic length (ε, r, R, …) used for mesh-size bounds.
    pub size: f64,
    pub sign: FeatureSign,
    /// Measures (area in 2D, volume in 3D) of F_n, F_p and F̃_p.
    pub neg_volume: f64,
    pub pos_volume: f64,
    pub ext_volume: f64,
    /// Measures of ∂F_n, ∂F_p and ∂F̃_p.
    pub neg_boundary: f64,
    pub pos_boundary: f64,
    pub ext_boundary: f64,
}

/// Exact description of the original and defeatured geometries.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainDescription {
    pub dim: usize,
    pub family: Family,
    pub params: Params,
    pub feature_sign: FeatureSign,
    pub features: Vec<FeatureInfo>,
    /// Every tag of every feature plus the outer boundary tags, empty pieces included.
    pub pieces: Vec<BoundaryPiece>,
    /// False for non-Lipschitz features (rounds, fillets) not covered by the theory.
    pub theory_covered: bool,
    /// Non-fatal heuristic violations (isotropy of σ components).
    pub warnings: Vec<String>,
}

impl DomainDescription {
    pub fn piece(&self, tag: Tag, feature: Option<usize>) -> Option<&BoundaryPiece> {
        self.pieces.iter().find(|p| p.tag == tag && p.feature == feature)
    }

    /// Analytic measure of a tag (0 for empty or absent pieces).
    pub fn measure(&self, tag: Tag, feature: Option<usize>) -> f64 {
        self.piece(tag, feature).map_or(0.0, BoundaryPiece::measure)
    }

    /// Whether a point on the outer boundary lies on Γ_D. `scale` is the local
    /// face size; points within a quarter of it from Γ_D are accepted, which
    /// absorbs the chord sag of polygonal approximations of curved Γ_D.
    pub fn is_dirichlet(&self, p: &Point, scale: f64) -> bool {
        self.pieces
            .iter()
            .filter(|q| q.tag == Tag::Dirichlet)
            .any(|q| q.distance(p) <= 0.25 * scale)
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    /// Sum of the analytic measures of σ ∈ Σ for one feature.
    pub fn sigma_measure(&self, feature: usize) -> f64 {
        Tag::SIGMA.iter().map(|&t| self.measure(t, Some(feature))).sum()
    }
}

/// Measures of every tag, keyed by `(tag, feature)`.
pub fn boundary_measures(domain: &DomainDescription) -> BTreeMap<(Tag, Option<usize>), f64> {
    domain.pieces.iter().map(|p| ((p.tag, p.feature), p.measure())).collect()
}

/// Verify the partition invariants of a domain description; returns the
/// isotropy warnings on success.
pub fn check_invariants(domain: &DomainDescription) -> Result<Vec<String>> {
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300);
    for (k, info) in domain.features.iter().enumerate() {
        let m = |t| domain.measure(t, Some(k));
        let checks = [
            ("γ_n ∪ γ_0n = ∂F_n", m(Tag::GammaN) + m(Tag::Gamma0N), info.neg_boundary),
            (
                "γ_s ∪ γ_r ∪ γ_0p = ∂F_p",
                m(Tag::GammaS) + m(Tag::GammaR) + m(Tag::Gamma0P),
                info.pos_boundary,
            ),
            (
                "γ_s ∪ γ̃ ∪ γ_0p = ∂F̃_p",
                m(Tag::GammaS) + m(Tag::GammaTilde) + m(Tag::Gamma0P),
                info.ext_boundary,
            ),
        ];
        for (what, lhs, rhs) in checks {
            if !rel(lhs, rhs) {
                return Err(Error::InvalidGeometry(format!(
                    "feature {k}: {what} violated ({lhs} vs {rhs})"
                )));
            }
        }
        let neg_empty = m(Tag::GammaN) + m(Tag::Gamma0N) == 0.0;
        let pos_empty = m(Tag::GammaS) + m(Tag::GammaR) + m(Tag::Gamma0P) == 0.0;
        let ok = match info.sign {
            FeatureSign::Negative => !neg_empty && pos_empty,
            FeatureSign::Positive => neg_empty && !pos_empty,
            FeatureSign::Complex => !neg_empty && !pos_empty,
        };
        if !ok {
            return Err(Error::InvalidGeometry(format!(
                "feature {k}: tagged pieces inconsistent with its sign {:?}",
                info.sign
            )));
        }
    }
    // Γ_D must not touch feature boundaries along a set of positive measure: sample
    // each feature piece and require samples away from Γ_D except at isolated points.
    for piece in domain.pieces.iter().filter(|p| p.tag.is_feature_tag()) {
        for prim in piece.components.iter().flatten() {
            let samples = prim.samples(16);
            let touching = samples
                .iter()
                .filter(|s| {
                    domain
                        .pieces
                        .iter()
                        .filter(|q| q.tag == Tag::Dirichlet)
                        .any(|q| q.distance(s) < 1e-12)
                })
                .count();
            if touching > 2 {
                return Err(Error::InvalidGeometry(format!(
                    "{} of feature {:?} touches Γ_D",
                    piece.tag.name(),
                    piece.feature
                )));
            }
        }
    }
    Ok(isotropy_warnings(domain))
}

/// Aspect heuristic for σ components: the ratio of the component's measure
/// (raised to 1/(n-1)) to its diameter should stay within [0.1, 10].
pub fn isotropy_warnings(domain: &DomainDescription) -> Vec<String> {
    let mut out = Vec::new();
    for piece in domain.pieces.iter().filter(|p| Tag::SIGMA.contains(&p.tag)) {
        for comp in &piece.components {
            if comp.is_empty() {
                continue;
            }
            let pts: Vec<Point> = comp.iter().flat_map(|p| p.samples(8)).collect();
            let mut diam = 0.0f64;
            for a in &pts {
                for b in &pts {
                    diam = diam.max(norm(&sub(a, b)));
                }
            }
            let meas: f64 = comp.iter().map(Primitive::measure).sum();
            let size = if domain.dim == 3 { meas.sqrt() } else { meas };
            let ratio = size / diam;
            if !(0.1..=10.0).contains(&ratio) {
                out.push(format!(
                    "{} of feature {:?}: component aspect ratio {ratio:.3} outside [0.1, 10]",
                    piece.tag.name(),
                    piece.feature
                ));
            }
        }
    }
    out
}

pub(crate) fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &Point, b: &Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}
