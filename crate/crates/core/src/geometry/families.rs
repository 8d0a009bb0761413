use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

use super::*;

type Comp = Vec<Primitive>;

fn seg(a: [f64; 2], b: [f64; 2]) -> Primitive {
    Primitive::Segment { a, b }
}

fn arc(center: [f64; 2], radius: f64, theta0: f64, theta1: f64) -> Primitive {
    Primitive::Arc { center, radius, theta0, theta1 }
}

fn rect(origin: Point, u: Point, v: Point) -> Primitive {
    Primitive::Rect { origin, u, v }
}

/// Collects pieces for one domain; tags not set explicitly stay empty.
struct PieceSet {
    features: usize,
    pieces: Vec<BoundaryPiece>,
}

impl PieceSet {
    fn new(features: usize) -> Self {
        let mut pieces = Vec::new();
        for k in 0..features {
            for tag in Tag::ALL.iter().copied().filter(|t| t.is_feature_tag()) {
                pieces.push(BoundaryPiece { tag, feature: Some(k), components: Vec::new() });
            }
        }
        for tag in [Tag::Dirichlet, Tag::NeumannRest] {
            pieces.push(BoundaryPiece { tag, feature: None, components: Vec::new() });
        }
        PieceSet { features, pieces }
    }

    fn add(&mut self, tag: Tag, feature: Option<usize>, comp: Comp) {
        debug_assert!(feature.map_or(true, |k| k < self.features));
        let comp: Comp = comp.into_iter().filter(|p| p.measure() > 0.0).collect();
        if comp.is_empty() {
            return;
        }
        let piece = self
            .pieces
            .iter_mut()
            .find(|p| p.tag == tag && p.feature == feature)
            .expect("piece slots are pre-populated");
        piece.components.push(comp);
    }
}

fn invalid(msg: &str) -> Error {
    Error::InvalidGeometry(String::from(msg))
}

/// Polygon vertices of the ten-branch star: 20 vertices alternating between
/// radius 2r and r at 18° steps, the first outer vertex on the +x axis.
pub fn star_vertices(r: f64) -> Vec<[f64; 2]> {
    (0..20)
        .map(|k| {
            let rho = if k % 2 == 0 { 2.0 * r } else { r };
            let th = k as f64 * PI / 10.0;
            [rho * th.cos(), rho * th.sin()]
        })
        .collect()
}

fn polygon_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        .abs()
}

fn closed_polygon(v: &[[f64; 2]]) -> Comp {
    (0..v.len()).map(|i| seg(v[i], v[(i + 1) % v.len()])).collect()
}

fn negative(size: f64, area: f64, perimeter: f64) -> FeatureInfo {
    FeatureInfo {
        size,
        sign: FeatureSign::Negative,
        neg_volume: area,
        pos_volume: 0.0,
        ext_volume: 0.0,
        neg_boundary: perimeter,
        pos_boundary: 0.0,
        ext_boundary: 0.0,
    }
}

fn positive(size: f64, area: f64, perimeter: f64) -> FeatureInfo {
    FeatureInfo {
        size,
        sign: FeatureSign::Positive,
        neg_volume: 0.0,
        pos_volume: area,
        ext_volume: area,
        neg_boundary: 0.0,
        pos_boundary: perimeter,
        ext_boundary: perimeter,
    }
}

/// Build the exact description of a family instance.
///
/// Errors name the violated invariant when the parameters would make the
/// feature empty, leave the domain, or touch Γ_D.
pub fn build_domain(family: Family, params: Params) -> Result<DomainDescription> {
    let s = params.size;
    if family != Family::Fillet && !(s.is_finite() && s > 0.0) {
        return Err(invalid("feature size must be positive (empty feature)"));
    }
    if params.extension != ExtensionChoice::Identity && family != Family::Fillet {
        return Err(Error::Configuration(format!(
            "extension choice {:?} is only available for the fillet family",
            params.extension
        )));
    }
    let mut theory_covered = true;
    let (ps, features, sign) = match family {
        Family::DiskHole(shape) => {
            let (comp, area, perim, extent) = match shape {
                HoleShape::Circle => {
                    (vec![arc([0.0, 0.0], s, 0.0, 2.0 * PI)], PI * s * s, 2.0 * PI * s, s)
                }
                HoleShape::Square => {
                    let v = [[-s, -s], [s, -s], [s, s], [-s, s]];
                    (closed_polygon(&v), 4.0 * s * s, 8.0 * s, s * 2.0f64.sqrt())
                }
                HoleShape::Star => {
                    let v = star_vertices(s);
                    let perim = 20.0 * (v[1][0] - v[0][0]).hypot(v[1][1] - v[0][1]);
                    (closed_polygon(&v), polygon_area(&v), perim, 2.0 * s)
                }
            };
            if extent >= 0.9 {
                return Err(invalid("hole must stay inside the unit disk away from Γ_D (extent < 0.9)"));
            }
            let mut ps = PieceSet::new(1);
            ps.add(Tag::GammaN, Some(0), comp);
            ps.add(Tag::Dirichlet, None, vec![arc([0.0, 0.0], 1.0, 0.0, 2.0 * PI)]);
            (ps, vec![negative(s, area, perim)], FeatureSign::Negative)
        }
        Family::SquareHalfDisk(sign) => {
            if s >= 0.5 {
                return Err(invalid("half disk must stay within the top side (ε < 0.5)"));
            }
            let mut ps = PieceSet::new(1);
            let diameter = vec![seg([0.5 - s, 1.0], [0.5 + s, 1.0])];
            let area = 0.5 * PI * s * s;
            let perim = PI * s + 2.0 * s;
            let info = match sign {
                Sign::Negative => {
                    ps.add(Tag::GammaN, Some(0), vec![arc([0.5, 1.0], s, PI, 2.0 * PI)]);
                    ps.add(Tag::Gamma0N, Some(0), diameter);
                    negative(s, area, perim)
                }
                Sign::Positive => {
                    ps.add(Tag::GammaS, Some(0), vec![arc([0.5, 1.0], s, 0.0, PI)]);
                    ps.add(Tag::Gamma0P, Some(0), diameter);
                    positive(s, area, perim)
                }
            };
            add_square_outer(&mut ps, &[(0.5 - s, 0.5 + s)], 1.0);
            (ps, vec![info], sign_of(sign))
        }
        Family::SquareCorner(sign) => {
            if s >= 1.0 {
                return Err(invalid("corner square would reach Γ_D (ε < 1)"));
            }
            let a = 1.0 - s;
            let mut ps = PieceSet::new(1);
            let info = match sign {
                Sign::Negative => {
                    ps.add(Tag::GammaN, Some(0), vec![seg([a, 1.0], [a, a]), seg([a, a], [1.0, a])]);
                    ps.add(Tag::Gamma0N, Some(0), vec![seg([1.0, a], [1.0, 1.0]), seg([1.0, 1.0], [a, 1.0])]);
                    ps.add(Tag::Dirichlet, None, vec![seg([0.0, 0.0], [1.0, 0.0])]);
                    ps.add(Tag::NeumannRest, None, vec![seg([1.0, 0.0], [1.0, a])]);
                    ps.add(Tag::NeumannRest, None, vec![seg([a, 1.0], [0.0, 1.0]), seg([0.0, 1.0], [0.0, 0.0])]);
                    negative(s, s * s, 4.0 * s)
                }
                Sign::Positive => {
                    ps.add(Tag::Gamma0P, Some(0), vec![seg([a, 1.0], [1.0, 1.0])]);
                    ps.add(
                        Tag::GammaS,
                        Some(0),
                        vec![seg([1.0, 1.0], [1.0, 1.0 + s]), seg([1.0, 1.0 + s], [a, 1.0 + s]), seg([a, 1.0 + s], [a, 1.0])],
                    );
                    ps.add(Tag::Dirichlet, None, vec![seg([0.0, 0.0], [1.0, 0.0])]);
                    ps.add(Tag::NeumannRest, None, vec![seg([1.0, 0.0], [1.0, 1.0])]);
                    ps.add(Tag::NeumannRest, None, vec![seg([a, 1.0], [0.0, 1.0]), seg([0.0, 1.0], [0.0, 0.0])]);
                    positive(s, s * s, 4.0 * s)
                }
            };
            (ps, vec![info], sign_of(sign))
        }
        Family::SquareComplex(layout) => {
            if s >= 0.5 {
                return Err(invalid("complex feature must stay within the top side (ε < 0.5)"));
            }
            // F_p = (p0, p1) × (1, 1+ε), F_n = (n0, n1) × (1-ε, 1).
            let (p0, p1, n0, n1) = match layout {
                ComplexLayout::Offset => (0.5 - s, 0.5, 0.5, 0.5 + s),
                ComplexLayout::Straddle => (0.5 - 0.75 * s, 0.5 + 0.25 * s, 0.5 - 0.25 * s, 0.5 + 0.75 * s),
            };
            let t = 1.0 + s;
            let b = 1.0 - s;
            let mut ps = PieceSet::new(1);
            ps.add(Tag::Gamma0P, Some(0), vec![seg([p0, 1.0], [p0.max(n0).min(p1), 1.0])]);
            let mut gs = vec![seg([p0, 1.0], [p0, t]), seg([p0, t], [p1, t]), seg([p1, t], [p1, 1.0])];
            if n0 < p1 {
                // The protrusion overhangs the hole: its bottom over F_n is on ∂Ω.
                gs.push(seg([p1, 1.0], [n0, 1.0]));
            }
            ps.add(Tag::GammaS, Some(0), gs);
            ps.add(Tag::GammaN, Some(0), vec![seg([n0, 1.0], [n0, b]), seg([n0, b], [n1, b]), seg([n1, b], [n1, 1.0])]);
            ps.add(Tag::Gamma0N, Some(0), vec![seg([n0, 1.0], [n1, 1.0])]);
            add_square_outer(&mut ps, &[(p0, n1)], 1.0);
            let info = FeatureInfo {
                size: s,
                sign: FeatureSign::Complex,
                neg_volume: s * s,
                pos_volume: s * s,
                ext_volume: s * s,
                neg_boundary: 4.0 * s,
                pos_boundary: 4.0 * s,
                ext_boundary: 4.0 * s,
            };
            (ps, vec![info], FeatureSign::Complex)
        }
        Family::TwoHoles => {
            let c1 = 1.1 * s;
            if s >= 0.3 {
                return Err(invalid("small hole must stay clear of the large one (r < 0.3)"));
            }
            let (c2, r2) = (0.89, 0.1);
            let mut ps = PieceSet::new(2);
            ps.add(Tag::GammaN, Some(0), vec![arc([c1, c1], s, 0.0, 2.0 * PI)]);
            ps.add(Tag::GammaN, Some(1), vec![arc([c2, c2], r2, 0.0, 2.0 * PI)]);
            ps.add(Tag::Dirichlet, None, vec![seg([0.0, 1.0], [0.0, 0.0]), seg([0.0, 0.0], [1.0, 0.0])]);
            ps.add(Tag::NeumannRest, None, vec![seg([1.0, 0.0], [1.0, 1.0]), seg([1.0, 1.0], [0.0, 1.0])]);
            let f1 = negative(s, PI * s * s, 2.0 * PI * s);
            let f2 = negative(r2, PI * r2 * r2, 2.0 * PI * r2);
            (ps, vec![f1, f2], FeatureSign::Negative)
        }
        Family::CubeBox(sign) | Family::CubeCorner(sign) => {
            if s >= 0.5 {
                return Err(invalid("box feature must stay inside the top face (ε < 0.5)"));
            }
            let corner = matches!(family, Family::CubeCorner(_));
            let x0 = if corner { 1.0 - s } else { 0.5 - 0.5 * s };
            let x1 = x0 + s;
            let mut ps = PieceSet::new(1);
            let ex = [s, 0.0, 0.0];
            let ey = [0.0, s, 0.0];
            let ez = [0.0, 0.0, s];
            let info = match sign {
                Sign::Negative => {
                    let y0 = 1.0 - s;
                    let mut inner = vec![rect([x0, y0, 0.0], ey, ez)];
                    let mut outer = vec![rect([x0, 1.0, 0.0], ex, ez), rect([x0, y0, 0.0], ex, ey)];
                    let right = rect([x1, y0, 0.0], ey, ez);
                    if corner {
                        outer.push(right);
                    } else {
                        inner.push(right);
                    }
                    inner.push(rect([x0, y0, 0.0], ex, ez));
                    inner.push(rect([x0, y0, s], ex, ey));
                    ps.add(Tag::GammaN, Some(0), inner);
                    ps.add(Tag::Gamma0N, Some(0), outer);
                    negative(s, s * s * s, 6.0 * s * s)
                }
                Sign::Positive => {
                    let y0 = 1.0;
                    ps.add(Tag::Gamma0P, Some(0), vec![rect([x0, y0, 0.0], ex, ez)]);
                    ps.add(
                        Tag::GammaS,
                        Some(0),
                        vec![
                            rect([x0, y0, 0.0], ey, ez),
                            rect([x1, y0, 0.0], ey, ez),
                            rect([x0, y0 + s, 0.0], ex, ez),
                            rect([x0, y0, 0.0], ex, ey),
                            rect([x0, y0, s], ex, ey),
                        ],
                    );
                    positive(s, s * s * s, 6.0 * s * s)
                }
            };
            ps.add(Tag::Dirichlet, None, vec![rect([0.0; 3], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0])]);
            (ps, vec![info], sign_of(sign))
        }
        Family::Round => {
            if s > 1.0 {
                return Err(invalid("round radius must not exceed the square side (R ≤ 1)"));
            }
            theory_covered = false;
            let c = [s, 1.0 - s];
            let mut ps = PieceSet::new(1);
            ps.add(Tag::GammaN, Some(0), vec![arc(c, s, 0.5 * PI, PI)]);
            ps.add(Tag::Gamma0N, Some(0), vec![seg([0.0, 1.0 - s], [0.0, 1.0]), seg([0.0, 1.0], [s, 1.0])]);
            ps.add(Tag::Dirichlet, None, vec![seg([0.0, 0.0], [1.0, 0.0]), seg([1.0, 0.0], [1.0, 1.0])]);
            ps.add(Tag::NeumannRest, None, vec![seg([1.0, 1.0], [s, 1.0])]);
            ps.add(Tag::NeumannRest, None, vec![seg([0.0, 1.0 - s], [0.0, 0.0])]);
            (ps, vec![negative(s, s * s * (1.0 - 0.25 * PI), s * (2.0 + 0.5 * PI))], FeatureSign::Negative)
        }
        Family::Fillet => {
            theory_covered = false;
            let rf = 0.5;
            let c = [1.0, 1.0];
            let mut ps = PieceSet::new(1);
            ps.add(Tag::Gamma0P, Some(0), vec![seg([0.5, 1.0], [0.5, 0.5]), seg([0.5, 0.5], [1.0, 0.5])]);
            let fillet_arc = vec![arc(c, rf, PI, 1.5 * PI)];
            let pos_area = 0.25 - PI * rf * rf / 4.0;
            let pos_boundary = 1.0 + 0.5 * PI * rf;
            let (ext_volume, ext_boundary) = match params.extension {
                ExtensionChoice::Identity => {
                    ps.add(Tag::GammaS, Some(0), fillet_arc);
                    (pos_area, pos_boundary)
                }
                ExtensionChoice::BoundingBox => {
                    ps.add(Tag::GammaR, Some(0), fillet_arc);
                    ps.add(Tag::GammaTilde, Some(0), vec![seg([0.5, 1.0], [1.0, 1.0]), seg([1.0, 1.0], [1.0, 0.5])]);
                    (0.25, 2.0)
                }
                ExtensionChoice::CustomArc => {
                    let rc = 0.25;
                    ps.add(Tag::GammaR, Some(0), fillet_arc);
                    ps.add(
                        Tag::GammaTilde,
                        Some(0),
                        vec![seg([0.5, 1.0], [1.0 - rc, 1.0]), arc(c, rc, PI, 1.5 * PI), seg([1.0, 1.0 - rc], [1.0, 0.5])],
                    );
                    (0.25 - PI * rc * rc / 4.0, 1.0 + 2.0 * (0.5 - rc) + 0.5 * PI * rc)
                }
            };
            ps.add(Tag::Dirichlet, None, vec![seg([0.0, 0.0], [1.0, 0.0])]);
            ps.add(Tag::NeumannRest, None, vec![seg([1.0, 0.0], [1.0, 0.5])]);
            ps.add(Tag::NeumannRest, None, vec![seg([0.5, 1.0], [0.0, 1.0]), seg([0.0, 1.0], [0.0, 0.0])]);
            let info = FeatureInfo {
                size: rf,
                sign: FeatureSign::Positive,
                neg_volume: 0.0,
                pos_volume: pos_area,
                ext_volume,
                neg_boundary: 0.0,
                pos_boundary,
                ext_boundary,
            };
            (ps, vec![info], FeatureSign::Positive)
        }
    };
    let mut domain = DomainDescription {
        dim: family.dim(),
        family,
        params,
        feature_sign: sign,
        features,
        pieces: ps.pieces,
        theory_covered,
        warnings: Vec::new(),
    };
    domain.warnings = check_invariants(&domain)?;
    Ok(domain)
}

fn sign_of(sign: Sign) -> FeatureSign {
    match sign {
        Sign::Negative => FeatureSign::Negative,
        Sign::Positive => FeatureSign::Positive,
    }
}

/// Outer boundary of the unit square for the top-side families: Γ_D at the
/// bottom, Neumann elsewhere except the listed gaps on the top side.
fn add_square_outer(ps: &mut PieceSet, top_gaps: &[(f64, f64)], top: f64) {
    ps.add(Tag::Dirichlet, None, vec![seg([0.0, 0.0], [1.0, 0.0])]);
    let mut x = 1.0;
    let mut comp = vec![seg([1.0, 0.0], [1.0, top])];
    let mut gaps: Vec<(f64, f64)> = top_gaps.to_vec();
    gaps.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    for (lo, hi) in gaps {
        comp.push(seg([x, top], [hi, top]));
        ps.add(Tag::NeumannRest, None, core::mem::take(&mut comp));
        x = lo;
    }
    comp.push(seg([x, top], [0.0, top]));
    comp.push(seg([0.0, top], [0.0, 0.0]));
    ps.add(Tag::NeumannRest, None, comp);
}
