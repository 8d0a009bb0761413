//! Built-in experiments, grouped by study:
//! `table1.*` feature shapes, `table2.*` feature sizes,
//! `fig7.*` 2D convergence, `fig10.*` 3D convergence, `fig11.*` choice of the
//! defeatured data, `table3.*` rounds and `table4.*` fillets.

use defeature_core::geometry::{ComplexLayout, ExtensionChoice, HoleShape, Sign};
use defeature_core::Family;

use crate::case::{CaseSpec, DataSpec, Expected};
use crate::error::{HarnessError, Result};

/// Summary line of a catalog entry.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub title: &'static str,
}

const F_FIG7: &str = "10*cos(3*pi*x)*sin(5*pi*y)";
/// The 2D convergence source restricted to Ω0: zero inside protrusions above y = 1.
const F_FIG7_IN_OMEGA0: &str = "if(y <= 1, 10*cos(3*pi*x)*sin(5*pi*y), 0)";
const F_FIG10: &str = "10*cos(3*pi*x)*sin(5*pi*y)*sin(7*pi*z)";

fn sweep(first: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| first / f64::powi(2.0, k as i32)).collect()
}

struct Def {
    id: &'static str,
    title: &'static str,
    build: fn() -> (Family, Vec<f64>, DataSpec),
    resolution: Option<usize>,
    extension: ExtensionChoice,
    expected: Expected,
}

fn expected(estimator: f64, error: f64, effectivity: f64) -> Expected {
    Expected { estimator: Some(estimator), error: Some(error), effectivity: Some(effectivity), slope: None }
}

fn expected_sweep(effectivity: Option<f64>, slope: f64) -> Expected {
    Expected { estimator: None, error: None, effectivity, slope: Some(slope) }
}

fn table1(shape: HoleShape, r: f64) -> (Family, Vec<f64>, DataSpec) {
    (Family::DiskHole(shape), vec![r], DataSpec::with_f("1"))
}

fn fig7(family: Family, f: &str) -> (Family, Vec<f64>, DataSpec) {
    (family, sweep(1e-2, 7), DataSpec::with_f(f))
}

fn fig10(family: Family) -> (Family, Vec<f64>, DataSpec) {
    (family, sweep(1e-2, 4), DataSpec::with_f(F_FIG10))
}

fn fig11(g: &str) -> (Family, Vec<f64>, DataSpec) {
    let mut d = DataSpec::with_f("1");
    d.g_feature = g.into();
    (Family::DiskHole(HoleShape::Circle), sweep(1e-2, 7), d)
}

fn round(r: f64) -> (Family, Vec<f64>, DataSpec) {
    let d = DataSpec { h: "x^2*(1-x)^2 + y^2*(1-y)^2".into(), ..Default::default() };
    (Family::Round, vec![r], d)
}

fn fillet() -> (Family, Vec<f64>, DataSpec) {
    let d = DataSpec { h: "cos(pi*x) + 10*cos(5*pi*x)".into(), ..Default::default() };
    (Family::Fillet, vec![0.5], d)
}

fn two_holes() -> (Family, Vec<f64>, DataSpec) {
    let d = DataSpec {
        f: "-128*exp(-8*(x+y))".into(),
        h: "exp(-8*(x+y))".into(),
        g: "-8*exp(-8*(x+y))".into(),
        ..Default::default()
    };
    (Family::TwoHoles, vec![1e-3], d)
}

const ID: ExtensionChoice = ExtensionChoice::Identity;

#[rustfmt::skip]
fn defs() -> Vec<Def> {
    vec![
        Def { id: "table1.star.a", title: "disk with a star hole, r = 1.83e-2 (perimeter 0.400)", build: || table1(HoleShape::Star, 1.83e-2), resolution: Some(32), extension: ID, expected: expected(1.98e-3, 1.56e-3, 1.27) },
        Def { id: "table1.circle.a", title: "disk with a circular hole, r = 6.37e-2 (perimeter 0.400)", build: || table1(HoleShape::Circle, 6.37e-2), resolution: None, extension: ID, expected: expected(1.21e-2, 8.42e-3, 1.45) },
        Def { id: "table1.square", title: "disk with a square hole, r = 5.00e-2 (perimeter 0.400)", build: || table1(HoleShape::Square, 5.0e-2), resolution: None, extension: ID, expected: expected(9.57e-3, 6.74e-3, 1.42) },
        Def { id: "table1.circle.b", title: "disk with a circular hole, r = 5.64e-2 (area 1.00e-2)", build: || table1(HoleShape::Circle, 5.64e-2), resolution: None, extension: ID, expected: expected(1.01e-2, 6.76e-3, 1.51) },
        Def { id: "table1.star.b", title: "disk with a star hole, r = 4.02e-2 (area 1.00e-2)", build: || table1(HoleShape::Star, 4.02e-2), resolution: Some(32), extension: ID, expected: expected(7.53e-3, 6.65e-3, 1.13) },
        Def { id: "table2.twoholes", title: "unit square with holes of radius 1e-3 and 1e-1", build: two_holes, resolution: Some(12), extension: ID, expected: expected(5.03e-2, 1.45e-2, 3.47) },
        Def { id: "fig7.neg.halfdisk", title: "2D negative half disk", build: || fig7(Family::SquareHalfDisk(Sign::Negative), F_FIG7), resolution: Some(32), extension: ID, expected: expected_sweep(Some(1.81), 1.0) },
        Def { id: "fig7.neg.corner", title: "2D negative corner square", build: || fig7(Family::SquareCorner(Sign::Negative), F_FIG7), resolution: Some(32), extension: ID, expected: expected_sweep(Some(1.78), 2.0) },
        Def { id: "fig7.pos.halfdisk", title: "2D positive half disk", build: || fig7(Family::SquareHalfDisk(Sign::Positive), F_FIG7_IN_OMEGA0), resolution: Some(32), extension: ID, expected: expected_sweep(Some(2.93), 1.0) },
        Def { id: "fig7.pos.corner", title: "2D positive corner square", build: || fig7(Family::SquareCorner(Sign::Positive), F_FIG7_IN_OMEGA0), resolution: Some(32), extension: ID, expected: expected_sweep(Some(3.22), 2.0) },
        Def { id: "fig7.complex.offset", title: "2D complex feature, protrusion beside a notch", build: || fig7(Family::SquareComplex(ComplexLayout::Offset), F_FIG7_IN_OMEGA0), resolution: Some(32), extension: ID, expected: expected_sweep(Some(1.71), 1.0) },
        Def { id: "fig7.complex.straddle", title: "2D complex feature, protrusion straddling a notch", build: || fig7(Family::SquareComplex(ComplexLayout::Straddle), F_FIG7_IN_OMEGA0), resolution: Some(32), extension: ID, expected: expected_sweep(Some(1.84), 1.0) },
        Def { id: "fig10.neg.box", title: "3D negative box at mid edge", build: || fig10(Family::CubeBox(Sign::Negative)), resolution: Some(10), extension: ID, expected: expected_sweep(Some(1.87), 1.5) },
        Def { id: "fig10.neg.corner", title: "3D negative box at the corner edge", build: || fig10(Family::CubeCorner(Sign::Negative)), resolution: Some(10), extension: ID, expected: expected_sweep(Some(1.92), 2.5) },
        Def { id: "fig10.pos.box", title: "3D positive box at mid edge", build: || fig10(Family::CubeBox(Sign::Positive)), resolution: Some(10), extension: ID, expected: expected_sweep(Some(3.10), 1.5) },
        Def { id: "fig10.pos.corner", title: "3D positive box at the corner edge", build: || fig10(Family::CubeCorner(Sign::Positive)), resolution: Some(10), extension: ID, expected: expected_sweep(Some(3.22), 2.5) },
        Def { id: "fig11.g1", title: "circular hole, g = 0 on the hole", build: || fig11("0"), resolution: None, extension: ID, expected: Expected::default() },
        Def { id: "fig11.g2", title: "circular hole, g = 1 on the hole", build: || fig11("1"), resolution: None, extension: ID, expected: Expected::default() },
        Def { id: "fig11.g3", title: "circular hole, g = 1/ε on the hole", build: || fig11("1/eps"), resolution: None, extension: ID, expected: Expected::default() },
        Def { id: "fig11.g4", title: "circular hole, g = ε^-3 on the hole", build: || fig11("eps^-3"), resolution: None, extension: ID, expected: Expected::default() },
        Def { id: "table3.round.r1", title: "round of radius R = 1", build: || round(1.0), resolution: Some(512), extension: ID, expected: expected(6.83e-3, 2.37e-3, 2.88) },
        Def { id: "table3.round.r099", title: "round of radius R = 0.99", build: || round(0.99), resolution: Some(512), extension: ID, expected: expected(6.48e-3, 2.27e-3, 2.85) },
        Def { id: "table3.round.r05", title: "round of radius R = 0.5", build: || round(0.5), resolution: Some(256), extension: ID, expected: expected(3.36e-4, 1.26e-4, 2.67) },
        Def { id: "table3.round.r025", title: "round of radius R = 0.25", build: || round(0.25), resolution: Some(128), extension: ID, expected: expected(2.08e-5, 7.77e-6, 2.67) },
        Def { id: "table3.round.r0125", title: "round of radius R = 0.125", build: || round(0.125), resolution: Some(128), extension: ID, expected: expected(1.30e-6, 4.86e-7, 2.67) },
        Def { id: "table4.fillet.bbox", title: "fillet, extension = bounding box", build: fillet, resolution: Some(32), extension: ExtensionChoice::BoundingBox, expected: expected(1.78, 2.92e-1, 6.11) },
        Def { id: "table4.fillet.arc", title: "fillet, extension = box minus a quarter disk", build: fillet, resolution: Some(32), extension: ExtensionChoice::CustomArc, expected: expected(1.71, 2.89e-1, 5.93) },
        Def { id: "table4.fillet.identity", title: "fillet, no extension", build: fillet, resolution: Some(32), extension: ID, expected: expected(1.33, 2.69e-1, 4.94) },
    ]
}

/// Identifiers and titles of every built-in case.
pub fn list() -> Vec<CatalogEntry> {
    defs().into_iter().map(|d| CatalogEntry { id: d.id, title: d.title }).collect()
}

/// The built-in case `id`.
pub fn case(id: &str) -> Result<CaseSpec> {
    let d = defs()
        .into_iter()
        .find(|d| d.id == id)
        .ok_or_else(|| HarnessError::Config(format!("unknown catalog case `{id}` (see `defeature list`)")))?;
    let (family, eps, data) = (d.build)();
    let mut spec = CaseSpec::new(d.id, d.title, family, eps, data)?;
    spec.extension = d.extension;
    if let Some(r) = d.resolution {
        spec.mesh.resolution = r;
    }
    spec.expected = d.expected;
    Ok(spec)
}
