use std::f64::consts::PI;

use approx::assert_relative_eq;
use defeature_core::geometry::{check_invariants, ExtensionChoice, HoleShape, Sign};
use defeature_core::{build_domain, Family, Params, Tag};

fn gamma_n(family: Family, size: f64) -> (f64, f64) {
    let d = build_domain(family, Params::new(size)).unwrap();
    (d.measure(Tag::GammaN, Some(0)), d.features[0].neg_volume)
}

#[test]
fn hole_perimeters_match_the_shape_comparison() {
    // Shapes of equal perimeter 0.400 and of equal area 1.00e-2.
    assert_relative_eq!(gamma_n(Family::DiskHole(HoleShape::Circle), 6.37e-2).0, 0.4, max_relative = 1e-3);
    assert_relative_eq!(gamma_n(Family::DiskHole(HoleShape::Square), 5.0e-2).0, 0.4, max_relative = 1e-12);
    assert_relative_eq!(gamma_n(Family::DiskHole(HoleShape::Star), 1.83e-2).0, 0.4, max_relative = 2e-3);
    assert_relative_eq!(gamma_n(Family::DiskHole(HoleShape::Circle), 5.64e-2).1, 1e-2, max_relative = 1e-3);
    assert_relative_eq!(gamma_n(Family::DiskHole(HoleShape::Star), 4.02e-2).1, 1e-2, max_relative = 3e-3);
}

#[test]
fn circle_measures() {
    let (perim, area) = gamma_n(Family::DiskHole(HoleShape::Circle), 0.1);
    assert_relative_eq!(perim, 0.2 * PI, max_relative = 1e-14);
    assert_relative_eq!(area, 0.01 * PI, max_relative = 1e-14);
}

#[test]
fn half_disk_split() {
    let e = 0.01;
    let neg = build_domain(Family::SquareHalfDisk(Sign::Negative), Params::new(e)).unwrap();
    assert_relative_eq!(neg.measure(Tag::GammaN, Some(0)), PI * e, max_relative = 1e-14);
    assert_relative_eq!(neg.measure(Tag::Gamma0N, Some(0)), 2.0 * e, max_relative = 1e-14);
    let pos = build_domain(Family::SquareHalfDisk(Sign::Positive), Params::new(e)).unwrap();
    assert_relative_eq!(pos.measure(Tag::GammaR, Some(0)), 0.0, epsilon = 1e-15);
    assert_relative_eq!(pos.measure(Tag::Gamma0P, Some(0)), 2.0 * e, max_relative = 1e-14);
}

#[test]
fn every_family_satisfies_the_partition_invariants() {
    for family in Family::ALL {
        let size = match family {
            Family::Round | Family::Fillet => 0.5,
            Family::TwoHoles => 1e-3,
            _ => 0.05,
        };
        for ext in ExtensionChoice::ALL {
            if let Ok(d) = build_domain(family, Params::new(size).with_extension(ext)) {
                check_invariants(&d).unwrap_or_else(|e| panic!("{family:?} {ext:?}: {e}"));
            }
        }
    }
}

#[test]
fn oversized_features_are_rejected() {
    assert!(build_domain(Family::SquareHalfDisk(Sign::Negative), Params::new(0.6)).is_err());
    assert!(build_domain(Family::DiskHole(HoleShape::Circle), Params::new(0.95)).is_err());
    assert!(build_domain(Family::CubeBox(Sign::Positive), Params::new(0.7)).is_err());
}

#[test]
fn names_round_trip() {
    for f in Family::ALL {
        assert_eq!(Family::from_name(f.name()).unwrap(), f);
    }
    for t in Tag::ALL {
        assert_eq!(Tag::from_name(t.name()).unwrap(), t);
    }
    for e in ExtensionChoice::ALL {
        assert_eq!(ExtensionChoice::from_name(e.name()).unwrap(), e);
    }
    assert!(Family::from_name("nope").is_err());
}
