use approx::assert_relative_eq;
use defeature_core::fem::mesh_volume;
use defeature_core::geometry::{HoleShape, Sign};
use defeature_core::mesh::{MeshKind, Region, NONE};
use defeature_core::{boundary_quadrature, build_domain, generate_pair, Family, MeshOptions, Params, Tag};

fn pair(family: Family, size: f64) -> (defeature_core::DomainDescription, defeature_core::MeshPair) {
    let d = build_domain(family, Params::new(size)).unwrap();
    let p = generate_pair(&d, &MeshOptions::for_dim(d.dim)).unwrap();
    (d, p)
}

#[test]
fn polygonal_volumes_are_exact() {
    let (_, p) = pair(Family::SquareCorner(Sign::Negative), 0.1);
    assert_relative_eq!(mesh_volume(&p.exact), 0.99, max_relative = 1e-12);
    assert_relative_eq!(mesh_volume(&p.defeatured), 1.0, max_relative = 1e-12);
    let (_, p) = pair(Family::SquareCorner(Sign::Positive), 0.1);
    assert_relative_eq!(mesh_volume(&p.exact), 1.01, max_relative = 1e-12);
    let (_, p) = pair(Family::CubeBox(Sign::Negative), 0.1);
    assert_relative_eq!(mesh_volume(&p.exact), 1.0 - 1e-3, max_relative = 1e-12);
}

#[test]
fn boundary_weights_sum_to_measures() {
    let (d, p) = pair(Family::SquareComplex(defeature_core::geometry::ComplexLayout::Offset), 0.01);
    let mut checked = 0;
    for tag in Tag::ALL.into_iter().filter(|t| d.measure(*t, Some(0)) > 0.0 && p.exact.has_tag(*t, Some(0))) {
        checked += 1;
        let pts = boundary_quadrature(&p.exact, tag, Some(0), 4).unwrap();
        let w: f64 = pts.iter().map(|b| b.weight).sum();
        assert_relative_eq!(w, d.measure(tag, Some(0)), max_relative = 1e-12);
    }
    assert!(checked >= 2);
    let (d, p) = pair(Family::DiskHole(HoleShape::Circle), 0.1);
    let w: f64 = boundary_quadrature(&p.exact, Tag::GammaN, Some(0), 4).unwrap().iter().map(|b| b.weight).sum();
    // Polyline approximation of the circle.
    assert_relative_eq!(w, d.measure(Tag::GammaN, Some(0)), max_relative = 1e-2);
}

#[test]
fn normals_are_unit_and_outward_on_the_hole() {
    let (_, p) = pair(Family::DiskHole(HoleShape::Circle), 0.1);
    for b in boundary_quadrature(&p.exact, Tag::GammaN, Some(0), 2).unwrap() {
        let n = b.normal;
        assert_relative_eq!(n[0].hypot(n[1]), 1.0, max_relative = 1e-12);
        // Out of Ω means into the hole, toward the centre.
        assert!(n[0] * b.point[0] + n[1] * b.point[1] < 0.0);
    }
}

#[test]
fn meshes_are_nested_in_the_master() {
    let (_, p) = pair(Family::SquareComplex(defeature_core::geometry::ComplexLayout::Straddle), 0.01);
    assert_eq!(p.exact.kind, MeshKind::Exact);
    assert!(p.exact.region.iter().all(|r| !matches!(r, Region::Neg(_))));
    assert!(p.defeatured.region.iter().all(|r| !matches!(r, Region::Pos(_))));
    let mut shared = 0;
    for (l, &g) in p.defeatured.global_vertex.iter().enumerate() {
        let e = p.exact.local_vertex[g as usize];
        if e != NONE {
            assert_eq!(p.defeatured.vertices[l], p.exact.vertices[e as usize]);
            shared += 1;
        }
    }
    assert!(shared > p.defeatured.n_vertices() / 2);
}

#[test]
fn too_coarse_resolution_is_reported() {
    let d = build_domain(Family::SquareHalfDisk(Sign::Negative), Params::new(0.01)).unwrap();
    let opts = MeshOptions { resolution: 2, ..MeshOptions::for_dim(2) };
    assert!(generate_pair(&d, &opts).is_err());
}
