use approx::assert_relative_eq;
use defeature_core::defeaturing::{FlatElement, TraceSample, ETA};
use defeature_core::fem::scalar;
use defeature_core::geometry::HoleShape;
use defeature_core::{
    analyze, build_domain, c_sigma, clement_project, estimator, estimator_tilde, flux_residual, generate_pair, oscillation, AnalysisOptions,
    Family, MeshOptions, Params, ProblemData, SigmaTrace, Tag,
};
use proptest::prelude::*;

/// A straight σ on [0, len] × {0}, cut into `parts` elements with four Gauss
/// points each, carrying the defect `d(x)`.
fn segment(len: f64, parts: usize, d: impl Fn(f64) -> f64) -> SigmaTrace {
    let h = len / parts as f64;
    let gauss = [(-0.861_136_311_594_052_6, 0.347_854_845_137_453_8), (-0.339_981_043_584_856_3, 0.652_145_154_862_546_2)];
    let gauss = [gauss[0], gauss[1], (-gauss[1].0, gauss[1].1), (-gauss[0].0, gauss[0].1)];
    let mut partition = Vec::new();
    let mut samples = Vec::new();
    for k in 0..parts {
        let a = k as f64 * h;
        partition.push(FlatElement { vertices: [[a, 0.0, 0.0], [a + h, 0.0, 0.0], [0.0; 3], [0.0; 3]], n_vertices: 2 });
        for (s, w) in gauss {
            let x = a + 0.5 * h * (1.0 + s);
            samples.push(TraceSample { point: [x, 0.0, 0.0], weight: 0.5 * h * w, normal: [0.0, 1.0, 0.0], part: k as u32, s: [s, 0.0], defect: d(x) });
        }
    }
    SigmaTrace { tag: Tag::GammaN, feature: 0, dim: 2, measure: len, partition, samples }
}

#[test]
fn c_sigma_values() {
    assert_relative_eq!(c_sigma(2, 0.4).unwrap(), 0.4f64.ln().abs().sqrt(), max_relative = 1e-15);
    assert_relative_eq!(c_sigma(2, 0.9).unwrap(), ETA.sqrt(), max_relative = 1e-15);
    assert_relative_eq!(c_sigma(2, 10.0).unwrap(), 10f64.ln().sqrt(), max_relative = 1e-15);
    assert_eq!(c_sigma(3, 1e-6).unwrap(), 1.0);
    assert!(c_sigma(2, 0.0).is_err());
    assert!(c_sigma(2, f64::NAN).is_err());
    assert!(c_sigma(4, 1.0).is_err());
    assert!((ETA + ETA.ln()).abs() < 1e-12);
}

#[test]
fn estimator_two_sample_example() {
    // |σ| = 1, defects 1 and 3 on halves: mean 2, ‖d − d̄‖² = 1, c² = η.
    let t = segment(1.0, 1, |x| if x < 0.5 { 1.0 } else { 3.0 });
    let e = estimator(&[t.clone()], 2).unwrap();
    assert_relative_eq!(e.value, (1.0 + 4.0 * ETA).sqrt(), max_relative = 1e-14);
    assert_relative_eq!(e.sigma[0].mean, 2.0, max_relative = 1e-15);
    assert_relative_eq!(e.sigma[0].fluctuation, 1.0, max_relative = 1e-15);
    assert_relative_eq!(estimator_tilde(&[t.clone()], 2).unwrap(), (5.0 * ETA).sqrt(), max_relative = 1e-14);
    // In 3D the weights become |σ|^{1/2} and |σ|^{3/2} with c = 1.
    let t3 = SigmaTrace { dim: 3, measure: 4.0, ..t };
    let w: f64 = t3.samples.iter().map(|s| s.weight).sum();
    assert_relative_eq!(w, 1.0);
    let e3 = estimator(&[t3], 3).unwrap();
    assert_relative_eq!(e3.value, (2.0 * 1.0 + 8.0 * 4.0f64).sqrt(), max_relative = 1e-14);
}

#[test]
fn projection_reproduces_the_space_and_vanishes_on_the_ends() {
    let hat = |x: f64| 1.0 - (2.0 * x - 1.0).abs();
    let t = segment(1.0, 4, hat);
    let p = clement_project(&t, 1).unwrap();
    for (s, v) in t.samples.iter().zip(&p) {
        assert_relative_eq!(*v, s.defect, epsilon = 1e-13);
    }
    assert!(oscillation(&[t.clone()], 1, 2).unwrap() < 1e-12);
    // Constants do not vanish on the ends of an open σ, so only m ≥ 1 sees them,
    // and then not near the ends: osc > 0.
    let c = segment(1.0, 4, |_| 1.0);
    assert!(clement_project(&c, 0).unwrap().iter().all(|v| *v == 0.0));
    assert!(oscillation(&[c.clone()], 1, 2).unwrap() > 0.0);
    assert!(clement_project(&c, 4).is_err());
    // A quadratic is reproduced at m = 2.
    let q = segment(1.0, 3, |x| x * (1.0 - x));
    for (s, v) in q.samples.iter().zip(clement_project(&q, 2).unwrap()) {
        assert_relative_eq!(v, s.defect, epsilon = 1e-13);
    }
}

#[test]
fn oscillation_decays_at_order_m_plus_one() {
    // A smooth defect vanishing on ∂σ; the projection error in L² is O(h^{m+1}).
    let d = |x: f64| (std::f64::consts::PI * x).sin() * (1.0 + x);
    for m in 1..=3 {
        let osc: Vec<f64> = [4, 8, 16].iter().map(|&k| oscillation(&[segment(1.0, k, d)], m, 2).unwrap()).collect();
        let rate = (osc[0] / osc[2]).log2() / 2.0;
        assert!(rate >= (m + 1) as f64 - 0.15, "m = {m}: {osc:?}");
    }
}

fn circle_data(g_hole: f64) -> ProblemData {
    let mut d = ProblemData::with_source(scalar(|_| 1.0));
    d.g_feature = scalar(move |_| g_hole);
    d
}

#[test]
fn data_only_means_follow_flux_balance() {
    // f = 1 in the hole: ∫_γ ∂u0/∂n = |F|, so the mean of g − ∂u0/∂n is g − |F|/|γ|.
    for (shape, r, g, expected) in [
        (HoleShape::Circle, 0.01, 1.0, 1.0 - 0.01 / 2.0),
        (HoleShape::Square, 0.05, 0.0, -0.05 / 2.0),
        (HoleShape::Circle, 0.1, 0.0, -0.1 / 2.0),
    ] {
        let d = build_domain(Family::DiskHole(shape), Params::new(r)).unwrap();
        let pair = generate_pair(&d, &MeshOptions::for_dim(2)).unwrap();
        let flux = flux_residual(&pair, &d, &circle_data(g)).unwrap();
        assert_eq!(flux.len(), 1);
        assert_eq!(flux[0].tag, Tag::GammaN);
        assert_relative_eq!(flux[0].predicted_mean, expected, max_relative = 1e-3);
        assert!(!flux[0].compatible);
    }
}

#[test]
fn concentric_circle_matches_the_radial_solution() {
    // Unit disk, hole radius r, f = 1, u = 0 on the outer circle, zero flux
    // on the hole: u − u0 = (r²/2) log ρ, u0 = (1 − ρ²)/4, d = −r/2.
    let r: f64 = 6.37e-2;
    let err = 0.5 * r * r * (2.0 * std::f64::consts::PI * (1.0 / r).ln()).sqrt();
    let perim = 2.0 * std::f64::consts::PI * r;
    let est = perim.ln().abs().sqrt() * perim * r / 2.0;
    assert_relative_eq!(err, 8.4389e-3, max_relative = 1e-4);
    assert_relative_eq!(est, 1.2198e-2, max_relative = 1e-4);

    let d = build_domain(Family::DiskHole(HoleShape::Circle), Params::new(r)).unwrap();
    let pair = generate_pair(&d, &MeshOptions::for_dim(2)).unwrap();
    let a = analyze(&d, &pair, &circle_data(0.0), &AnalysisOptions::default()).unwrap();
    let rep = &a.report;
    assert_relative_eq!(rep.error.unwrap(), err, max_relative = 0.03);
    assert_relative_eq!(rep.estimator, est, max_relative = 0.03);
    assert!(rep.sigma[0].mean < 0.0);
}

proptest! {
    #[test]
    fn additivity_over_sigma(
        a in proptest::collection::vec(-10.0f64..10.0, 2..12),
        b in proptest::collection::vec(-10.0f64..10.0, 2..12),
        la in 1e-4f64..3.0, lb in 1e-4f64..3.0, n in 2usize..4,
    ) {
        let ta = segment(la, a.len(), |x| a[((x / la) * a.len() as f64) as usize % a.len()]);
        let mut tb = segment(lb, b.len(), |x| b[((x / lb) * b.len() as f64) as usize % b.len()]);
        tb.tag = Tag::GammaR;
        let (ta, tb) = (SigmaTrace { dim: n, ..ta }, SigmaTrace { dim: n, ..tb });
        let whole = estimator(&[ta.clone(), tb.clone()], n).unwrap().value.powi(2);
        let parts = estimator(&[ta], n).unwrap().value.powi(2) + estimator(&[tb], n).unwrap().value.powi(2);
        prop_assert!((whole - parts).abs() <= 1e-14 * whole.max(1e-300));
    }

    #[test]
    fn zero_iff_zero_defects(d in proptest::collection::vec(-1.0f64..1.0, 1..16), len in 1e-3f64..2.0, k in 0usize..32) {
        let z = segment(len, d.len(), |_| 0.0);
        prop_assert_eq!(estimator(&[z.clone()], 2).unwrap().value, 0.0);
        let mut one = z;
        let k = k % one.samples.len();
        one.samples[k].defect = if d[k % d.len()] == 0.0 { 0.5 } else { d[k % d.len()] };
        prop_assert!(estimator(&[one], 2).unwrap().value > 0.0);
    }

    #[test]
    fn constant_defects_give_the_mean_term(c in -5.0f64..5.0, len in 1e-4f64..3.0) {
        // Fluctuation vanishes: E = c_σ |σ|^{n/(2(n−1))} |d̄| and Ẽ = E.
        let t = segment(len, 3, |_| c);
        let e = estimator(&[t.clone()], 2).unwrap().value;
        let expected = c_sigma(2, len).unwrap() * len * c.abs();
        prop_assert!((e - expected).abs() <= 1e-12 * expected.max(1e-300));
        let et = estimator_tilde(&[t], 2).unwrap();
        prop_assert!((et - expected).abs() <= 1e-12 * expected.max(1e-300));
    }

    #[test]
    fn estimator_scales_linearly_with_defects(s in 1e-3f64..1e3, d in proptest::collection::vec(-1.0f64..1.0, 2..10)) {
        let t = segment(0.3, d.len(), |x| d[((x / 0.3) * d.len() as f64) as usize % d.len()]);
        let mut ts = t.clone();
        ts.samples.iter_mut().for_each(|p| p.defect *= s);
        let (e, es) = (estimator(&[t], 2).unwrap().value, estimator(&[ts], 2).unwrap().value);
        prop_assert!((es - s * e).abs() <= 1e-12 * es.max(1e-300));
    }
}
