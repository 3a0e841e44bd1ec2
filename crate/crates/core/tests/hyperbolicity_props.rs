use kahler_core::geometry::ModelMetric;
use kahler_core::hyperbolicity::{
    demailly_bound, mobius, poincare_distance, pluecker_genus, subharmonicity_defect, validate_surface_example,
    CurveData, DiscMap, SurfaceExampleParams,
};
use kahler_core::linalg::c;
use kahler_core::report::Status;
use kahler_core::Complex64;
use proptest::prelude::*;

fn disc_point() -> impl Strategy<Value = Complex64> {
    (0.0..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(r, th)| Complex64::from_polar(r, th))
}

#[test]
fn distance_from_origin() {
    for r in [0.0, 0.1, 0.5, 0.9] {
        assert!((poincare_distance(c(0.0, 0.0), c(0.0, r)).unwrap() - r.atanh()).abs() < 1e-14);
    }
    assert!(poincare_distance(c(1.0, 0.0), c(0.0, 0.0)).is_err());
}

#[test]
fn disc_into_poincare_with_half_speed() {
    // f(t) = t/2: ‖f′‖² = ¼(1 − |t|²/4)⁻², whose log-Laplacian at 0 is ½,
    // and κ a = 2 · ¼ = ½
    let f = DiscMap::scalar(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
    let r = subharmonicity_defect(&ModelMetric::poincare_disc(1.0).field(), &f, c(0.0, 0.0), 0.0, 2.0).unwrap();
    assert!((r.lhs - 0.5).abs() < 1e-12);
    assert!((r.rhs - 0.5).abs() < 1e-12);
    assert_eq!(r.status, Status::Pass);
}

#[test]
fn regularized_flat_square() {
    // f(t) = t² in ℂ: ∂∂̄ log(4|t|² + ε) = 4ε/(4|t|² + ε)²
    let f = DiscMap::scalar(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let flat = ModelMetric::flat(1).field();
    for (t, eps) in [(c(0.0, 0.0), 0.1), (c(0.3, -0.2), 0.01)] {
        let r = subharmonicity_defect(&flat, &f, t, eps, 0.0).unwrap();
        let expected = 4.0 * eps / (4.0 * t.norm_sqr() + eps).powi(2);
        assert!((r.lhs - expected).abs() < 1e-10 * expected, "{} vs {expected}", r.lhs);
        assert_eq!(r.status, Status::Pass);
    }
    assert!(subharmonicity_defect(&flat, &f, c(0.0, 0.0), 0.0, 0.0).is_err());
}

#[test]
fn surface_example_passes_iff_every_child_passes() {
    for (g, a, b, d) in [(2, 4, 5, 4), (3, 7, 9, 5), (2, 2, 4, 4), (1, 4, 5, 4), (2, 4, 5, 2)] {
        let r = validate_surface_example(&SurfaceExampleParams { g, a, b, d });
        let children_pass = r.children.iter().all(|ch| ch.status == Status::Pass);
        assert_eq!(r.status == Status::Pass, children_pass, "({g},{a},{b},{d})");
    }
    assert_eq!(pluecker_genus(4).unwrap(), 3);
}

proptest! {
    #[test]
    fn distance_triangle_and_symmetry(z in disc_point(), w in disc_point(), v in disc_point()) {
        let (dzw, dwv, dzv) = (
            poincare_distance(z, w).unwrap(),
            poincare_distance(w, v).unwrap(),
            poincare_distance(z, v).unwrap(),
        );
        prop_assert!(dzv <= dzw + dwv + 1e-12);
        prop_assert!((dzw - poincare_distance(w, z).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn mobius_maps_are_isometries(z in disc_point(), w in disc_point(), a in disc_point(), th in 0.0..6.3f64) {
        let m = mobius(a, th);
        let before = poincare_distance(z, w).unwrap();
        let after = poincare_distance(m(z), m(w)).unwrap();
        prop_assert!((before - after).abs() < 1e-8 * before.max(1.0));
    }

    #[test]
    fn criterion_is_monotone(g in 0u32..6, deg in 0.1..20.0f64, k1 in 0.0..5.0f64, k2 in 0.0..5.0f64) {
        // raising κ raises the right side, so obstruction persists
        let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        let curve = CurveData::new(g, deg, vec![]).unwrap();
        let a = demailly_bound(&curve, lo).unwrap();
        let b = demailly_bound(&curve, hi).unwrap();
        prop_assert!(b.rhs >= a.rhs);
        prop_assert!(!a.obstructed() || b.obstructed());
    }
}
