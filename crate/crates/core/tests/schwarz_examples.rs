use kahler_core::geometry::{ChartPoint, ModelMetric};
use kahler_core::linalg::c;
use kahler_core::report::Status;
use kahler_core::schwarz::{
    ddbar_fd, estimate_lemma_checks, laplacian_equality_check, lemma_chain_check, trace_lemma_check, trace_state,
    wu_yau_inequality_check, MetricPair,
};
use proptest::prelude::*;

fn pair(base: ModelMetric, prime: ModelMetric, z: &[(f64, f64)]) -> MetricPair {
    let p = ChartPoint::new(z.iter().map(|&(a, b)| c(a, b)).collect()).unwrap();
    MetricPair::new(base.field(), prime.field(), p).unwrap()
}

#[test]
fn ddbar_of_polynomials() {
    // f = |z₁|⁴ + Re(z₁ z̄₂): ∂₁∂̄₁f = 4|z₁|², ∂₁∂̄₂f = 1/2, ∂₂∂̄₂f = 0
    let f = |p: &ChartPoint| {
        let z = p.coords();
        Ok(z[0].norm_sqr().powi(2) + (z[0] * z[1].conj()).re)
    };
    let p = ChartPoint::new(vec![c(0.3, -0.4), c(1.0, 0.5)]).unwrap();
    let m = ddbar_fd(f, &p, 1e-3).unwrap();
    assert!((m[(0, 0)] - c(4.0 * 0.25, 0.0)).norm() < 1e-5);
    assert!((m[(0, 1)] - c(0.5, 0.0)).norm() < 1e-6);
    assert!((m[(1, 0)] - c(0.5, 0.0)).norm() < 1e-6);
    assert!(m[(1, 1)].norm() < 1e-6);
}

#[test]
fn trace_of_poincare_against_fubini_study() {
    // S = H_P/H_FS = ((1+r²)/(1−r²))²
    for r in [0.0, 0.2, 0.5] {
        let pr = pair(ModelMetric::poincare_disc(1.0), ModelMetric::fubini_study(1, 1.0), &[(r, 0.0)]);
        let st = trace_state(&pr).unwrap();
        let expected = ((1.0 + r * r) / (1.0 - r * r)).powi(2);
        assert!((st.s - expected).abs() < 1e-12 * expected);
        assert!((st.t - expected.ln()).abs() < 1e-12);
    }
}

#[test]
fn log_trace_inequality_is_an_equality_for_disc_over_sphere() {
    // ∂∂̄ log S = 2/(1+r²)² + 2/(1−r²)², so −Δ′ log S = 2 + 2S; with κ = 2,
    // Ric(ω′) = (1/π)ω′ (λ = −1/π, μ = 0) the right side is 2S + 2 as well
    let lambda = -1.0 / std::f64::consts::PI;
    for r in [0.1, 0.3] {
        let pr = pair(ModelMetric::poincare_disc(1.0), ModelMetric::fubini_study(1, 1.0), &[(r, 0.2)]);
        let s = trace_state(&pr).unwrap().s;
        let rep = wu_yau_inequality_check(&pr, lambda, 0.0, 2.0, 1e-3).unwrap();
        assert_eq!(rep.status, Status::Pass, "{rep:?}");
        assert!((rep.lhs - (2.0 + 2.0 * s)).abs() < 1e-4 * rep.lhs.abs());
        assert!((rep.rhs - (2.0 + 2.0 * s)).abs() < 1e-12 * rep.rhs.abs());
    }
}

#[test]
fn laplacian_equality_on_model_pairs() {
    let cases = [
        pair(ModelMetric::poincare_disc(1.0), ModelMetric::fubini_study(1, 1.0), &[(0.2, 0.1)]),
        pair(ModelMetric::complex_ball(2, 1.0), ModelMetric::fubini_study(2, 1.0), &[(0.2, 0.1), (-0.1, 0.3)]),
        pair(ModelMetric::fubini_study(2, 1.0), ModelMetric::perturbed_torus(2, 0.3), &[(0.2, 0.1), (0.4, -0.2)]),
    ];
    for pr in cases {
        let r = laplacian_equality_check(&pr, 1e-3).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        let ratio = r.detail("convergence_ratio").unwrap();
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn lemma_chain_on_ball_pair() {
    // ω = ω′ = ball metric: S = n, λ = (n+1)/2π, κ = 2
    let n = 2.0;
    let pr = pair(ModelMetric::complex_ball(2, 1.0), ModelMetric::complex_ball(2, 1.0), &[(0.3, 0.1), (0.0, -0.2)]);
    let lambda = (n + 1.0) / (2.0 * std::f64::consts::PI);
    let lem = estimate_lemma_checks(&pr, lambda, 0.0, 2.0).unwrap();
    assert_eq!(lem.status, Status::Pass, "{lem:?}");
    assert!((lem.detail("s").unwrap() - n).abs() < 1e-12);
    let chain = lemma_chain_check(&pr, lambda, 0.0, 2.0, 1e-3).unwrap();
    assert_eq!(chain.status, Status::Pass);
}

#[test]
fn positive_curvature_base_skips_the_curvature_lemma() {
    // the sphere has HSC = +2, so HSC ≤ −κ fails for every κ ≥ 0
    let pr = pair(ModelMetric::fubini_study(1, 1.0), ModelMetric::poincare_disc(1.0), &[(0.2, 0.0)]);
    let lem = estimate_lemma_checks(&pr, 1.0, 0.0, 0.5).unwrap();
    let t3 = lem.children.iter().find(|c| c.claim_id == "schwarz.term3").unwrap();
    assert_eq!(t3.status, Status::SkippedHypothesis);
}

#[test]
fn trace_lemma_examples() {
    // λ = (2, 2): log(1/2 + 1/2) = 0 > −ln 4 / 2
    let r = trace_lemma_check(4f64.ln(), &[2.0, 2.0]).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!((r.slack - 2f64.ln()).abs() < 1e-15);
    let one = trace_lemma_check(0.0, &[1.0]).unwrap();
    assert_eq!(one.status, Status::Pass);
    assert_eq!(one.slack, 0.0);
    assert!(trace_lemma_check(0.0, &[1.0, -1.0]).is_err());
}

proptest! {
    #[test]
    fn trace_lemma_is_strict_for_n_at_least_two(logs in prop::collection::vec(-3.0..3.0f64, 2..7)) {
        let lambdas: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
        let u: f64 = logs.iter().sum();
        // AM–GM: (1/n) Σ 1/λ ≥ (Π 1/λ)^{1/n}, so log Σ 1/λ ≥ log n − u/n
        let n = lambdas.len() as f64;
        let t = lambdas.iter().map(|l| 1.0 / l).sum::<f64>().ln();
        prop_assert!(t >= n.ln() - u / n - 1e-12);
        let r = trace_lemma_check(u, &lambdas).unwrap();
        prop_assert_eq!(r.status, Status::Pass);
        prop_assert!(r.slack >= n.ln() - 1e-12);
    }
}
