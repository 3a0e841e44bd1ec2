use std::f64::consts::PI;

use kahler_core::geometry::ModelMetric;
use kahler_core::ma::{
    assemble_problem, integral_chain, integral_inequality_check, read_grid_dump, solve, solve_from, sup_lower_bound,
    verify_ke_relation, verify_sup_bound, write_grid_dump, GRID_MAGIC,
};
use kahler_core::report::Status;

#[test]
fn flat_torus_solution_is_n_log_eps() {
    for (n, grid) in [(1, 16), (2, 8)] {
        let p = assemble_problem(&ModelMetric::flat(n), 0.3, grid).unwrap();
        assert!((p.volume() - 1.0).abs() < 1e-15);
        let s = solve(&p, 1e-12, 10).unwrap();
        assert!(s.converged);
        assert!(s.u.iter().all(|u| (u - n as f64 * 0.3f64.ln()).abs() < 1e-12));
    }
}

#[test]
fn perturbed_ricci_form_matches_closed_form() {
    // H = 1 + a cos 2πx, ρ = −¼ (log H)'' and the stored form is ρ/2π
    let a = 0.2;
    let p = assemble_problem(&ModelMetric::perturbed_torus(1, a), 0.5, 32).unwrap();
    for idx in (0..p.len()).step_by(37) {
        let x = p.spectral().point(idx)[0];
        let cs = (2.0 * PI * x).cos();
        let g2 = -(2.0 * PI).powi(2) * a * (a + cs) / (1.0 + a * cs).powi(2);
        let expected = -g2 / 4.0 / (2.0 * PI);
        assert!((p.ricci_form(idx, 0, 0).re - expected).abs() < 1e-10, "x = {x}");
        assert!((p.metric(idx, 0, 0).re - (1.0 + a * cs)).abs() < 1e-14);
    }
}

#[test]
fn perturbed_solution_preserves_the_class() {
    // ∫ ω_ε = ε ∫ ω: the Ricci form and ∂∂̄u integrate to zero on the torus
    let p = assemble_problem(&ModelMetric::perturbed_torus(1, 0.1), 0.4, 32).unwrap();
    let s = solve(&p, 1e-12, 40).unwrap();
    assert!(s.converged);
    let heps = p.omega_eps(&s.u);
    let mean = heps.iter().map(|z| z.re).sum::<f64>() / p.len() as f64;
    assert!((mean - 0.4 * p.volume()).abs() < 1e-10);
    assert_eq!(verify_ke_relation(&p, &s).unwrap().status, Status::Pass);
    assert_eq!(verify_sup_bound(&p, &s, 1.0).unwrap().status, Status::Pass);
}

#[test]
fn two_starts_reach_the_same_solution() {
    let p = assemble_problem(&ModelMetric::perturbed_torus(2, 0.1), 0.5, 8).unwrap();
    let a = solve(&p, 1e-11, 40).unwrap();
    let b = solve_from(&p, p.perturbed_guess(0.1), 1e-11, 60).unwrap();
    assert!(a.converged && b.converged);
    let d = a.u.iter().zip(&b.u).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(d < 1e-9, "{d}");
}

#[test]
fn shifted_solution_violates_the_sup_bound() {
    let p = assemble_problem(&ModelMetric::perturbed_torus(1, 0.1), 0.4, 16).unwrap();
    let mut s = solve(&p, 1e-12, 40).unwrap();
    assert_eq!(verify_sup_bound(&p, &s, 1.0).unwrap().status, Status::Pass);
    s.u.iter_mut().for_each(|u| *u += 10.0);
    assert_eq!(verify_sup_bound(&p, &s, 1.0).unwrap().status, Status::Fail);
}

#[test]
fn sup_lower_bound_values() {
    assert!((sup_lower_bound(1, 2.0).unwrap() + PI.ln()).abs() < 1e-15);
    assert!((sup_lower_bound(1, 4.0).unwrap() + (PI / 2.0).ln()).abs() < 1e-15);
    // n = 2, κ = 3: −2 log(8π/9)
    assert!((sup_lower_bound(2, 3.0).unwrap() + 2.0 * (8.0 * PI / 9.0).ln()).abs() < 1e-14);
    assert!(sup_lower_bound(1, 0.0).is_err());
}

#[test]
fn integral_chain_threshold() {
    // n = 1: C κ ≤ 2π
    assert_eq!(integral_chain(1, 2.0, PI).unwrap().status, Status::Pass);
    assert_eq!(integral_chain(1, 40.0, 1.0).unwrap().status, Status::Fail);
}

#[test]
fn poincare_integral_inequality() {
    // Einstein constant −1/π, so u = log(ε + 1/π)
    let r = integral_inequality_check(&ModelMetric::poincare_disc(1.0), 0.1, None).unwrap();
    assert_eq!(r.status, Status::Pass, "{r:?}");
    assert!((r.detail("einstein_constant").unwrap() + 1.0 / PI).abs() < 1e-12);
    assert!((r.detail("u").unwrap() - (0.1 + 1.0 / PI).ln()).abs() < 1e-12);
    assert!(integral_inequality_check(&ModelMetric::flat(1), 0.1, Some(2.0)).is_err());
}

#[test]
fn grid_dump_round_trip() {
    let p = assemble_problem(&ModelMetric::perturbed_torus(1, 0.1), 0.25, 16).unwrap();
    let s = solve(&p, 1e-12, 40).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.grid");
    write_grid_dump(&path, &p, &s).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..8], GRID_MAGIC);
    // one complex dimension is a 16 × 16 real grid
    assert_eq!(bytes.len(), 24 + 8 * 16 * 16);
    let g = read_grid_dump(&path).unwrap();
    assert_eq!((g.n, g.grid, g.eps), (1, 16, 0.25));
    assert_eq!(g.values, s.u);
    std::fs::write(&path, &bytes[..30]).unwrap();
    assert!(read_grid_dump(&path).is_err());
}
