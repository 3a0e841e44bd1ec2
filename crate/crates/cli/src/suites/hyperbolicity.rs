use kahler_core::geometry::{MetricField, ModelMetric};
use kahler_core::hyperbolicity::{
    demailly_bound, hurwitz_tangent_degree, mobius, pluecker_genus, poincare_distance, subharmonicity_defect, CurveData,
    DiscMap, SurfaceExampleParams,
};
use kahler_core::hyperbolicity::validate_surface_example;
use kahler_core::linalg::c;
use kahler_core::report::{Relation, Status, VerificationReport, Witness};
use kahler_core::{Complex64, Result};
use rand::Rng;

use super::{expect, guard, suite_rng, worst};
use crate::config::RunConfig;

fn expected_obstruction(genus: u32, degree: f64, mult: Vec<u32>, kappa: f64) -> Result<VerificationReport> {
    let curve = CurveData::new(genus, degree, mult)?;
    let o = demailly_bound(&curve, kappa)?;
    let r = VerificationReport::compare(
        "hyperbolicity.expected-obstruction",
        Relation::Le,
        o.lhs,
        o.rhs,
        0.0,
        o.report.witness.clone(),
    );
    let ok = o.obstructed();
    Ok(expect(r, ok, if ok { "obstructed" } else { "criterion satisfied" }))
}

/// Each parameter set breaks one constraint; the example must be rejected and
/// the named constraint must be among the failures.
fn rejections() -> Vec<VerificationReport> {
    let cases = [
        ("surface.genus", SurfaceExampleParams { g: 1, a: 4, b: 5, d: 4 }),
        ("surface.a-below-b", SurfaceExampleParams { g: 2, a: 5, b: 4, d: 4 }),
        ("surface.a-positive", SurfaceExampleParams { g: 2, a: 0, b: 5, d: 4 }),
        ("surface.coprime", SurfaceExampleParams { g: 2, a: 4, b: 6, d: 5 }),
        ("surface.a-large", SurfaceExampleParams { g: 2, a: 3, b: 5, d: 4 }),
        ("surface.degree", SurfaceExampleParams { g: 2, a: 4, b: 5, d: 3 }),
    ];
    cases
        .iter()
        .map(|(id, p)| {
            let r = validate_surface_example(p);
            let failed: Vec<&str> = r.children.iter().filter(|c| c.failed()).map(|c| c.claim_id.as_str()).collect();
            let hit = r.failed() && failed.contains(id);
            VerificationReport::compare(
                "hyperbolicity.surface-rejection",
                Relation::Eq,
                f64::from(u8::from(hit)),
                1.0,
                0.0,
                Witness::new(format!("g={} a={} b={} d={}, breaks {id}", p.g, p.a, p.b, p.d)),
            )
            .with_note(format!("failing constraints: {}", failed.join(", ")))
        })
        .collect()
}

fn integer_eq(id: &str, what: String, got: i64, expected: i64) -> VerificationReport {
    VerificationReport::compare(id, Relation::Eq, got as f64, expected as f64, 0.0, Witness::new(what))
}

/// Raising `κ`, the degree or adding a multiplicity never turns an obstructed
/// curve into a consistent one. Counts flips over a grid of curves.
fn monotonicity() -> Result<VerificationReport> {
    let kappas = [0.0, 0.5, 1.0, 2.0, 5.0];
    let degrees = [0.5, 1.0, 2.0, 5.0, 20.0];
    let mults: [&[u32]; 4] = [&[], &[2], &[3], &[2, 4]];
    let mut flips = 0usize;
    let mut cases = 0usize;
    for g in 0..5u32 {
        for (i, &d) in degrees.iter().enumerate() {
            for (j, &k) in kappas.iter().enumerate() {
                for m in mults {
                    let base = demailly_bound(&CurveData::new(g, d, m.to_vec())?, k)?.obstructed();
                    if !base {
                        continue;
                    }
                    cases += 1;
                    let mut variants = Vec::new();
                    if let Some(&k2) = kappas.get(j + 1) {
                        variants.push(demailly_bound(&CurveData::new(g, d, m.to_vec())?, k2)?);
                    }
                    if let Some(&d2) = degrees.get(i + 1) {
                        variants.push(demailly_bound(&CurveData::new(g, d2, m.to_vec())?, k)?);
                    }
                    let mut more = m.to_vec();
                    more.push(2);
                    variants.push(demailly_bound(&CurveData::new(g, d, more)?, k)?);
                    flips += variants.iter().filter(|v| !v.obstructed()).count();
                }
            }
        }
    }
    Ok(VerificationReport::compare(
        "hyperbolicity.monotonicity",
        Relation::Ge,
        -(flips as f64),
        0.0,
        0.0,
        Witness::new(format!("{cases} obstructed curves and their enlargements")),
    ))
}

fn random_disc_point<R: Rng>(rng: &mut R, rmax: f64) -> Complex64 {
    Complex64::from_polar(rmax * rng.random::<f64>().sqrt(), rng.random::<f64>() * std::f64::consts::TAU)
}

fn distance_checks<R: Rng>(samples: usize, rng: &mut R) -> Result<Vec<VerificationReport>> {
    let mut tri = 0.0f64;
    let mut iso = 0.0f64;
    let mut pick = 0.0f64;
    for _ in 0..samples {
        let (z, w, x) = (random_disc_point(rng, 0.95), random_disc_point(rng, 0.95), random_disc_point(rng, 0.95));
        let dzw = poincare_distance(z, w)?;
        tri = tri.max(dzw - poincare_distance(z, x)? - poincare_distance(x, w)?);
        let f = mobius(random_disc_point(rng, 0.9), rng.random::<f64>() * std::f64::consts::TAU);
        iso = iso.max((poincare_distance(f(z), f(w))? - dzw).abs() / dzw.max(1.0));
        let g = |t: Complex64| (t + t * t * t) * 0.5;
        pick = pick.max(poincare_distance(z * z, w * w)? - dzw).max(poincare_distance(g(z), g(w))? - dzw);
    }
    let w = || Witness::new(format!("{samples} random points in |z| < 0.95"));
    let fixed = poincare_distance(c(0.0, 0.0), c(0.25, 0.0))? - poincare_distance(c(0.0, 0.0), c(0.5, 0.0))?;
    Ok(vec![
        VerificationReport::compare("hyperbolicity.distance-triangle", Relation::Le, tri, 0.0, 1e-12, w()),
        VerificationReport::compare("hyperbolicity.distance-isometry", Relation::Eq, iso, 0.0, 1e-9, w()),
        VerificationReport::compare("hyperbolicity.schwarz-pick", Relation::Le, pick, 0.0, 1e-12, w()),
        VerificationReport::compare(
            "hyperbolicity.schwarz-pick",
            Relation::Le,
            fixed,
            0.0,
            0.0,
            Witness::new("z -> z^2 on (0, 0.5)"),
        ),
    ])
}

struct DiscCase {
    metric: MetricField,
    kappa: f64,
    map: DiscMap,
    times: Vec<Complex64>,
}

fn disc_cases() -> Result<Vec<DiscCase>> {
    let z = c(0.0, 0.0);
    let disc = ModelMetric::poincare_disc(1.0);
    let ball = ModelMetric::complex_ball(2, 1.0);
    let scalar_maps = [
        vec![z, c(0.5, 0.0)],
        vec![z, z, c(1.0, 0.0)],
        vec![c(0.1, -0.1), c(0.3, 0.1), c(0.0, 0.2)],
        vec![c(0.2, 0.0), c(0.2, 0.0), z, c(-0.1, 0.05)],
    ];
    let times = vec![z, c(0.1, 0.0), c(0.2, 0.3), c(-0.4, 0.1)];
    let mut out = Vec::new();
    for (model, kappa) in [(disc, 2.0), (ModelMetric::flat(1), 0.0)] {
        for coeffs in &scalar_maps {
            out.push(DiscCase {
                metric: model.field(),
                kappa,
                map: DiscMap::scalar(coeffs)?,
                times: times.clone(),
            });
        }
    }
    let vector_maps = [
        vec![vec![z, z], vec![c(0.3, 0.0), c(0.0, 0.2)]],
        vec![vec![c(0.1, 0.0), z], vec![c(0.2, 0.1), c(0.1, 0.0)], vec![z, c(0.2, -0.1)]],
    ];
    for (model, kappa) in [(ball, 2.0), (ModelMetric::flat(2), 0.0), (ModelMetric::product(1.0, 1.0), 0.0)] {
        for coeffs in &vector_maps {
            out.push(DiscCase {
                metric: model.field(),
                kappa,
                map: DiscMap::new(coeffs.clone())?,
                times: times.clone(),
            });
        }
    }
    Ok(out)
}

fn subharmonicity(eps_list: &[f64]) -> Vec<VerificationReport> {
    let cases = match disc_cases() {
        Ok(c) => c,
        Err(e) => return vec![guard("hyperbolicity.subharmonicity", "disc maps", Err(e))],
    };
    let mut out = Vec::new();
    for case in cases {
        let ctx = format!("{} kappa={} map {:?}", case.metric.label(), case.kappa, case.map.coefficients);
        let mut main = Vec::new();
        let mut strict = Vec::new();
        for &t in &case.times {
            let d1 = case.map.derivative(t, 1);
            let immersive = d1.iter().any(|x| x.norm() > 0.0);
            for &eps in eps_list {
                if eps == 0.0 && !immersive {
                    continue;
                }
                let r = guard(
                    "hyperbolicity.subharmonicity",
                    &ctx,
                    subharmonicity_defect(&case.metric, &case.map, t, eps, case.kappa),
                );
                if case.kappa > 0.0 && immersive && r.status == Status::Pass {
                    strict.push(VerificationReport::compare(
                        "hyperbolicity.subharmonicity-strict",
                        Relation::Ge,
                        r.lhs,
                        0.0,
                        0.0,
                        r.witness.clone(),
                    ));
                    if r.lhs <= 0.0 {
                        let last = strict.pop().expect("just pushed");
                        strict.push(last.fail_with("not strictly positive"));
                    }
                }
                main.push(r);
            }
        }
        out.push(worst("hyperbolicity.subharmonicity", main, &ctx));
        if !strict.is_empty() {
            out.push(worst("hyperbolicity.subharmonicity-strict", strict, &ctx));
        }
    }
    out
}

pub fn run(cfg: &RunConfig) -> Vec<VerificationReport> {
    let mut rng = suite_rng(cfg.seed, 5);
    let mut out = Vec::new();
    for (g, d, m, k) in [
        (0, 1.0, vec![], 0.0),
        (0, 3.0, vec![], 1.0),
        (1, 2.0, vec![], 0.5),
        (1, 1.0, vec![2], 0.0),
        (2, 1.0, vec![4], 0.0),
    ] {
        let ctx = format!("g={g} deg={d} m={m:?} kappa={k}");
        out.push(guard("hyperbolicity.expected-obstruction", ctx, expected_obstruction(g, d, m, k)));
    }
    out.push(guard(
        "hyperbolicity.algebraic-criterion",
        "g=3 deg=1 kappa=1",
        CurveData::new(3, 1.0, vec![]).and_then(|cd| demailly_bound(&cd, 1.0)).map(|o| o.report),
    ));
    out.push(guard("hyperbolicity.monotonicity", "grid of curves", monotonicity()));
    out.push(validate_surface_example(&SurfaceExampleParams { g: 2, a: 4, b: 5, d: 4 }));
    out.push(validate_surface_example(&SurfaceExampleParams { g: 3, a: 7, b: 9, d: 5 }));
    out.extend(rejections());
    for (d, genus) in [(1, 0), (4, 3), (5, 6)] {
        out.push(match pluecker_genus(d) {
            Ok(v) => integer_eq("hyperbolicity.pluecker", format!("d={d}"), v as i64, genus),
            Err(e) => guard("hyperbolicity.pluecker", format!("d={d}"), Err(e)),
        });
    }
    for (g, deg) in [(0, 2), (1, 0), (2, -2)] {
        out.push(integer_eq("hyperbolicity.hurwitz", format!("g={g}"), hurwitz_tangent_degree(g), deg));
    }
    match distance_checks(cfg.hyperbolicity.triangle_samples, &mut rng) {
        Ok(r) => out.extend(r),
        Err(e) => out.push(guard("hyperbolicity.distance-triangle", "random triples", Err(e))),
    }
    out.extend(subharmonicity(&cfg.hyperbolicity.eps_reg));
    out
}
