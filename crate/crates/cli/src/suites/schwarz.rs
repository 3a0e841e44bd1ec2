use std::f64::consts::PI;

use kahler_core::curvature::{chern_curvature, ricci_and_scalar};
use kahler_core::geometry::{ChartDomain, ChartPoint, MetricField, ModelMetric};
use kahler_core::linalg::{c, generalized_eigenvalues};
use kahler_core::report::{Relation, Status, VerificationReport, Witness};
use kahler_core::schwarz::{
    laplacian_equality_check, lemma_chain_check, quasi_negative_inequality_check, sampled_kappa, sharpness_probe,
    trace_dual_path_check, trace_lemma_check, wu_yau_inequality_check, MetricPair, TWO_PI_CONVENTION,
};
use kahler_core::{Complex64, Result};
use rand::Rng;

use super::{guard, suite_rng, worst};
use crate::config::RunConfig;

/// A pair in the lemma matrix. `lambda = None` chooses the smallest
/// admissible `λ` at each point; `μ` is always chosen that way.
struct PairSpec {
    base: ModelMetric,
    prime: ModelMetric,
    kappa: f64,
    lambda: Option<f64>,
}

fn lemma_pairs() -> Vec<PairSpec> {
    let ball = ModelMetric::complex_ball(2, 1.0);
    let mut pairs = vec![
        PairSpec {
            base: ModelMetric::poincare_disc(1.0),
            prime: ModelMetric::poincare_disc(1.0),
            kappa: 2.0,
            lambda: Some(1.0 / PI),
        },
        PairSpec {
            base: ModelMetric::poincare_disc(1.0),
            prime: ModelMetric::fubini_study(1, 1.0),
            kappa: 2.0,
            lambda: None,
        },
    ];
    for s in [0.5, 1.0, 2.0] {
        pairs.push(PairSpec {
            base: ball,
            prime: ModelMetric::complex_ball(2, s),
            kappa: 2.0,
            lambda: Some(3.0 / (2.0 * PI * s)),
        });
    }
    pairs.extend([
        PairSpec {
            base: ball,
            prime: ModelMetric::fubini_study(2, 1.0),
            kappa: 2.0,
            lambda: None,
        },
        PairSpec {
            base: ModelMetric::flat(2),
            prime: ModelMetric::perturbed_torus(2, 0.3),
            kappa: 0.0,
            lambda: None,
        },
        PairSpec {
            base: ModelMetric::product(1.0, 1.0),
            prime: ModelMetric::fubini_study(2, 1.0),
            kappa: 0.0,
            lambda: None,
        },
    ]);
    pairs
}

fn label(m: &ModelMetric) -> String {
    format!("{}(n={}, s={})", m.name(), m.dim, m.scale)
}

/// `λ ≥ 0` with `ρ′/2π + λH′ ≥ 0`, then the largest `μ ≥ 0` with
/// `ρ′/2π + λH′ ≥ μH`, both slightly inside the admissible range.
fn ricci_parameters(pair: &MetricPair, fixed: Option<f64>) -> Result<(f64, f64)> {
    let h = pair.base.value_at(&pair.point)?;
    let jet = pair.prime.evaluate_jet(&pair.point, 2)?;
    let hp = jet.value.clone();
    let ric = ricci_and_scalar(&chern_curvature(&jet)?)?.ricci / c(TWO_PI_CONVENTION, 0.0);
    let lambda = match fixed {
        Some(l) => l,
        None => {
            let top = generalized_eigenvalues(&hp, &(-&ric))?.last().copied().unwrap_or(0.0);
            top.max(0.0) * (1.0 + 1e-6)
        }
    };
    let shifted = &ric + &hp * c(lambda, 0.0);
    let low = generalized_eigenvalues(&h, &shifted)?.first().copied().unwrap_or(0.0);
    Ok((lambda, low.max(0.0) * (1.0 - 1e-6)))
}

fn lemma_matrix<R: Rng>(spec: &PairSpec, points: usize, h: f64, rng: &mut R) -> Vec<VerificationReport> {
    let ctx = format!("base {}, prime {}", label(&spec.base), label(&spec.prime));
    let (base, prime) = (spec.base.field(), spec.prime.field());
    let mut chains = Vec::with_capacity(points);
    let mut duals = Vec::with_capacity(points);
    for _ in 0..points {
        let p = spec.base.sample_point(rng);
        let pair = match MetricPair::new(base.clone(), prime.clone(), p) {
            Ok(pair) => pair,
            Err(e) => {
                chains.push(guard("schwarz.lemma-chain", &ctx, Err(e)));
                continue;
            }
        };
        duals.push(guard("schwarz.trace-dual-path", &ctx, trace_dual_path_check(&pair)));
        let chain = ricci_parameters(&pair, spec.lambda).and_then(|(lambda, mu)| {
            Ok(lemma_chain_check(&pair, lambda, mu, spec.kappa, h)?
                .with_detail("lambda", lambda)
                .with_detail("mu", mu))
        });
        chains.push(guard("schwarz.lemma-chain", &ctx, chain));
    }
    let tested = chains
        .iter()
        .flat_map(|c| c.walk())
        .filter(|r| r.claim_id == "schwarz.log-trace-inequality" && r.status != Status::SkippedHypothesis)
        .count();
    let skipped_terms = chains
        .iter()
        .flat_map(|c| c.walk())
        .filter(|r| r.claim_id.starts_with("schwarz.term") && r.status == Status::SkippedHypothesis)
        .count();
    let matrix = VerificationReport::aggregate("schwarz.lemma-matrix", chains, Witness::new(&ctx))
        .with_detail("points", points as f64)
        .with_detail("inequality_tested", tested as f64)
        .with_detail("skipped_terms", skipped_terms as f64)
        .with_detail("kappa", spec.kappa);
    vec![matrix, worst("schwarz.trace-dual-path", duals, &ctx)]
}

fn point(coords: &[Complex64]) -> ChartPoint {
    ChartPoint::new(coords.to_vec()).expect("finite coordinates")
}

fn laplacian_pairs() -> Vec<(MetricField, MetricField, ChartPoint)> {
    let conformal = MetricField::from_coefficients(1, ChartDomain::Whole, "conformal flat", |z, zb| {
        vec![(&(&z[0] * &zb[0]) * 0.3) + 1.0]
    });
    vec![
        (ModelMetric::flat(1).field(), conformal, point(&[c(0.2, 0.0)])),
        (
            ModelMetric::fubini_study(1, 1.0).field(),
            ModelMetric::poincare_disc(1.0).field(),
            point(&[c(0.1, 0.0)]),
        ),
        (
            ModelMetric::complex_ball(2, 1.0).field(),
            ModelMetric::fubini_study(2, 1.0).field(),
            point(&[c(0.2, 0.1), c(-0.15, 0.05)]),
        ),
        (
            ModelMetric::fubini_study(2, 1.0).field(),
            ModelMetric::perturbed_torus(2, 0.3).field(),
            point(&[c(0.3, 0.2), c(0.1, 0.4)]),
        ),
    ]
}

fn pair_of(base: &ModelMetric, prime: &ModelMetric, p: &[Complex64]) -> Result<MetricPair> {
    MetricPair::new(base.field(), prime.field(), point(p))
}

fn trace_lemma_sweep<R: Rng>(samples: usize, max_n: usize, rng: &mut R) -> VerificationReport {
    let mut min_slack = f64::INFINITY;
    let mut violations = 0usize;
    let mut errors = 0usize;
    let mut first = None;
    for i in 0..samples {
        let n = rng.random_range(2..=max_n);
        let lambdas: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0f64..3.0).exp()).collect();
        let u: f64 = lambdas.iter().map(|l| l.ln()).sum();
        match trace_lemma_check(u, &lambdas) {
            Ok(r) => {
                min_slack = min_slack.min(r.slack);
                if r.failed() {
                    violations += 1;
                    first.get_or_insert(i);
                }
            }
            Err(_) => errors += 1,
        }
    }
    let mut r = VerificationReport::compare(
        "schwarz.trace-lemma-sweep",
        Relation::Ge,
        min_slack,
        0.0,
        0.0,
        Witness::new(format!("{samples} random eigenvalue vectors, 2 <= n <= {max_n}")),
    )
    .with_detail("violations", violations as f64)
    .with_detail("errors", errors as f64);
    if violations > 0 || errors > 0 || min_slack <= 0.0 {
        r = r.fail_with(format!("{violations} strict violations, {errors} errors, first at sample {first:?}"));
    }
    r
}

/// Both normalisations on the Poincaré disc: `2π` times the left side of the
/// quasi-negative form equals the left side of the log-trace form.
fn two_pi_convention(h: f64) -> Result<VerificationReport> {
    let disc = ModelMetric::poincare_disc(1.0);
    let pair = pair_of(&disc, &disc, &[c(0.3, 0.1)])?;
    let q = quasi_negative_inequality_check(&pair, |_| Ok(2.0), 0.0, h)?;
    let w = wu_yau_inequality_check(&pair, 1.0 / PI, 0.0, 2.0, h)?;
    Ok(VerificationReport::compare(
        "schwarz.two-pi-convention",
        Relation::Eq,
        q.lhs * TWO_PI_CONVENTION,
        w.lhs,
        1e-9 * w.lhs.abs().max(1.0),
        Witness::new("poincare-disc pair at 0.3+0.1i"),
    )
    .with_detail("quasi_negative_slack", q.slack)
    .with_detail("log_trace_slack", w.slack))
}

pub fn run(cfg: &RunConfig) -> Vec<VerificationReport> {
    let s = &cfg.schwarz;
    let h = s.h;
    let mut rng = suite_rng(cfg.seed, 4);
    let mut out = Vec::new();

    for (base, prime, p) in laplacian_pairs() {
        let ctx = format!("base {}, prime {}", base.label(), prime.label());
        out.push(guard(
            "schwarz.laplacian-equality",
            &ctx,
            MetricPair::new(base, prime, p).and_then(|pair| laplacian_equality_check(&pair, h)),
        ));
    }

    for spec in lemma_pairs() {
        out.extend(lemma_matrix(&spec, s.points_per_pair, h, &mut rng));
    }

    let disc = ModelMetric::poincare_disc(1.0);
    let ball = ModelMetric::complex_ball(2, 1.0);
    out.push(guard(
        "schwarz.sharpness",
        "poincare-disc pair at 0",
        pair_of(&disc, &disc, &[c(0.0, 0.0)]).and_then(|p| sharpness_probe(&p, 1.0 / PI, 0.0, 2.0, s.inflation, h)),
    ));
    out.push(guard(
        "schwarz.sharpness",
        "complex-ball pair",
        pair_of(&ball, &ball, &[c(0.1, 0.0), c(0.0, 0.2)])
            .and_then(|p| sharpness_probe(&p, 3.0 / (2.0 * PI), 0.0, 2.0, s.inflation, h)),
    ));

    out.push(guard("schwarz.trace-lemma", "lambda = (2, 2)", trace_lemma_check(4f64.ln(), &[2.0, 2.0])));
    out.push(guard("schwarz.trace-lemma", "n = 1 boundary", trace_lemma_check(0.0, &[1.0])));
    out.push(trace_lemma_sweep(s.trace_lemma_samples, s.trace_lemma_max_n, &mut rng));

    let eps = s.quasi_negative_eps;
    let flat = ModelMetric::flat(1);
    out.push(guard(
        "schwarz.quasi-negative",
        "flat pair",
        pair_of(&flat, &flat, &[c(0.3, -0.2)]).and_then(|p| quasi_negative_inequality_check(&p, |_| Ok(0.0), eps, h)),
    ));
    let sampled = |m: MetricField, seed: u64| move |q: &ChartPoint| sampled_kappa(&m, q, 2000, 50, seed);
    out.push(guard(
        "schwarz.quasi-negative",
        "poincare-disc pair",
        pair_of(&disc, &disc, &[c(0.3, 0.1)])
            .and_then(|p| quasi_negative_inequality_check(&p, sampled(disc.field(), cfg.seed), 0.0, h)),
    ));
    let product = ModelMetric::product(1.0, 1.0);
    out.push(guard(
        "schwarz.quasi-negative",
        "product pair",
        pair_of(&product, &product, &[c(0.3, 0.1), c(0.5, -0.4)])
            .and_then(|p| quasi_negative_inequality_check(&p, sampled(product.field(), cfg.seed), eps, h)),
    ));
    out.push(guard("schwarz.two-pi-convention", "poincare-disc pair", two_pi_convention(h)));
    out
}
