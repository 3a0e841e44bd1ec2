use kahler_core::curvature::{chern_curvature, hbc, hsc, ricci_and_scalar};
use kahler_core::geometry::{check_kahler, model_catalog, ChartPoint, HscSign, ModelMetric};
use kahler_core::jet::jet_determinant;
use kahler_core::linalg::{c, complex_gaussian_vector};
use kahler_core::report::{Relation, VerificationReport, Witness};
use kahler_core::Result;
use rand::Rng;
use std::f64::consts::PI;

use super::{guard, suite_rng, worst};
use crate::config::RunConfig;

const SYMMETRY_TOLERANCE: f64 = 1e-8;
const RICCI_TOLERANCE: f64 = 1e-6;
const IDENTITY_TOLERANCE: f64 = 1e-10;

fn models() -> Vec<ModelMetric> {
    let mut m = model_catalog();
    m.push(ModelMetric::fubini_study(2, 1.0));
    m.push(ModelMetric::complex_ball(3, 0.5));
    m
}

fn witness(model: &ModelMetric, p: &ChartPoint) -> Witness {
    Witness::new(format!("{} n={}", model.name(), model.dim)).with_point(p.coords())
}

/// Kähler symmetries of the lowered tensor in chart coordinates and the
/// weighted pairing symmetry in a unitary frame, relative to the tensor size.
fn symmetry(model: &ModelMetric, p: &ChartPoint) -> Result<VerificationReport> {
    let t = chern_curvature(&model.field().evaluate_jet(p, 2)?)?;
    let size = t.lowered_slice().iter().map(|x| x.norm()).fold(1.0, f64::max);
    let unitary = t.to_unitary_frame()?;
    let weighted = unitary.weighted_symmetry_defect().unwrap_or(f64::INFINITY);
    let defect = t.kahler_symmetry_defect().max(weighted) / size;
    Ok(VerificationReport::compare(
        "curvature.kahler-symmetry",
        Relation::Le,
        defect,
        0.0,
        SYMMETRY_TOLERANCE,
        witness(model, p),
    ))
}

/// Tensor contraction against `−∂∂̄ log det H` taken from the coefficient jets.
fn ricci_logdet(model: &ModelMetric, p: &ChartPoint) -> Result<VerificationReport> {
    let n = model.dim;
    let field = model.field();
    let rho = ricci_and_scalar(&chern_curvature(&field.evaluate_jet(p, 2)?)?)?.ricci;
    let logdet = jet_determinant(&field.coefficient_jets(p, 2)?, n).ln();
    let mut defect = 0.0f64;
    let mut size = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let oracle = -logdet.derivative(&[j, n + k]);
            defect = defect.max((rho[(j, k)] - oracle).norm());
            size = size.max(oracle.norm());
        }
    }
    Ok(VerificationReport::compare(
        "curvature.ricci-logdet",
        Relation::Le,
        defect / size.max(1.0),
        0.0,
        RICCI_TOLERANCE,
        witness(model, p),
    ))
}

fn hsc_oracle(model: &ModelMetric, p: &ChartPoint, v: &[kahler_core::Complex64], expected: f64) -> Result<VerificationReport> {
    let t = chern_curvature(&model.field().evaluate_jet(p, 2)?)?;
    Ok(VerificationReport::compare(
        "curvature.hsc-oracle",
        Relation::Eq,
        hsc(&t, v)?,
        expected,
        IDENTITY_TOLERANCE * expected.abs().max(1.0),
        witness(model, p),
    ))
}

fn einstein(model: &ModelMetric, p: &ChartPoint, constant: f64) -> Result<VerificationReport> {
    let jet = model.field().evaluate_jet(p, 2)?;
    let rho = ricci_and_scalar(&chern_curvature(&jet)?)?.ricci;
    let target = &jet.value * c(2.0 * PI * constant, 0.0);
    let defect = (&rho - &target).norm() / target.norm().max(1.0);
    Ok(VerificationReport::compare(
        "curvature.einstein",
        Relation::Eq,
        defect,
        0.0,
        IDENTITY_TOLERANCE,
        witness(model, p),
    )
    .with_detail("einstein_constant", constant))
}

fn diagonal(model: &ModelMetric, p: &ChartPoint, v: &[kahler_core::Complex64]) -> Result<VerificationReport> {
    let t = chern_curvature(&model.field().evaluate_jet(p, 2)?)?;
    let a = hbc(&t, v, v)?;
    let b = hsc(&t, v)?;
    Ok(VerificationReport::compare(
        "curvature.diagonal-restriction",
        Relation::Eq,
        a,
        b,
        1e-12 * b.abs().max(1.0),
        witness(model, p),
    ))
}

/// Counts points whose sampled HSC disagrees with the catalogued sign. The
/// product model must also have a zero direction.
fn sign_catalog<R: Rng>(model: &ModelMetric, points: usize, rng: &mut R) -> Result<VerificationReport> {
    let n = model.dim;
    let field = model.field();
    let mut mismatches = 0usize;
    let mut tested = 0usize;
    for _ in 0..points {
        let p = model.sample_point(rng);
        let t = chern_curvature(&field.evaluate_jet(&p, 2)?)?;
        for _ in 0..4 {
            let v = complex_gaussian_vector(n, rng);
            let h = hsc(&t, &v)?;
            let scale = 1e-10;
            let ok = match model.hsc_sign() {
                HscSign::Zero => h.abs() <= scale,
                HscSign::NegativeConstant => h < 0.0,
                HscSign::PositiveConstant => h > 0.0,
                HscSign::NonPositiveWithFlatDirections => h <= scale,
                HscSign::Indefinite => true,
            };
            mismatches += usize::from(!ok);
            tested += 1;
        }
        if model.hsc_sign() == HscSign::NonPositiveWithFlatDirections {
            let flat = hsc(&t, &[c(0.0, 0.0), c(1.0, 0.0)])?;
            mismatches += usize::from(flat.abs() > 1e-10);
            tested += 1;
        }
    }
    Ok(VerificationReport::compare(
        "curvature.sign-catalog",
        Relation::Le,
        mismatches as f64,
        0.0,
        0.0,
        Witness::new(format!("{} n={} sign {}", model.name(), model.dim, model.hsc_sign().tag())),
    )
    .with_detail("directions", tested as f64))
}

pub fn run(cfg: &RunConfig) -> Vec<VerificationReport> {
    let mut rng = suite_rng(cfg.seed, 1);
    let points = cfg.curvature.points;
    let mut out = Vec::new();
    for model in models() {
        let ctx = format!("{} n={}", model.name(), model.dim);
        let pts: Vec<ChartPoint> = (0..points).map(|_| model.sample_point(&mut rng)).collect();
        let vs: Vec<_> = pts.iter().map(|_| complex_gaussian_vector(model.dim, &mut rng)).collect();
        let field = model.field();

        let closed = pts.iter().map(|p| guard("geometry.kahler-closedness", &ctx, check_kahler(&field, p, 1e-10))).collect();
        out.push(worst("geometry.kahler-closedness", closed, &ctx));
        let sym = pts.iter().map(|p| guard("curvature.kahler-symmetry", &ctx, symmetry(&model, p))).collect();
        out.push(worst("curvature.kahler-symmetry", sym, &ctx));
        let ric = pts.iter().map(|p| guard("curvature.ricci-logdet", &ctx, ricci_logdet(&model, p))).collect();
        out.push(worst("curvature.ricci-logdet", ric, &ctx));
        let diag = pts
            .iter()
            .zip(&vs)
            .map(|(p, v)| guard("curvature.diagonal-restriction", &ctx, diagonal(&model, p, v)))
            .collect();
        out.push(worst("curvature.diagonal-restriction", diag, &ctx));
        if let Some(h) = model.hsc_constant() {
            let r = pts
                .iter()
                .zip(&vs)
                .map(|(p, v)| guard("curvature.hsc-oracle", &ctx, hsc_oracle(&model, p, v, h)))
                .collect();
            out.push(worst("curvature.hsc-oracle", r, &ctx));
        }
        if let Some(ce) = model.einstein_constant() {
            let r = pts.iter().map(|p| guard("curvature.einstein", &ctx, einstein(&model, p, ce))).collect();
            out.push(worst("curvature.einstein", r, &ctx));
        }
        out.push(guard("curvature.sign-catalog", &ctx, sign_catalog(&model, cfg.curvature.sign_points, &mut rng)));
    }
    out
}
