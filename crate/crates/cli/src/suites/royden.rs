use kahler_core::curvature::space_form_tensor;
use kahler_core::linalg::{c, CMatrix};
use kahler_core::report::{Relation, VerificationReport, Witness};
use kahler_core::royden::{
    random_frame, random_negative_form, royden_inequality_check, royden_sweep, BiHermitianForm, FrameSpec,
    BOUND_TOLERANCE,
};
use rand_chacha::ChaCha8Rng;

use super::{guard, suite_rng};
use crate::config::RunConfig;

/// The randomized sweep as a single report: zero violations, and the
/// polarization identity within `BOUND_TOLERANCE` on every trial.
pub fn royden_reports(trials: usize, seed: u64, max_n: usize, max_nu: usize, workers: usize) -> VerificationReport {
    let ctx = format!("{trials} trials, n <= {max_n}, nu <= {max_nu}");
    let sweep = match royden_sweep(trials, seed, max_n, max_nu, workers) {
        Ok(s) => s,
        Err(e) => return guard("royden.sweep", ctx, Err(e)),
    };
    let mut r = VerificationReport::compare(
        "royden.sweep",
        Relation::Le,
        sweep.violations as f64,
        0.0,
        0.0,
        Witness::new(ctx).with_seed(seed),
    )
    .with_detail("trials", sweep.trials as f64)
    .with_detail("skipped", sweep.skipped as f64)
    .with_detail("tightened", sweep.tightened as f64)
    .with_detail("max_polarization_defect", sweep.max_polarization_defect)
    .with_detail("min_slack", sweep.min_slack);
    if let Some(i) = sweep.first_violation {
        r = r.with_note(format!("first violation at trial {i}"));
    }
    if sweep.max_polarization_defect > BOUND_TOLERANCE {
        r = r.fail_with(format!("polarization defect {:.3e}", sweep.max_polarization_defect));
    }
    r
}

/// For `ν = 1` both bounds must equal `K‖ξ‖⁴`.
fn single_vector(rng: &mut ChaCha8Rng, n: usize) -> kahler_core::Result<VerificationReport> {
    let (form, k) = random_negative_form(n, rng)?;
    let frame = random_frame(form.gram(), 1, rng)?;
    let report = royden_inequality_check(&form, &frame, k)?;
    let x = &frame.vectors()[0];
    let target = k * form.norm_sq(x).powi(2);
    let mut defect = 0.0f64;
    for child in &report.children {
        if matches!(child.claim_id.as_str(), "royden.general-bound" | "royden.nonpositive-bound") {
            defect = defect.max((child.rhs - target).abs());
        }
    }
    Ok(VerificationReport::compare(
        "royden.single-vector",
        Relation::Eq,
        defect,
        0.0,
        1e-12 * target.abs().max(1.0),
        Witness::new(format!("n={n}, K={k:.6e}")),
    )
    .with_detail("k_norm4", target))
}

/// Space form with `K = −1` and the standard unitary frame.
fn space_form(n: usize) -> kahler_core::Result<VerificationReport> {
    let form = BiHermitianForm::new(space_form_tensor(n, -1.0));
    let vectors = (0..n)
        .map(|i| (0..n).map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let frame = FrameSpec::new(vectors, &CMatrix::identity(n, n))?;
    royden_inequality_check(&form, &frame, -1.0)
}

pub fn run(cfg: &RunConfig) -> Vec<VerificationReport> {
    let r = &cfg.royden;
    let mut rng = suite_rng(cfg.seed, 3);
    let mut out = vec![royden_reports(r.trials, cfg.seed, r.max_n, r.max_nu, r.workers)];
    for n in 1..=r.max_n {
        out.push(guard("royden.single-vector", format!("n={n}"), single_vector(&mut rng, n)));
    }
    for n in [2, 3] {
        out.push(guard("royden.inequality", format!("space form n={n}"), space_form(n)));
    }
    out
}
