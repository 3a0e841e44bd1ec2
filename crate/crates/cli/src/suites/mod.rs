//! Verification suites. Each suite turns its config section into a list of
//! reports; `run` executes the selected suites and orders the result by
//! claim id.

mod averages;
mod curvature;
mod hyperbolicity;
mod ma;
mod royden;
mod schwarz;

use std::time::Instant;

use kahler_core::report::{Relation, Status, VerificationReport, Witness};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{RunConfig, Suite};
use crate::output::sort_reports;

pub use ma::{ma_single, MaSingle};
pub use royden::royden_reports;

#[derive(Debug, Clone)]
pub struct SuiteRun {
    pub reports: Vec<VerificationReport>,
    /// Wall-clock seconds per suite, in execution order. Not part of the
    /// report stream.
    pub timings: Vec<(Suite, f64)>,
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Vec<VerificationReport> {
    match suite {
        Suite::Curvature => curvature::run(cfg),
        Suite::Averages => averages::run(cfg),
        Suite::Royden => royden::run(cfg),
        Suite::Schwarz => schwarz::run(cfg),
        Suite::Ma => ma::run(cfg),
        Suite::Hyperbolicity => hyperbolicity::run(cfg),
        Suite::All => Suite::EACH.iter().flat_map(|&s| run_suite(s, cfg)).collect(),
    }
}

/// Runs `cfg.suite` (sequentially, or one thread per suite with
/// `cfg.parallel`), applies `cfg.tol_scale` and sorts by claim id.
pub fn run(cfg: &RunConfig) -> SuiteRun {
    let suites = cfg.suite.expand();
    let timed = |s: Suite| {
        let start = Instant::now();
        let r = run_suite(s, cfg);
        (s, r, start.elapsed().as_secs_f64())
    };
    let results: Vec<(Suite, Vec<VerificationReport>, f64)> = if cfg.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = suites.iter().map(|&s| scope.spawn(move || timed(s))).collect();
            handles.into_iter().map(|h| h.join().expect("suite panicked")).collect()
        })
    } else {
        suites.iter().map(|&s| timed(s)).collect()
    };
    let mut reports = Vec::new();
    let mut timings = Vec::new();
    for (s, r, t) in results {
        reports.extend(r);
        timings.push((s, t));
    }
    finish(&mut reports, cfg.tol_scale);
    SuiteRun { reports, timings }
}

/// Applies the tolerance factor and sorts.
pub fn finish(reports: &mut [VerificationReport], tol_scale: f64) {
    if tol_scale != 1.0 {
        for r in reports.iter_mut() {
            r.rescale_tolerance(tol_scale);
        }
    }
    sort_reports(reports);
}

/// Generator for one suite, independent of the others.
fn suite_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A failed check in place of an error from the library.
fn guard(id: &str, context: impl Into<String>, r: kahler_core::Result<VerificationReport>) -> VerificationReport {
    r.unwrap_or_else(|e| {
        VerificationReport::compare(id, Relation::Eq, f64::NAN, f64::NAN, 0.0, Witness::new(context)).fail_with(e.to_string())
    })
}

/// The first failing report, otherwise the one closest to failing. Notes the
/// sample size.
fn worst(id: &str, reports: Vec<VerificationReport>, context: &str) -> VerificationReport {
    let total = reports.len();
    let skipped = reports.iter().filter(|r| r.status == Status::SkippedHypothesis).count();
    let pick = reports
        .iter()
        .position(|r| r.failed())
        .or_else(|| {
            reports
                .iter()
                .enumerate()
                .filter(|(_, r)| r.status == Status::Pass)
                .min_by(|a, b| (a.1.slack + a.1.tolerance).total_cmp(&(b.1.slack + b.1.tolerance)))
                .map(|(i, _)| i)
        })
        .or(if total > 0 { Some(0) } else { None });
    match pick {
        Some(i) => {
            let mut r = reports.into_iter().nth(i).expect("index in range");
            r.notes.push(format!("worst of {total} ({skipped} skipped): {context}"));
            r
        }
        None => VerificationReport::compare(id, Relation::Eq, f64::NAN, f64::NAN, 0.0, Witness::new(context))
            .fail_with("no samples"),
    }
}

/// A report whose verdict is decided by `ok` rather than the tolerance; used
/// for negative controls, where the wrapped comparison is expected to fail.
fn expect(report: VerificationReport, ok: bool, note: &str) -> VerificationReport {
    let status = if ok { Status::Pass } else { Status::Fail };
    report.pin(status, note)
}
