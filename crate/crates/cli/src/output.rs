//! Report stream, summary table and plot data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use kahler_core::ma::{loglog_slope, EpsSweepRecord};
use kahler_core::report::{Status, VerificationReport};

use crate::CliError;

/// Stable sort by claim id; records with equal ids keep execution order.
pub fn sort_reports(reports: &mut [VerificationReport]) {
    reports.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
}

/// One JSON object per line, in the given order.
pub fn to_jsonl(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("reports serialize"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Default, Clone, Copy, PartialEq)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub worst_slack: f64,
}

pub fn tally(reports: &[VerificationReport]) -> BTreeMap<String, Tally> {
    let mut map: BTreeMap<String, Tally> = BTreeMap::new();
    for r in reports {
        let t = map.entry(r.claim_id.clone()).or_insert(Tally {
            worst_slack: f64::INFINITY,
            ..Tally::default()
        });
        match r.status {
            Status::Pass => t.pass += 1,
            Status::Fail => t.fail += 1,
            Status::SkippedHypothesis => t.skipped += 1,
        }
        if r.slack.is_finite() {
            t.worst_slack = t.worst_slack.min(r.slack);
        }
    }
    map
}

pub fn summary_table(reports: &[VerificationReport]) -> String {
    let rows = tally(reports);
    let width = rows.keys().map(|k| k.len()).max().unwrap_or(5).max(5);
    let mut s = String::new();
    let _ = writeln!(s, "{:<width$}  {:>6} {:>6} {:>7}  {:>12}", "claim", "pass", "fail", "skipped", "worst slack");
    for (id, t) in &rows {
        let slack = if t.worst_slack.is_finite() {
            format!("{:.3e}", t.worst_slack + 0.0)
        } else {
            "-".to_string()
        };
        let _ = writeln!(s, "{id:<width$}  {:>6} {:>6} {:>7}  {slack:>12}", t.pass, t.fail, t.skipped);
    }
    let fails: usize = rows.values().map(|t| t.fail).sum();
    let total: usize = rows.values().map(|t| t.pass + t.fail + t.skipped).sum();
    let _ = writeln!(s, "{total} records, {fails} failed");
    s
}

pub fn any_failed(reports: &[VerificationReport]) -> bool {
    reports.iter().any(|r| r.status == Status::Fail)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    let mut f = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Columns `eps integral sup_u slope`, where `slope` is the log-log fit over
/// the points so far (`nan` for the first).
pub fn sweep_plot_data(rec: &EpsSweepRecord) -> Result<String, CliError> {
    if rec.eps.is_empty() {
        return Err(CliError::Input("sweep record has no solved points".into()));
    }
    let mut s = format!("# eps integral sup_u slope  ({} n={} grid={})\n", rec.background, rec.n, rec.grid);
    for k in 0..rec.eps.len() {
        let slope = loglog_slope(&rec.eps[..=k], &rec.integrals[..=k]).unwrap_or(f64::NAN);
        let _ = writeln!(s, "{:.17e} {:.17e} {:.17e} {:.17e}", rec.eps[k], rec.integrals[k], rec.sup_u[k], slope);
    }
    Ok(s)
}

/// Writes the plot file; an empty record is an error and creates no file.
pub fn emit_sweep_plotdata(rec: &EpsSweepRecord, path: &Path) -> Result<(), CliError> {
    let text = sweep_plot_data(rec)?;
    write_file(path, &text)
}
