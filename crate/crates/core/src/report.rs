//! Structured verification records.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    SkippedHypothesis,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::SkippedHypothesis => "skipped-hypothesis",
        }
    }
}

/// How `lhs` and `rhs` are compared. The slack is oriented so that a
/// non-negative value means the relation holds:
///
/// * `Ge`: slack = lhs − rhs
/// * `Le`: slack = rhs − lhs
/// * `Eq`: slack = −|lhs − rhs|
///
/// A check passes iff `slack ≥ −tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

impl Relation {
    pub fn slack(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Relation::Ge => lhs - rhs,
            Relation::Le => rhs - lhs,
            Relation::Eq => -(lhs - rhs).abs(),
        }
    }
}

/// Enough information to reproduce a check.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub description: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Chart point or vector as (re, im) pairs, when applicable.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub point: Vec<(f64, f64)>,
}

impl Witness {
    pub fn new(description: impl Into<String>) -> Self {
        Self {
            description: description.into(),
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_point(mut self, coords: &[num_complex::Complex64]) -> Self {
        self.point = coords.iter().map(|z| (z.re, z.im)).collect();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim_id: String,
    pub status: Status,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub witness: Witness,
    /// Named auxiliary quantities, in insertion order.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub details: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub children: Vec<VerificationReport>,
    /// Status was set explicitly rather than by the tolerance comparison.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub pinned: bool,
}

impl VerificationReport {
    pub fn compare(
        claim_id: impl Into<String>,
        relation: Relation,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        witness: Witness,
    ) -> Self {
        let slack = relation.slack(lhs, rhs);
        let status = if slack >= -tolerance && slack.is_finite() {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            claim_id: claim_id.into(),
            status,
            relation,
            lhs,
            rhs,
            slack,
            tolerance,
            witness,
            details: Vec::new(),
            notes: Vec::new(),
            children: Vec::new(),
            pinned: false,
        }
    }

    /// A report whose hypothesis did not hold, so the conclusion was not tested.
    pub fn skipped(claim_id: impl Into<String>, relation: Relation, reason: impl Into<String>, witness: Witness) -> Self {
        let mut r = Self::compare(claim_id, relation, f64::NAN, f64::NAN, 0.0, witness);
        r.status = Status::SkippedHypothesis;
        r.slack = f64::NAN;
        r.notes.push(reason.into());
        r
    }

    /// Aggregates children: fails if any child fails, passes otherwise.
    /// The parent's lhs/rhs/slack are taken from the child with the smallest slack.
    pub fn aggregate(claim_id: impl Into<String>, children: Vec<VerificationReport>, witness: Witness) -> Self {
        let worst = children
            .iter()
            .filter(|c| c.status != Status::SkippedHypothesis)
            .min_by(|a, b| (a.slack + a.tolerance).total_cmp(&(b.slack + b.tolerance)));
        let (relation, lhs, rhs, slack, tolerance) = match worst {
            Some(w) => (w.relation, w.lhs, w.rhs, w.slack, w.tolerance),
            None => (Relation::Ge, f64::NAN, f64::NAN, f64::NAN, 0.0),
        };
        let status = if children.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if !children.is_empty() && children.iter().all(|c| c.status == Status::SkippedHypothesis) {
            Status::SkippedHypothesis
        } else {
            Status::Pass
        };
        Self {
            claim_id: claim_id.into(),
            status,
            relation,
            lhs,
            rhs,
            slack,
            tolerance,
            witness,
            details: Vec::new(),
            notes: Vec::new(),
            children,
            pinned: false,
        }
    }

    pub fn with_detail(mut self, name: impl Into<String>, value: f64) -> Self {
        self.details.push((name.into(), value));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Forces failure regardless of the numeric comparison.
    pub fn fail_with(mut self, note: impl Into<String>) -> Self {
        self.status = Status::Fail;
        self.pinned = true;
        self.notes.push(note.into());
        self
    }

    /// Sets the status explicitly; tolerance rescaling leaves it alone.
    pub fn pin(mut self, status: Status, note: impl Into<String>) -> Self {
        self.status = status;
        self.pinned = true;
        self.notes.push(note.into());
        self
    }

    /// Multiplies every tolerance by `factor` and re-derives the verdicts.
    /// Skipped and pinned reports keep their status.
    pub fn rescale_tolerance(&mut self, factor: f64) {
        for c in &mut self.children {
            c.rescale_tolerance(factor);
        }
        if self.status == Status::SkippedHypothesis || self.pinned {
            return;
        }
        self.tolerance *= factor;
        let own = self.slack.is_finite() && self.slack >= -self.tolerance;
        let child_failed = self.children.iter().any(|c| c.status == Status::Fail);
        self.status = if own && !child_failed { Status::Pass } else { Status::Fail };
    }

    pub fn detail(&self, name: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    /// Depth-first iterator over this report and all descendants.
    pub fn walk(&self) -> Vec<&VerificationReport> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.walk());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_orientation() {
        let r = VerificationReport::compare("x", Relation::Le, 1.0, 2.0, 0.0, Witness::new("w"));
        assert_eq!(r.slack, 1.0);
        assert!(r.passed());
        let r = VerificationReport::compare("x", Relation::Ge, 1.0, 2.0, 0.5, Witness::new("w"));
        assert!(r.failed());
        let r = VerificationReport::compare("x", Relation::Eq, 1.0, 1.0 + 1e-12, 1e-10, Witness::new("w"));
        assert!(r.passed());
    }

    #[test]
    fn rescaling_moves_the_verdict() {
        let mut r = VerificationReport::compare("x", Relation::Le, 1.5, 1.0, 0.4, Witness::new("w"));
        assert!(r.failed());
        r.rescale_tolerance(2.0);
        assert!(r.passed());
        let mut pinned = VerificationReport::compare("x", Relation::Le, 0.0, 1.0, 0.0, Witness::new("w")).fail_with("forced");
        pinned.rescale_tolerance(10.0);
        assert!(pinned.failed());
    }

    #[test]
    fn nan_never_passes() {
        let r = VerificationReport::compare("x", Relation::Ge, f64::NAN, 0.0, 1.0, Witness::new("w"));
        assert!(r.failed());
    }

    #[test]
    fn aggregate_fails_on_any_child() {
        let a = VerificationReport::compare("a", Relation::Ge, 1.0, 0.0, 0.0, Witness::new("w"));
        let b = VerificationReport::compare("b", Relation::Ge, 0.0, 1.0, 0.0, Witness::new("w"));
        let agg = VerificationReport::aggregate("p", vec![a, b], Witness::new("w"));
        assert!(agg.failed());
        assert_eq!(agg.slack, -1.0);
    }
}
