//! Numerical checks of the inequalities satisfied by mixed p-affine surface
//! areas, with tolerances coupled to the quadrature error estimates.

mod degenerate;
mod registry;
mod suite;

use std::fmt;

use serde::Serialize;

pub use degenerate::{degenerate_bound, degenerate_sequence_study, DegenerateRow, DEFAULT_SCHEDULE};
pub use registry::{run_check, CheckContext, CheckId, CheckParams};
pub use suite::{run_suite, summarize, BodyFamily, SuiteConfig, SuiteSummary};

use crate::quadrature::FunctionalValue;

/// Relative tolerance floor applied to max(1, |lhs|, |rhs|).
pub const DEFAULT_TOLERANCE_FLOOR: f64 = 1e-8;
/// Multiplier on the propagated quadrature error.
pub const ERROR_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// The claim is lhs <= rhs.
    Le,
    /// The claim is lhs >= rhs.
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    SkippedPrecondition,
    /// Computed for information only; the bound has no numeric threshold.
    ReportOnly,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::SkippedPrecondition => "skipped-precondition",
            Self::ReportOnly => "report-only",
        })
    }
}

/// One evaluated instance of a registered inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub check_id: String,
    pub part: String,
    pub inputs: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs - lhs for <= claims, lhs - rhs for >= claims.
    pub margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub equality_flag: bool,
    pub note: String,
}

impl InequalityReport {
    pub(crate) fn evaluate(
        check: CheckId,
        part: &str,
        inputs: &str,
        relation: Relation,
        lhs: Estimate,
        rhs: Estimate,
        floor: f64,
    ) -> Self {
        let margin = match relation {
            Relation::Le => rhs.value - lhs.value,
            Relation::Ge => lhs.value - rhs.value,
        };
        let scale = 1f64.max(lhs.value.abs()).max(rhs.value.abs());
        let tolerance = (floor * scale).max(ERROR_FACTOR * (lhs.abs_error() + rhs.abs_error()));
        let finite = margin.is_finite() && tolerance.is_finite();
        let verdict = if finite && margin >= -tolerance { Verdict::Pass } else { Verdict::Fail };
        Self {
            check_id: check.as_str().into(),
            part: part.into(),
            inputs: inputs.into(),
            relation,
            lhs: lhs.value,
            rhs: rhs.value,
            margin,
            tolerance,
            verdict,
            equality_flag: finite && margin.abs() <= tolerance,
            note: String::new(),
        }
    }

    pub(crate) fn skipped(check: CheckId, part: &str, inputs: &str, relation: Relation, reason: &str) -> Self {
        Self {
            check_id: check.as_str().into(),
            part: part.into(),
            inputs: inputs.into(),
            relation,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            tolerance: f64::NAN,
            verdict: Verdict::SkippedPrecondition,
            equality_flag: false,
            note: reason.into(),
        }
    }

    pub(crate) fn report_only(mut self, note: &str) -> Self {
        self.verdict = Verdict::ReportOnly;
        self.equality_flag = false;
        self.note = note.into();
        self
    }

    pub(crate) fn with_note(mut self, note: &str) -> Self {
        self.note = note.into();
        self
    }
}

/// A positive quantity with a first-order relative error, closed under
/// products and real powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub rel_err: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, rel_err: 0.0 }
    }

    pub fn abs_error(&self) -> f64 {
        self.value.abs() * self.rel_err
    }

    pub fn pow(self, e: f64) -> Self {
        if e == 0.0 {
            return Self::exact(1.0);
        }
        Self { value: self.value.powf(e), rel_err: self.rel_err * e.abs() }
    }

    pub fn powi(self, e: i32) -> Self {
        self.pow(e as f64)
    }

    pub fn mul(self, other: Self) -> Self {
        Self { value: self.value * other.value, rel_err: self.rel_err + other.rel_err }
    }

    pub fn div(self, other: Self) -> Self {
        Self { value: self.value / other.value, rel_err: self.rel_err + other.rel_err }
    }

    pub fn scale(self, factor: f64) -> Self {
        Self { value: self.value * factor, ..self }
    }
}

impl From<&FunctionalValue> for Estimate {
    fn from(v: &FunctionalValue) -> Self {
        Self { value: v.value, rel_err: v.rel_error() }
    }
}

impl From<FunctionalValue> for Estimate {
    fn from(v: FunctionalValue) -> Self {
        Self::from(&v)
    }
}
