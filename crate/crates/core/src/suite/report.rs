//! The per-inequality verification record.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::kernels::Ext;

/// Floor for the equality tolerance on normalized margins.
pub const EQUALITY_FLOOR: f64 = 5e-4;
pub const DEFAULT_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    InequalityFailure,
    HypothesisFailure,
    NotApplicable,
    EngineError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub satisfied: bool,
    /// Smallest sampled slack of the hypotheses (negative when violated).
    #[serde(deserialize_with = "nan_if_null")]
    pub worst_slack: f64,
    pub detail: String,
}

impl Default for Hypothesis {
    fn default() -> Self {
        Hypothesis { satisfied: true, worst_slack: f64::MAX, detail: String::new() }
    }
}

impl Hypothesis {
    /// Records that `value` must be ≥ `bound` up to `tol`.
    pub fn require_ge(&mut self, what: &str, value: f64, bound: f64, tol: f64) {
        let slack = value - bound;
        self.worst_slack = self.worst_slack.min(slack);
        if slack < -tol || value.is_nan() {
            self.fail(format!("{what}: {value:.6e} < {bound:.6e}"));
        }
    }

    pub fn require_le(&mut self, what: &str, value: f64, bound: f64, tol: f64) {
        self.require_ge(what, -value, -bound, tol);
    }

    pub fn fail(&mut self, why: String) {
        self.satisfied = false;
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(&why);
    }
}

/// One inequality lhs ≤ rhs or lhs ≥ rhs with its oriented, normalized margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(deserialize_with = "nan_if_null")]
    pub lhs: f64,
    #[serde(deserialize_with = "nan_if_null")]
    pub rhs: f64,
    pub relation: String,
    #[serde(deserialize_with = "nan_if_null")]
    pub margin: f64,
}

/// Non-finite numbers are written as null; read them back as NaN.
fn nan_if_null<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

fn normalized(diff: f64, lhs: f64, rhs: f64) -> f64 {
    let s = lhs.abs().max(rhs.abs());
    if s == 0.0 {
        0.0
    } else {
        diff / s
    }
}

impl Check {
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Check { name: name.into(), lhs, rhs, relation: "<=".into(), margin: normalized(rhs - lhs, lhs, rhs) }
    }

    pub fn ge(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Check { name: name.into(), lhs, rhs, relation: ">=".into(), margin: normalized(lhs - rhs, lhs, rhs) }
    }

    /// An inequality whose right side is +∞.
    pub fn vacuous(name: impl Into<String>, lhs: f64) -> Self {
        Check { name: name.into(), lhs, rhs: f64::MAX, relation: "<=".into(), margin: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ingredient {
    pub value: Ext,
    pub source: String,
}

/// Columns (x, lhs, rhs) for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub x_label: String,
    pub rows: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem_id: String,
    pub scenario: String,
    #[serde(deserialize_with = "nan_if_null")]
    pub lhs: f64,
    #[serde(deserialize_with = "nan_if_null")]
    pub rhs: f64,
    /// Oriented so that a nonnegative margin means the inequality holds.
    #[serde(deserialize_with = "nan_if_null")]
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub equality_expected: bool,
    pub equality_tolerance: f64,
    pub status: Status,
    pub binding_check: String,
    pub hypothesis: Hypothesis,
    pub checks: Vec<Check>,
    pub ingredients: BTreeMap<String, Ingredient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Series>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn engine_error(theorem_id: &str, scenario: &str, err: &Error) -> Self {
        VerificationReport {
            theorem_id: theorem_id.into(),
            scenario: scenario.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            tolerance: DEFAULT_TOLERANCE,
            pass: false,
            equality_expected: false,
            equality_tolerance: EQUALITY_FLOOR,
            status: Status::EngineError,
            binding_check: String::new(),
            hypothesis: Hypothesis::default(),
            checks: Vec::new(),
            ingredients: BTreeMap::new(),
            series: None,
            notes: vec![err.to_string()],
        }
    }

    /// Whether the inequality itself was refuted with its hypotheses in force.
    pub fn is_inequality_failure(&self) -> bool {
        self.status == Status::InequalityFailure
    }
}

/// Accumulates checks and ingredients, then decides the status.
#[derive(Debug, Clone)]
pub struct ReportBuilder {
    pub theorem_id: String,
    pub scenario: String,
    pub tolerance: f64,
    pub equality_expected: bool,
    /// Relative quadrature error estimate feeding the equality tolerance.
    pub quadrature_error: f64,
    pub hypothesis: Hypothesis,
    pub checks: Vec<Check>,
    pub ingredients: BTreeMap<String, Ingredient>,
    pub series: Option<Series>,
    pub notes: Vec<String>,
    not_applicable: Option<String>,
}

impl ReportBuilder {
    pub fn new(theorem_id: &str, scenario: &str, tolerance: f64, equality_expected: bool) -> Self {
        ReportBuilder {
            theorem_id: theorem_id.into(),
            scenario: scenario.into(),
            tolerance,
            equality_expected,
            quadrature_error: 0.0,
            hypothesis: Hypothesis::default(),
            checks: Vec::new(),
            ingredients: BTreeMap::new(),
            series: None,
            notes: Vec::new(),
            not_applicable: None,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn ingredient(&mut self, name: &str, value: f64, source: &str) {
        let v = if value.is_finite() { Ext::Finite(value) } else { Ext::Infinite };
        self.ingredients.insert(name.into(), Ingredient { value: v, source: source.into() });
    }

    pub fn ingredient_ext(&mut self, name: &str, value: Ext, source: &str) {
        self.ingredients.insert(name.into(), Ingredient { value, source: source.into() });
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn not_applicable(&mut self, why: impl Into<String>) {
        let why = why.into();
        self.notes.push(why.clone());
        self.not_applicable = Some(why);
    }

    pub fn finish(self) -> VerificationReport {
        let eq_tol = EQUALITY_FLOOR.max(10.0 * self.quadrature_error);
        let binding = self
            .checks
            .iter()
            .filter(|c| !c.margin.is_nan())
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
            .cloned();
        let nan_check = self.checks.iter().any(|c| c.margin.is_nan());
        let (lhs, rhs, margin, name) = match &binding {
            Some(c) => (c.lhs, c.rhs, c.margin, c.name.clone()),
            None => (f64::NAN, f64::NAN, f64::NAN, String::new()),
        };
        let holds = binding.is_some() && !nan_check && margin >= -self.tolerance;
        let eq_ok = !self.equality_expected || margin.abs() <= eq_tol;
        let status = if self.not_applicable.is_some() {
            Status::NotApplicable
        } else if !self.hypothesis.satisfied {
            Status::HypothesisFailure
        } else if binding.is_none() || nan_check {
            Status::EngineError
        } else if holds && eq_ok {
            Status::Pass
        } else {
            Status::InequalityFailure
        };
        VerificationReport {
            theorem_id: self.theorem_id,
            scenario: self.scenario,
            lhs,
            rhs,
            margin,
            tolerance: self.tolerance,
            pass: status == Status::Pass,
            equality_expected: self.equality_expected,
            equality_tolerance: eq_tol,
            status,
            binding_check: name,
            hypothesis: self.hypothesis,
            checks: self.checks,
            ingredients: self.ingredients,
            series: self.series,
            notes: self.notes,
        }
    }
}
