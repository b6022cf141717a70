//! Scenario files, batch runs, report emission and kernel tables.

mod emit;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernels::CurvatureContext;
use crate::manifold::{ManifoldSpec, Resolution};
use crate::suite::{report::DEFAULT_TOLERANCE, verify, Status, VerificationReport, VerifierEntry, Workspace, THEOREM_IDS};

pub use emit::{emit_csv, emit_json, emit_plotdata, parse_report_document, write_reports, Format};

pub const SCHEMA_VERSION: &str = "v1";

/// Smallest tolerance a scenario may request.
pub const TOLERANCE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed negative normalized margin.
    #[serde(default = "default_tolerance")]
    pub inequality: f64,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { inequality: DEFAULT_TOLERANCE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub version: String,
    pub name: String,
    pub manifold: ManifoldSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ambient: Option<ManifoldSpec>,
    pub k: f64,
    pub verifiers: Vec<VerifierEntry>,
    pub tolerances: Tolerances,
    pub resolution: Resolution,
}

/// The document as written, before verifier ids and resolution counts are checked.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    version: String,
    name: String,
    manifold: ManifoldSpec,
    #[serde(default)]
    ambient: Option<ManifoldSpec>,
    k: f64,
    verifiers: Vec<Value>,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    resolution: Option<Value>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

fn resolution_from(v: Option<Value>) -> Result<Resolution> {
    let Some(v) = v else { return Ok(Resolution::default()) };
    let obj = v.as_object().ok_or_else(|| Error::Validation("resolution must be an object".into()))?;
    for (key, val) in obj {
        if !val.as_i64().is_some_and(|x| x > 0) {
            return Err(Error::Validation(format!("resolution.{key} must be a positive integer, got {val}")));
        }
    }
    serde_json::from_value(v).map_err(|e| Error::Validation(format!("resolution: {e}")))
}

fn entry_from(v: Value, index: usize) -> Result<VerifierEntry> {
    let id = v.get("id").and_then(Value::as_str).unwrap_or("").to_string();
    if !THEOREM_IDS.contains(&id.as_str()) {
        return Err(Error::Validation(format!("verifiers[{index}]: unknown theorem id \"{id}\"")));
    }
    serde_json::from_value(v).map_err(|e| Error::Validation(format!("verifiers[{index}] ({id}): {e}")))
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawScenario = serde_json::from_str(text).map_err(parse_error)?;
        if raw.version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "unsupported scenario version \"{}\" (expected \"{SCHEMA_VERSION}\")",
                raw.version
            )));
        }
        let verifiers = raw.verifiers.into_iter().enumerate().map(|(i, v)| entry_from(v, i)).collect::<Result<_>>()?;
        let s = Scenario {
            version: raw.version,
            name: raw.name,
            manifold: raw.manifold,
            ambient: raw.ambient,
            k: raw.k,
            verifiers,
            tolerances: raw.tolerances,
            resolution: resolution_from(raw.resolution)?,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Validation("scenario name is empty".into()));
        }
        if !self.k.is_finite() {
            return Err(Error::Validation("k must be finite".into()));
        }
        self.manifold.validate().map_err(as_validation)?;
        if let Some(a) = &self.ambient {
            a.validate().map_err(as_validation)?;
        }
        let r = &self.resolution;
        if r.boundary_panels == 0 || r.order == 0 || r.radial_panels == 0 || r.directions == 0 {
            return Err(Error::Validation("resolution fields must be positive".into()));
        }
        if !(self.tolerances.inequality >= TOLERANCE_FLOOR) {
            return Err(Error::Validation(format!(
                "tolerance {} is below the floor {TOLERANCE_FLOOR}",
                self.tolerances.inequality
            )));
        }
        if self.verifiers.is_empty() {
            return Err(Error::Validation("scenario lists no verifiers".into()));
        }
        for (i, v) in self.verifiers.iter().enumerate() {
            v.validate().map_err(|e| Error::Validation(format!("verifiers[{i}] ({}): {}", v.id(), strip(&e))))?;
        }
        Ok(())
    }

    pub fn workspace(&self) -> Workspace {
        Workspace::new(
            &self.name,
            self.manifold.clone(),
            self.ambient.clone(),
            self.k,
            self.resolution,
            self.tolerances.inequality,
        )
    }
}

fn strip(e: &Error) -> String {
    match e {
        Error::Validation(m) => m.clone(),
        other => other.to_string(),
    }
}

fn as_validation(e: Error) -> Error {
    Error::Validation(strip(&e))
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Scenario::from_json(&text)
}

/// Runs every verifier of the scenario on `jobs` threads (0 for the rayon default);
/// reports are ordered by theorem id, ties in scenario order.
pub fn run(scenario: &Scenario, jobs: usize) -> Result<Vec<VerificationReport>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Io(format!("thread pool: {e}")))?;
    let ws = scenario.workspace();
    let mut reports: Vec<VerificationReport> =
        pool.install(|| scenario.verifiers.par_iter().map(|e| verify(&ws, e)).collect());
    reports.sort_by(|a, b| a.theorem_id.cmp(&b.theorem_id));
    Ok(reports)
}

/// 0 all pass, 1 an inequality failed, 2 only hypotheses failed or did not apply, 3 engine error.
pub fn exit_code(reports: &[VerificationReport]) -> i32 {
    let any = |s: Status| reports.iter().any(|r| r.status == s);
    if any(Status::EngineError) {
        3
    } else if any(Status::InequalityFailure) {
        1
    } else if any(Status::HypothesisFailure) || any(Status::NotApplicable) {
        2
    } else {
        0
    }
}

/// Parses "A:B:STEP" into the grid A, A+STEP, ... ≤ B.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|e| Error::Parse(format!("range \"{spec}\": {e}"))))
        .collect::<Result<_>>()?;
    let [a, b, step] = parts[..] else {
        return Err(Error::Parse(format!("range \"{spec}\" must have the form A:B:STEP")));
    };
    if !(step > 0.0) || !(b >= a) {
        return Err(Error::Validation(format!("range \"{spec}\" needs STEP > 0 and B >= A")));
    }
    let m = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=m).map(|i| a + i as f64 * step).collect())
}

/// CSV of the kernels on a grid: t, s_k, c_k, λ_k(t), l_k(t) (t read as a curvature,
/// empty where inadmissible), h_k(t), and j_k(t, ρ) for each requested ρ.
pub fn tabulate_kernels(k: f64, n: usize, grid: &[f64], rhos: &[f64]) -> Result<String> {
    let ctx = CurvatureContext::new(k, n)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["t", "s_k", "c_k", "lambda_k", "l_k", "h_k"].iter().map(|s| s.to_string()).collect();
    header.extend(rhos.iter().map(|r| format!("j_k(rho={r})")));
    w.write_record(&header).map_err(csv_error)?;
    let f = |x: f64| format!("{x:.8e}");
    for &t in grid {
        let kv = ctx.eval(t)?;
        let mut row = vec![f(t), f(kv.s), f(kv.c), f(ctx.lambda_of_l(t)?)];
        row.push(ctx.l_of_lambda(t).map(f).unwrap_or_default());
        row.push(f(ctx.h(t)?));
        for &r in rhos {
            row.push(f(ctx.j_tube(t, r)?));
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BALL: &str = r#"{
        "version": "v1", "name": "b", "k": 0,
        "manifold": {"type": "model_ball", "k": 0, "n": 2, "radius": 1},
        "verifiers": [{"id": "hkr", "equality_expected": true}, {"id": "cut_isoperimetric"}]
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let s = Scenario::from_json(BALL).unwrap();
        assert_eq!(s.verifiers.len(), 2);
        assert!(s.verifiers[0].equality_expected);
        assert_eq!(s.resolution, Resolution::default());
        assert_eq!(Scenario::from_json(&s.to_json().unwrap()).unwrap(), s);
    }

    #[test]
    fn rejections() {
        let bad_id = BALL.replace("\"hkr\"", "\"thm_99\"");
        assert!(matches!(Scenario::from_json(&bad_id), Err(Error::Validation(_))));
        let bad_version = BALL.replace("\"v1\"", "\"v2\"");
        assert!(matches!(Scenario::from_json(&bad_version), Err(Error::Validation(_))));
        let unknown = BALL.replacen("\"k\": 0,", "\"k\": 0, \"colour\": 1,", 1);
        assert!(matches!(Scenario::from_json(&unknown), Err(Error::Parse(_))));
        let neg = BALL.replacen("\"k\": 0,", "\"k\": 0, \"resolution\": {\"boundary_panels\": -4},", 1);
        assert!(matches!(Scenario::from_json(&neg), Err(Error::Validation(_))));
        let tol = BALL.replacen("\"k\": 0,", "\"k\": 0, \"tolerances\": {\"inequality\": 1e-20},", 1);
        assert!(matches!(Scenario::from_json(&tol), Err(Error::Validation(_))));
        let extra = BALL.replace("{\"id\": \"cut_isoperimetric\"}", "{\"id\": \"cut_isoperimetric\", \"t\": 1}");
        assert!(matches!(Scenario::from_json(&extra), Err(Error::Validation(_))));
        match Scenario::from_json("{\n  \"version\": \"v1\",\n  oops\n}") {
            Err(Error::Parse(m)) => assert!(m.contains("line 3"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ranges_and_kernel_table() {
        assert_eq!(parse_range("1:2:0.5").unwrap(), vec![1.0, 1.5, 2.0]);
        assert!(parse_range("1:2").is_err());
        let t = tabulate_kernels(0.0, 3, &[1.0], &[0.5]).unwrap();
        let row: Vec<&str> = t.lines().nth(1).unwrap().split(',').collect();
        assert!((row[5].parse::<f64>().unwrap() - 1.0 / 3.0).abs() < 1e-9);
        let t = tabulate_kernels(1.0, 2, &[std::f64::consts::FRAC_PI_2], &[]).unwrap();
        let h: f64 = t.lines().nth(1).unwrap().split(',').nth(5).unwrap().parse().unwrap();
        assert!((h - 1.0).abs() < 1e-8);
        assert!(tabulate_kernels(1.0, 2, &[std::f64::consts::PI], &[]).is_err());
    }

    #[test]
    fn exit_codes() {
        use crate::error::Error as E;
        let ok = {
            let mut b = crate::suite::ReportBuilder::new("hkr", "s", 1e-4, false);
            b.check(crate::suite::Check::le("c", 1.0, 2.0));
            b.finish()
        };
        let hyp = {
            let mut b = crate::suite::ReportBuilder::new("hkr", "s", 1e-4, false);
            b.hypothesis.fail("x".into());
            b.finish()
        };
        let bad = {
            let mut b = crate::suite::ReportBuilder::new("hkr", "s", 1e-4, false);
            b.check(crate::suite::Check::le("c", 3.0, 2.0));
            b.finish()
        };
        let err = VerificationReport::engine_error("hkr", "s", &E::Io("x".into()));
        assert_eq!(exit_code(&[ok.clone()]), 0);
        assert_eq!(exit_code(&[ok.clone(), hyp.clone()]), 2);
        assert_eq!(exit_code(&[hyp.clone(), bad]), 1);
        assert_eq!(exit_code(&[ok, err]), 3);
    }
}
