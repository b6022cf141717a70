//! One verifier per inequality: each computes both sides from engine outputs and
//! kernel values and returns a [`VerificationReport`].

pub mod report;
mod verifiers;

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernels::{CurvatureContext, Ext};
use crate::manifold::domain::{cut_distance, focal_distance, measures};
use crate::manifold::{
    build_ambient, build_domain, extrinsic_radius, Ambient, BoundarySample, CurvatureBounds, Domain, ExtrinsicRadius,
    ManifoldSpec, Measures, Resolution,
};

pub use report::{Check, Hypothesis, Ingredient, ReportBuilder, Series, Status, VerificationReport};

/// Every theorem id known to the suite, in report order.
pub const THEOREM_IDS: [&str; 15] = [
    "bishop_gromov",
    "cheeger",
    "cut_isoperimetric",
    "cutlocus_bound",
    "fenchel",
    "focal_lower_bound",
    "hkr",
    "inradius",
    "isodiametric",
    "quermass_ratio",
    "santalo_yanez",
    "superlevel",
    "toponogov",
    "tube",
    "weighted",
];

/// A positive weight φ on [0, ∞).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Weight {
    Constant { value: f64 },
    /// φ(ρ) = ρ^exponent.
    Power { exponent: f64 },
    /// Piecewise linear through (t_i, values_i), constant beyond the ends.
    Samples { t: Vec<f64>, values: Vec<f64> },
}

impl Weight {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Weight::Constant { value } => *value,
            Weight::Power { exponent } => r.max(0.0).powf(*exponent),
            Weight::Samples { t, values } => {
                let i = t.partition_point(|&s| s <= r);
                if i == 0 {
                    values[0]
                } else if i == t.len() {
                    values[t.len() - 1]
                } else {
                    let s = (r - t[i - 1]) / (t[i] - t[i - 1]);
                    values[i - 1] + s * (values[i] - values[i - 1])
                }
            }
        }
    }

    /// Points where φ may fail to be smooth.
    pub fn breaks(&self) -> Vec<f64> {
        match self {
            Weight::Samples { t, .. } => t.clone(),
            _ => Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Weight::Samples { t, values } = self {
            if t.len() < 2 || t.len() != values.len() || t.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Validation("weight samples need ≥ 2 increasing nodes with matching values".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomTriangles {
    pub count: usize,
    pub seed: u64,
    /// Vertices are drawn within this distance of the chart origin.
    pub spread: f64,
}

fn default_t_samples() -> usize {
    50
}

/// Per-verifier parameters, tagged by theorem id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum VerifierParams {
    CutIsoperimetric {},
    Superlevel {
        t_grid: Vec<f64>,
    },
    Tube {
        rho_grid: Vec<f64>,
    },
    Inradius {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
    },
    BishopGromov {
        r_grid: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    Hkr {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
    },
    Fenchel {},
    Isodiametric {},
    Cheeger {},
    SantaloYanez {
        radii: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    QuermassRatio {
        i: i32,
        j: i32,
    },
    Weighted {
        weight: Weight,
    },
    FocalLowerBound {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda_max: Option<f64>,
        #[serde(default)]
        cut_equals_focal: bool,
    },
    CutlocusBound {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        point: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subdomain_radius: Option<f64>,
    },
    Toponogov {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        triangles: Vec<[Vec<f64>; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        random: Option<RandomTriangles>,
        #[serde(default = "default_t_samples")]
        t_samples: usize,
    },
}

impl VerifierParams {
    pub fn id(&self) -> &'static str {
        match self {
            VerifierParams::CutIsoperimetric {} => "cut_isoperimetric",
            VerifierParams::Superlevel { .. } => "superlevel",
            VerifierParams::Tube { .. } => "tube",
            VerifierParams::Inradius { .. } => "inradius",
            VerifierParams::BishopGromov { .. } => "bishop_gromov",
            VerifierParams::Hkr { .. } => "hkr",
            VerifierParams::Fenchel {} => "fenchel",
            VerifierParams::Isodiametric {} => "isodiametric",
            VerifierParams::Cheeger {} => "cheeger",
            VerifierParams::SantaloYanez { .. } => "santalo_yanez",
            VerifierParams::QuermassRatio { .. } => "quermass_ratio",
            VerifierParams::Weighted { .. } => "weighted",
            VerifierParams::FocalLowerBound { .. } => "focal_lower_bound",
            VerifierParams::CutlocusBound { .. } => "cutlocus_bound",
            VerifierParams::Toponogov { .. } => "toponogov",
        }
    }

    fn validate(&self) -> Result<()> {
        let nonempty = |v: &[f64], what: &str| {
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                Err(Error::Validation(format!("{what} must be a nonempty list of finite numbers")))
            } else {
                Ok(())
            }
        };
        match self {
            VerifierParams::Superlevel { t_grid } => nonempty(t_grid, "t_grid"),
            VerifierParams::Tube { rho_grid } => nonempty(rho_grid, "rho_grid"),
            VerifierParams::BishopGromov { r_grid, .. } => nonempty(r_grid, "r_grid"),
            VerifierParams::SantaloYanez { radii, .. } => nonempty(radii, "radii"),
            VerifierParams::QuermassRatio { i, j } if !(*i >= -1 && i < j) => {
                Err(Error::Validation(format!("quermass indices need -1 <= i < j, got i = {i}, j = {j}")))
            }
            VerifierParams::Weighted { weight } => weight.validate(),
            VerifierParams::Toponogov { triangles, random, t_samples } => {
                if triangles.is_empty() && random.is_none() {
                    return Err(Error::Validation("toponogov needs triangles or a random spec".into()));
                }
                if *t_samples == 0 {
                    return Err(Error::Validation("t_samples must be positive".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// A verifier invocation: its parameters plus the options every verifier accepts.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifierEntry {
    pub params: VerifierParams,
    pub equality_expected: bool,
    pub tolerance: Option<f64>,
    /// Comparison curvature, overriding the scenario's k.
    pub k: Option<f64>,
}

impl VerifierEntry {
    pub fn new(params: VerifierParams) -> Self {
        VerifierEntry { params, equality_expected: false, tolerance: None, k: None }
    }

    pub fn equality(mut self) -> Self {
        self.equality_expected = true;
        self
    }

    pub fn id(&self) -> &'static str {
        self.params.id()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.tolerance {
            if !(t >= 1e-13) {
                return Err(Error::Validation(format!("tolerance {t} is below the floor 1e-13")));
            }
        }
        self.params.validate()
    }
}

impl Serialize for VerifierEntry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut v = serde_json::to_value(&self.params).map_err(serde::ser::Error::custom)?;
        let obj = v.as_object_mut().expect("params serialize to an object");
        if self.equality_expected {
            obj.insert("equality_expected".into(), Value::Bool(true));
        }
        if let Some(t) = self.tolerance {
            obj.insert("tolerance".into(), t.into());
        }
        if let Some(k) = self.k {
            obj.insert("k".into(), k.into());
        }
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VerifierEntry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let mut v = Value::deserialize(d)?;
        let obj = v.as_object_mut().ok_or_else(|| D::Error::custom("verifier must be an object"))?;
        let id = obj.get("id").and_then(Value::as_str).ok_or_else(|| D::Error::custom("verifier needs an \"id\""))?;
        if !THEOREM_IDS.contains(&id) {
            return Err(D::Error::custom(format!("unknown theorem id \"{id}\"")));
        }
        let equality_expected = match obj.remove("equality_expected") {
            Some(Value::Bool(b)) => b,
            None => false,
            Some(_) => return Err(D::Error::custom("equality_expected must be a boolean")),
        };
        let num = |x: Option<Value>, what: &str| match x {
            None => Ok(None),
            Some(Value::Number(n)) => Ok(n.as_f64()),
            Some(_) => Err(D::Error::custom(format!("{what} must be a number"))),
        };
        let tolerance = num(obj.remove("tolerance"), "tolerance")?;
        let k = num(obj.remove("k"), "k")?;
        let params = serde_json::from_value(v).map_err(D::Error::custom)?;
        Ok(VerifierEntry { params, equality_expected, tolerance, k })
    }
}

/// Shared state for the verifiers of one scenario; expensive engine outputs are
/// computed on first use.
pub struct Workspace {
    pub scenario: String,
    pub manifold: ManifoldSpec,
    pub k: f64,
    pub res: Resolution,
    pub tolerance: f64,
    domain: Result<Box<dyn Domain>>,
    explicit_ambient: Option<Result<Box<dyn Ambient>>>,
    manifold_ambient: OnceLock<Result<Box<dyn Ambient>>>,
    geometry: OnceLock<Result<Vec<BoundarySample>>>,
    with_cut: OnceLock<Result<Vec<BoundarySample>>>,
    with_focal: OnceLock<Result<Vec<BoundarySample>>>,
    measures: OnceLock<Result<Measures>>,
    bounds: OnceLock<CurvatureBounds>,
    radius: OnceLock<Result<ExtrinsicRadius>>,
}

impl Workspace {
    pub fn new(
        scenario: &str,
        manifold: ManifoldSpec,
        ambient: Option<ManifoldSpec>,
        k: f64,
        res: Resolution,
        tolerance: f64,
    ) -> Self {
        let domain = build_domain(&manifold);
        Workspace {
            scenario: scenario.into(),
            k,
            res,
            tolerance,
            domain,
            explicit_ambient: ambient.map(|a| build_ambient(&a)),
            manifold_ambient: OnceLock::new(),
            geometry: OnceLock::new(),
            with_cut: OnceLock::new(),
            with_focal: OnceLock::new(),
            measures: OnceLock::new(),
            bounds: OnceLock::new(),
            radius: OnceLock::new(),
            manifold,
        }
    }

    pub fn domain(&self) -> Result<&dyn Domain> {
        self.domain.as_deref().map_err(Clone::clone)
    }

    /// The explicit ambient if given, else the one the domain lives in, else the manifold itself.
    pub fn ambient(&self) -> Result<&dyn Ambient> {
        if let Some(a) = &self.explicit_ambient {
            return a.as_deref().map_err(Clone::clone);
        }
        if let Ok(d) = &self.domain {
            if let Some(a) = d.ambient() {
                return Ok(a);
            }
        }
        init(&self.manifold_ambient, || build_ambient(&self.manifold)).as_deref().map_err(Clone::clone)
    }

    pub fn samples(&self) -> Result<&[BoundarySample]> {
        cached(&self.geometry, || self.domain()?.boundary_samples(&self.res))
    }

    /// Boundary samples with cut distances filled in.
    pub fn samples_with_cut(&self) -> Result<&[BoundarySample]> {
        cached(&self.with_cut, || {
            let dom = self.domain()?;
            let mut s = self.samples()?.to_vec();
            let cuts: Vec<Result<Ext>> = s.par_iter().map(|p| cut_distance(dom, p)).collect();
            for (p, c) in s.iter_mut().zip(cuts) {
                p.cut = Some(c?);
            }
            Ok(s)
        })
    }

    /// Boundary samples with focal distances filled in.
    pub fn samples_with_focal(&self) -> Result<&[BoundarySample]> {
        cached(&self.with_focal, || {
            let dom = self.domain()?;
            let mut s = self.samples()?.to_vec();
            let f: Vec<Result<Ext>> = s.par_iter().map(|p| focal_distance(dom, p)).collect();
            for (p, c) in s.iter_mut().zip(f) {
                p.focal = Some(c?);
            }
            Ok(s)
        })
    }

    pub fn measures(&self) -> Result<Measures> {
        init(&self.measures, || measures(self.domain()?, &self.res)).clone()
    }

    pub fn bounds(&self) -> Result<&CurvatureBounds> {
        let dom = self.domain()?;
        Ok(init(&self.bounds, || dom.curvature_bounds(&self.res)))
    }

    pub fn extrinsic_radius(&self) -> Result<ExtrinsicRadius> {
        init(&self.radius, || {
            let dom = self.domain()?;
            let amb = self.ambient()?;
            Ok(extrinsic_radius(amb, self.samples()?, &dom.support_points(), dom.scale()))
        })
        .clone()
    }

    pub fn ctx(&self, k: f64) -> Result<CurvatureContext> {
        CurvatureContext::new(k, self.manifold.dim())
    }

    /// Relative quadrature error of volume and area.
    pub fn quadrature_error(&self) -> f64 {
        self.measures()
            .map(|m| (m.volume_error / m.volume.abs()).max(m.area_error / m.boundary_area.abs()))
            .unwrap_or(0.0)
    }
}

/// Lazy initialization that never waits on another thread's initializer.
fn init<T>(cell: &OnceLock<T>, f: impl FnOnce() -> T) -> &T {
    if let Some(v) = cell.get() {
        return v;
    }
    let v = f();
    let _ = cell.set(v);
    cell.get().expect("set above")
}

fn cached<'a, T>(cell: &'a OnceLock<Result<Vec<T>>>, f: impl FnOnce() -> Result<Vec<T>>) -> Result<&'a [T]> {
    match init(cell, f) {
        Ok(v) => Ok(v.as_slice()),
        Err(e) => Err(e.clone()),
    }
}

/// Runs one verifier; engine errors become an `engine_error` report.
pub fn verify(ws: &Workspace, entry: &VerifierEntry) -> VerificationReport {
    let id = entry.id();
    match verifiers::dispatch(ws, entry) {
        Ok(r) => r,
        Err(e) => VerificationReport::engine_error(id, &ws.scenario, &e),
    }
}
