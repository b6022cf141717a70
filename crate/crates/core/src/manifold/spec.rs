//! Serializable descriptions of the test manifolds.

use serde::{Deserialize, Serialize};

use super::closed::{FlatTorus, ProjectivePlane, TorusHole};
use super::domain::Domain;
use super::rotational::{Profile, RotationalDomain};
use super::shapes::Shape;
use super::spaceform::SpaceForm;
use super::spaceform_domain::SpaceFormDomain;
use super::Ambient;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hole {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldSpec {
    /// Geodesic ball of the given radius in M_k^n.
    ModelBall { k: f64, n: usize, radius: f64 },
    WarpedProduct { n: usize, profile: Profile, t_range: [f64; 2] },
    /// Graph of e^{x-L}, x ∈ [0, L], rotated about the x-axis.
    SurfaceOfRevolution { length: f64 },
    FlatTorus {
        a: f64,
        b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hole: Option<Hole>,
    },
    ProjectivePlane { radius: f64 },
    /// The complete model space M_k^n.
    SpaceForm { k: f64, n: usize },
    EuclideanDomain { n: usize, shape: Shape },
    HyperbolicDomain { k: f64, n: usize, shape: Shape },
    SphericalDomain { k: f64, n: usize, shape: Shape },
}

impl ManifoldSpec {
    pub fn dim(&self) -> usize {
        match self {
            ManifoldSpec::ModelBall { n, .. }
            | ManifoldSpec::WarpedProduct { n, .. }
            | ManifoldSpec::SpaceForm { n, .. }
            | ManifoldSpec::EuclideanDomain { n, .. }
            | ManifoldSpec::HyperbolicDomain { n, .. }
            | ManifoldSpec::SphericalDomain { n, .. } => *n,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n < 2 {
            return Err(Error::Validation(format!("dimension must be at least 2, got {n}")));
        }
        match self {
            ManifoldSpec::HyperbolicDomain { k, .. } if *k >= 0.0 => {
                Err(Error::Validation(format!("hyperbolic domains need k < 0, got {k}")))
            }
            ManifoldSpec::SphericalDomain { k, .. } if *k <= 0.0 => {
                Err(Error::Validation(format!("spherical domains need k > 0, got {k}")))
            }
            ManifoldSpec::ModelBall { radius, .. } if *radius <= 0.0 => {
                Err(Error::Validation(format!("radius must be positive, got {radius}")))
            }
            _ => Ok(()),
        }
    }
}

/// The domain Ω described by a `ManifoldSpec`, when it has a boundary.
pub fn build_domain(spec: &ManifoldSpec) -> Result<Box<dyn Domain>> {
    spec.validate()?;
    Ok(match spec {
        ManifoldSpec::ModelBall { k, n, radius } => {
            Box::new(SpaceFormDomain::new(*k, *n, Shape::Ball { radius: *radius })?)
        }
        ManifoldSpec::EuclideanDomain { n, shape } => Box::new(SpaceFormDomain::new(0.0, *n, shape.clone())?),
        ManifoldSpec::HyperbolicDomain { k, n, shape } | ManifoldSpec::SphericalDomain { k, n, shape } => {
            Box::new(SpaceFormDomain::new(*k, *n, shape.clone())?)
        }
        ManifoldSpec::WarpedProduct { n, profile, t_range } => {
            Box::new(RotationalDomain::warped(*n, profile.clone(), *t_range)?)
        }
        ManifoldSpec::SurfaceOfRevolution { length } => Box::new(RotationalDomain::revolution(*length)?),
        ManifoldSpec::FlatTorus { a, b, hole: Some(h) } => {
            Box::new(TorusHole::new(FlatTorus::new(*a, *b)?, h.center, h.radius)?)
        }
        other => return Err(Error::Domain(format!("{} has no boundary", kind_name(other)))),
    })
}

/// The complete ambient manifold described by a `ManifoldSpec`.
pub fn build_ambient(spec: &ManifoldSpec) -> Result<Box<dyn Ambient>> {
    spec.validate()?;
    Ok(match spec {
        ManifoldSpec::FlatTorus { a, b, .. } => Box::new(FlatTorus::new(*a, *b)?),
        ManifoldSpec::ProjectivePlane { radius } => Box::new(ProjectivePlane::new(*radius)?),
        ManifoldSpec::SpaceForm { k, n }
        | ManifoldSpec::ModelBall { k, n, .. }
        | ManifoldSpec::HyperbolicDomain { k, n, .. }
        | ManifoldSpec::SphericalDomain { k, n, .. } => Box::new(SpaceForm::new(*k, *n)?),
        ManifoldSpec::EuclideanDomain { n, .. } => Box::new(SpaceForm::new(0.0, *n)?),
        other => return Err(Error::Domain(format!("{} has no explicit ambient", kind_name(other)))),
    })
}

pub fn kind_name(spec: &ManifoldSpec) -> &'static str {
    match spec {
        ManifoldSpec::ModelBall { .. } => "model_ball",
        ManifoldSpec::WarpedProduct { .. } => "warped_product",
        ManifoldSpec::SurfaceOfRevolution { .. } => "surface_of_revolution",
        ManifoldSpec::FlatTorus { .. } => "flat_torus",
        ManifoldSpec::ProjectivePlane { .. } => "projective_plane",
        ManifoldSpec::SpaceForm { .. } => "space_form",
        ManifoldSpec::EuclideanDomain { .. } => "euclidean_domain",
        ManifoldSpec::HyperbolicDomain { .. } => "hyperbolic_domain",
        ManifoldSpec::SphericalDomain { .. } => "spherical_domain",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_rejection() {
        let s = ManifoldSpec::EuclideanDomain { n: 2, shape: Shape::Annulus { inner: 1.0, outer: 2.0 } };
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<ManifoldSpec>(&j).unwrap(), s);
        assert!(serde_json::from_str::<ManifoldSpec>(r#"{"type":"model_ball","k":0,"n":2,"radius":1,"x":1}"#).is_err());
        assert!(build_domain(&ManifoldSpec::ProjectivePlane { radius: 1.0 }).is_err());
        assert!(build_ambient(&ManifoldSpec::ProjectivePlane { radius: 1.0 }).is_ok());
    }
}
