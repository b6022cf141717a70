//! Numerical Riemannian geometry on the zoo of test manifolds.

pub mod chart;
pub mod closed;
pub mod cutlocus;
pub mod dijkstra;
pub mod domain;
pub mod optimize;
pub mod rotational;
pub mod shapes;
pub mod spaceform;
pub mod spaceform_domain;
pub mod spec;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kernels::Ext;

pub use chart::{christoffel, curvature_at, integrate_geodesic, ChartMetric, ChartPath};
pub use closed::{FlatTorus, ProjectivePlane, TorusHole};
pub use cutlocus::{ball_volume, cut_function, point_cut_locus, CutLocus};
pub use domain::{
    boundary_geometry, cut_distance, cut_tolerance, distance_to_boundary_field, exp_normal, extrinsic_radius, focal_distance,
    fill_cut_and_focal, measures, CurvatureBounds, Domain, ExtrinsicRadius, JacobianTransport, Measures,
};
pub use rotational::{Profile, RotationalDomain};
pub use shapes::Shape;
pub use spaceform::SpaceForm;
pub use spaceform_domain::SpaceFormDomain;
pub use spec::{build_ambient, build_domain, ManifoldSpec};

/// Chart coordinates of a point.
pub type Point = DVector<f64>;

/// A complete constant-curvature manifold with an explicit distance function.
pub trait Ambient: Send + Sync {
    fn dim(&self) -> usize;

    /// The constant sectional curvature.
    fn curvature(&self) -> f64;

    fn distance(&self, x: &Point, y: &Point) -> f64;

    /// Geodesic from x with initial direction v (any length), evaluated at arclength t.
    fn exp(&self, x: &Point, v: &Point, t: f64) -> Point;

    /// Unit initial direction and length of a minimal geodesic from x to y.
    fn log(&self, x: &Point, y: &Point) -> Result<(Point, f64)>;

    fn norm(&self, x: &Point, v: &Point) -> f64;

    /// Orthonormal basis of the tangent space at x, in chart components.
    fn frame(&self, x: &Point) -> Vec<Point>;

    fn injectivity_radius(&self) -> f64;

    fn total_volume(&self) -> Option<f64>;

    fn chart(&self) -> &dyn ChartMetric;
}

/// Sample counts shared by all quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Resolution {
    /// Gauss–Legendre panels along each boundary parameter.
    pub boundary_panels: usize,
    /// Gauss–Legendre order per panel.
    pub order: usize,
    /// Radial panels for interior integrals.
    pub radial_panels: usize,
    /// Direction grid for point cut loci.
    pub directions: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution { boundary_panels: 8, order: 6, radial_panels: 4, directions: 512 }
    }
}

impl Resolution {
    pub fn doubled(&self) -> Self {
        Resolution { boundary_panels: 2 * self.boundary_panels, radial_panels: 2 * self.radial_panels, ..*self }
    }
}

/// A point of ∂Ω with its extrinsic geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub point: Vec<f64>,
    /// Inward unit normal N(p) in chart components.
    pub inward_normal: Vec<f64>,
    /// Principal curvatures with respect to the outward normal.
    pub principal_curvatures: Vec<f64>,
    pub h: f64,
    pub h1: f64,
    /// Normalized elementary symmetric means H_0 = 1, ..., H_{n-1}.
    pub hj: Vec<f64>,
    pub weight: f64,
    pub cut: Option<Ext>,
    pub focal: Option<Ext>,
}

impl BoundarySample {
    pub fn new(point: Point, inward_normal: Point, mut kappa: Vec<f64>, weight: f64) -> Self {
        kappa.sort_by(f64::total_cmp);
        let m = kappa.len();
        let h: f64 = kappa.iter().sum();
        // e_j by the usual recurrence
        let mut e = vec![0.0; m + 1];
        e[0] = 1.0;
        for &k in &kappa {
            for j in (1..=m).rev() {
                e[j] += e[j - 1] * k;
            }
        }
        let hj = (0..=m).map(|j| e[j] / binomial(m, j)).collect();
        BoundarySample {
            point: point.as_slice().to_vec(),
            inward_normal: inward_normal.as_slice().to_vec(),
            h,
            h1: h / m as f64,
            hj,
            principal_curvatures: kappa,
            weight,
            cut: None,
            focal: None,
        }
    }

    pub fn point(&self) -> Point {
        DVector::from_column_slice(&self.point)
    }

    pub fn normal(&self) -> Point {
        DVector::from_column_slice(&self.inward_normal)
    }

    pub fn max_curvature(&self) -> f64 {
        self.principal_curvatures.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn binomial(m: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}
