//! Closed surfaces of constant curvature: the flat torus and the projective plane,
//! and the torus with a disk removed.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::chart::ChartMetric;
use super::domain::{CurvatureBounds, Domain};
use super::optimize::nelder_mead;
use super::spaceform::SpaceForm;
use super::{Ambient, BoundarySample, Point, Resolution};
use crate::error::{Error, Result};
use crate::quadrature::GlRule;

/// The Euclidean metric on R^n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flat(pub usize);

impl ChartMetric for Flat {
    fn dim(&self) -> usize {
        self.0
    }

    fn metric(&self, _x: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.0, self.0)
    }

    fn metric_derivatives(&self, _x: &[f64]) -> Vec<DMatrix<f64>> {
        vec![DMatrix::zeros(self.0, self.0); self.0]
    }
}

/// R² modulo the lattice aZ × bZ; points are kept in [0, a) × [0, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatTorus {
    pub a: f64,
    pub b: f64,
}

fn wrap(d: f64, period: f64) -> f64 {
    d - period * (d / period).round()
}

impl FlatTorus {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Domain(format!("torus periods must be positive, got ({a}, {b})")));
        }
        Ok(FlatTorus { a, b })
    }

    pub fn reduce(&self, x: &Point) -> Point {
        DVector::from_vec(vec![x[0].rem_euclid(self.a), x[1].rem_euclid(self.b)])
    }

    /// Shortest lattice representative of y − x.
    pub fn difference(&self, x: &Point, y: &Point) -> Point {
        DVector::from_vec(vec![wrap(y[0] - x[0], self.a), wrap(y[1] - x[1], self.b)])
    }
}

impl Ambient for FlatTorus {
    fn dim(&self) -> usize {
        2
    }

    fn curvature(&self) -> f64 {
        0.0
    }

    fn distance(&self, x: &Point, y: &Point) -> f64 {
        self.difference(x, y).norm()
    }

    fn exp(&self, x: &Point, v: &Point, t: f64) -> Point {
        self.reduce(&(x + v * (t / v.norm())))
    }

    fn log(&self, x: &Point, y: &Point) -> Result<(Point, f64)> {
        let d = self.difference(x, y);
        let len = d.norm();
        if len == 0.0 {
            return Err(Error::Geodesic("log of a point at itself".into()));
        }
        Ok((d / len, len))
    }

    fn norm(&self, _x: &Point, v: &Point) -> f64 {
        v.norm()
    }

    fn frame(&self, _x: &Point) -> Vec<Point> {
        vec![DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.0, 1.0])]
    }

    fn injectivity_radius(&self) -> f64 {
        0.5 * self.a.min(self.b)
    }

    fn total_volume(&self) -> Option<f64> {
        Some(self.a * self.b)
    }

    fn chart(&self) -> &dyn ChartMetric {
        &Flat(2)
    }
}

/// The round sphere of radius r with antipodal points identified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePlane {
    pub sphere: SpaceForm,
}

impl ProjectivePlane {
    pub fn new(radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(Error::Domain(format!("radius must be positive, got {radius}")));
        }
        Ok(ProjectivePlane { sphere: SpaceForm::new(1.0 / (radius * radius), 2)? })
    }

    pub fn radius(&self) -> f64 {
        1.0 / self.sphere.k().sqrt()
    }

    /// The antipode in normal coordinates about the base point.
    pub fn antipode(&self, y: &Point) -> Point {
        let r = y.norm();
        let big = PI * self.radius();
        if r == 0.0 {
            return DVector::from_vec(vec![big, 0.0]);
        }
        y * (-(big - r) / r)
    }
}

impl Ambient for ProjectivePlane {
    fn dim(&self) -> usize {
        2
    }

    fn curvature(&self) -> f64 {
        self.sphere.k()
    }

    fn distance(&self, x: &Point, y: &Point) -> f64 {
        self.sphere.distance(x, y).min(self.sphere.distance(x, &self.antipode(y)))
    }

    fn exp(&self, x: &Point, v: &Point, t: f64) -> Point {
        self.sphere.exp(x, v, t)
    }

    fn log(&self, x: &Point, y: &Point) -> Result<(Point, f64)> {
        let z = self.antipode(y);
        if self.sphere.distance(x, &z) < self.sphere.distance(x, y) {
            self.sphere.log(x, &z)
        } else {
            self.sphere.log(x, y)
        }
    }

    fn norm(&self, x: &Point, v: &Point) -> f64 {
        self.sphere.norm(x, v)
    }

    fn frame(&self, x: &Point) -> Vec<Point> {
        self.sphere.frame(x)
    }

    fn injectivity_radius(&self) -> f64 {
        0.5 * PI * self.radius()
    }

    fn total_volume(&self) -> Option<f64> {
        Some(2.0 * PI * self.radius().powi(2))
    }

    fn chart(&self) -> &dyn ChartMetric {
        &self.sphere
    }
}

/// Ω = T² ∖ B(center, ε): the domain of the metric-ball counterexample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusHole {
    pub torus: FlatTorus,
    pub center: [f64; 2],
    pub radius: f64,
}

impl TorusHole {
    pub fn new(torus: FlatTorus, center: [f64; 2], radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < torus.injectivity_radius()) {
            return Err(Error::Domain(format!(
                "hole radius must lie in (0, {}), got {radius}",
                torus.injectivity_radius()
            )));
        }
        Ok(TorusHole { torus, center, radius })
    }

    fn c(&self) -> Point {
        DVector::from_column_slice(&self.center)
    }
}

impl Domain for TorusHole {
    fn dim(&self) -> usize {
        2
    }

    fn scale(&self) -> f64 {
        self.torus.a.max(self.torus.b)
    }

    fn boundary_samples(&self, res: &Resolution) -> Result<Vec<BoundarySample>> {
        let rule = GlRule::new(res.order);
        let c = self.c();
        Ok(rule
            .panels(0.0, 2.0 * PI, res.boundary_panels)
            .into_iter()
            .map(|(u, w)| {
                let dir = DVector::from_vec(vec![u.cos(), u.sin()]);
                let p = self.torus.reduce(&(&c + &dir * self.radius));
                BoundarySample::new(p, dir, vec![-1.0 / self.radius], w * self.radius)
            })
            .collect())
    }

    fn raw_measures(&self, _res: &Resolution) -> Result<(f64, f64)> {
        Ok((self.torus.a * self.torus.b - PI * self.radius.powi(2), 2.0 * PI * self.radius))
    }

    fn distance_to_boundary(&self, x: &Point) -> f64 {
        (self.torus.distance(x, &self.c()) - self.radius).abs()
    }

    fn normal_point(&self, p: &BoundarySample, t: f64) -> Point {
        self.torus.exp(&p.point(), &p.normal(), t)
    }

    fn normal_curvatures(&self, _p: &BoundarySample, _t: f64) -> Vec<f64> {
        vec![0.0]
    }

    fn horizon(&self, _p: &BoundarySample) -> f64 {
        self.torus.a.hypot(self.torus.b)
    }

    fn curvature_bounds(&self, res: &Resolution) -> CurvatureBounds {
        CurvatureBounds::constant(0.0, res.boundary_panels * res.order)
    }

    fn interior_integral(&self, _f: &(dyn Fn(f64) -> f64 + Sync), _levels: &[f64], _res: &Resolution) -> Result<f64> {
        Err(Error::Domain("interior integrals are not implemented on the punctured torus".into()))
    }

    fn inradius(&self, _res: &Resolution) -> Result<(f64, Point)> {
        let c = self.c();
        let f = |x: &[f64]| -self.torus.distance(&DVector::from_column_slice(x), &c);
        let start = [c[0] + 0.4 * self.torus.a, c[1] + 0.4 * self.torus.b];
        let m = nelder_mead(f, &start, 0.05 * self.scale(), 1e-14, 4000);
        Ok((-m.value - self.radius, self.torus.reduce(&DVector::from_vec(m.x))))
    }

    fn ambient(&self) -> Option<&dyn Ambient> {
        Some(&self.torus)
    }

    fn as_torus_hole(&self) -> Option<&TorusHole> {
        Some(self)
    }
}
