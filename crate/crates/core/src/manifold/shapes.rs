//! Star-shaped boundary hypersurfaces given in normal coordinates about the base point.
//!
//! Every boundary component is a radial graph w(u) = R(u)·d(u) over the unit sphere,
//! with d(u) = (cos u, sin u) for n = 2 and the usual (θ, φ) angles for n = 3.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Ball { radius: f64 },
    Ellipsoid { axes: Vec<f64> },
    Annulus { inner: f64, outer: f64 },
    Rectangle { width: f64, height: f64 },
    PerturbedCircle { radius: f64, amplitude: f64, mode: u32 },
}

/// Radial function of one boundary component.
#[derive(Debug, Clone, PartialEq)]
pub enum Radial {
    Constant(f64),
    Quadric(Vec<f64>),
    Perturbed { radius: f64, amplitude: f64, mode: f64 },
    Rectangle { half_width: f64, half_height: f64 },
}

/// One boundary component; `orient` is +1 when the outward normal points away from the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub radial: Radial,
    pub orient: f64,
}

/// Value, gradient and Hessian in the sphere parameters.
pub struct Jet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: DMatrix<f64>,
}

/// Unit direction d(u) with first and second parameter derivatives.
pub struct DirJet {
    pub d: DVector<f64>,
    pub da: Vec<DVector<f64>>,
    pub dab: Vec<Vec<DVector<f64>>>,
}

pub fn direction(u: &[f64]) -> DirJet {
    if u.len() == 1 {
        let (s, c) = u[0].sin_cos();
        let d = DVector::from_vec(vec![c, s]);
        let da = DVector::from_vec(vec![-s, c]);
        DirJet { dab: vec![vec![-d.clone()]], d, da: vec![da] }
    } else {
        let (st, ct) = u[0].sin_cos();
        let (sp, cp) = u[1].sin_cos();
        let v = |a: f64, b: f64, c: f64| DVector::from_vec(vec![a, b, c]);
        let d = v(st * cp, st * sp, ct);
        let dt = v(ct * cp, ct * sp, -st);
        let dp = v(-st * sp, st * cp, 0.0);
        let dtt = -d.clone();
        let dtp = v(-ct * sp, ct * cp, 0.0);
        let dpp = v(-st * cp, -st * sp, 0.0);
        DirJet { d, da: vec![dt, dp], dab: vec![vec![dtt, dtp.clone()], vec![dtp, dpp]] }
    }
}

impl Radial {
    pub fn jet(&self, u: &[f64], dir: &DirJet) -> Jet {
        let m = u.len();
        match self {
            Radial::Constant(r) => Jet { value: *r, grad: vec![0.0; m], hess: DMatrix::zeros(m, m) },
            Radial::Quadric(axes) => {
                let w: Vec<f64> = axes.iter().map(|a| 1.0 / (a * a)).collect();
                let q: f64 = (0..axes.len()).map(|i| w[i] * dir.d[i] * dir.d[i]).sum();
                let qa: Vec<f64> =
                    (0..m).map(|a| (0..axes.len()).map(|i| 2.0 * w[i] * dir.d[i] * dir.da[a][i]).sum()).collect();
                let mut qab = DMatrix::<f64>::zeros(m, m);
                for a in 0..m {
                    for b in 0..m {
                        qab[(a, b)] = (0..axes.len())
                            .map(|i| 2.0 * w[i] * (dir.da[a][i] * dir.da[b][i] + dir.d[i] * dir.dab[a][b][i]))
                            .sum();
                    }
                }
                let r = q.powf(-0.5);
                let grad: Vec<f64> = qa.iter().map(|x| -0.5 * q.powf(-1.5) * x).collect();
                let mut hess = DMatrix::zeros(m, m);
                for a in 0..m {
                    for b in 0..m {
                        hess[(a, b)] = 0.75 * q.powf(-2.5) * qa[a] * qa[b] - 0.5 * q.powf(-1.5) * qab[(a, b)];
                    }
                }
                Jet { value: r, grad, hess }
            }
            Radial::Perturbed { radius, amplitude, mode } => {
                let (s, c) = (mode * u[0]).sin_cos();
                Jet {
                    value: radius * (1.0 + amplitude * c),
                    grad: vec![-radius * amplitude * mode * s],
                    hess: DMatrix::from_element(1, 1, -radius * amplitude * mode * mode * c),
                }
            }
            Radial::Rectangle { half_width, half_height } => {
                // the side hit by the ray: normal angle α and distance δ, R = δ / cos(u − α)
                let (alpha, delta) = rectangle_side(*half_width, *half_height, u[0]);
                let (s, c) = (u[0] - alpha).sin_cos();
                Jet {
                    value: delta / c,
                    grad: vec![delta * s / (c * c)],
                    hess: DMatrix::from_element(1, 1, delta * (1.0 + s * s) / c.powi(3)),
                }
            }
        }
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        match self {
            Radial::Constant(r) => *r,
            _ => self.jet(u, &direction(u)).value,
        }
    }

    /// Radius along an arbitrary unit direction.
    pub fn along(&self, d: &DVector<f64>) -> f64 {
        match self {
            Radial::Constant(r) => *r,
            Radial::Quadric(axes) => {
                (0..axes.len()).map(|i| (d[i] / axes[i]).powi(2)).sum::<f64>().powf(-0.5)
            }
            _ => self.value(&[d[1].atan2(d[0])]),
        }
    }
}

fn rectangle_side(hw: f64, hh: f64, u: f64) -> (f64, f64) {
    let u = u.rem_euclid(2.0 * PI);
    let c = hh.atan2(hw);
    if u <= c || u >= 2.0 * PI - c {
        (0.0, hw)
    } else if u <= PI - c {
        (PI / 2.0, hh)
    } else if u <= PI + c {
        (PI, hw)
    } else {
        (1.5 * PI, hh)
    }
}

impl Shape {
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if !(n == 2 || n == 3) {
            return bad(format!("domains are supported in dimensions 2 and 3, got {n}"));
        }
        match self {
            Shape::Ball { radius } if *radius <= 0.0 => bad(format!("ball radius must be positive, got {radius}")),
            Shape::Ellipsoid { axes } if axes.len() != n => {
                bad(format!("ellipsoid needs {n} axes, got {}", axes.len()))
            }
            Shape::Ellipsoid { axes } if axes.iter().any(|a| *a <= 0.0) => bad("ellipsoid axes must be positive".into()),
            Shape::Annulus { inner, outer } if !(*inner > 0.0 && outer > inner) => {
                bad(format!("annulus needs 0 < inner < outer, got ({inner}, {outer})"))
            }
            Shape::Rectangle { .. } | Shape::PerturbedCircle { .. } if n != 2 => {
                bad("rectangles and perturbed circles are planar".into())
            }
            Shape::Rectangle { width, height } if !(*width > 0.0 && *height > 0.0) => {
                bad("rectangle sides must be positive".into())
            }
            Shape::PerturbedCircle { radius, amplitude, mode } => {
                let m = *mode as f64;
                // star-shaped and curvature positive: 1 + ε cos − ... > 0 needs |ε|(m² − 1) < 1
                if *radius <= 0.0 || amplitude.abs() * (m * m).max(1.0) >= 1.0 || *mode == 0 {
                    bad(format!("perturbed circle needs radius > 0, mode ≥ 1 and |amplitude|·mode² < 1"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn components(&self) -> Vec<Component> {
        let outer = |radial| Component { radial, orient: 1.0 };
        match self {
            Shape::Ball { radius } => vec![outer(Radial::Constant(*radius))],
            Shape::Ellipsoid { axes } => {
                if axes.iter().all(|a| (a - axes[0]).abs() == 0.0) {
                    vec![outer(Radial::Constant(axes[0]))]
                } else {
                    vec![outer(Radial::Quadric(axes.clone()))]
                }
            }
            Shape::Annulus { inner, outer: o } => {
                vec![outer(Radial::Constant(*o)), Component { radial: Radial::Constant(*inner), orient: -1.0 }]
            }
            Shape::Rectangle { width, height } => {
                vec![outer(Radial::Rectangle { half_width: 0.5 * width, half_height: 0.5 * height })]
            }
            Shape::PerturbedCircle { radius, amplitude, mode } => {
                vec![outer(Radial::Perturbed { radius: *radius, amplitude: *amplitude, mode: *mode as f64 })]
            }
        }
    }

    /// Radii of the components when each is a round sphere about the origin.
    pub fn round_radii(&self) -> Option<Vec<f64>> {
        self.components()
            .iter()
            .map(|c| match c.radial {
                Radial::Constant(r) => Some(r),
                _ => None,
            })
            .collect()
    }

    /// Where a ray in direction d lies inside the domain.
    pub fn radial_intervals(&self, d: &DVector<f64>) -> Vec<(f64, f64)> {
        match self {
            Shape::Annulus { inner, outer } => vec![(*inner, *outer)],
            _ => vec![(0.0, self.components()[0].radial.along(d))],
        }
    }

    /// Parameter values where the boundary is not smooth (n = 2).
    pub fn angular_breaks(&self) -> Vec<f64> {
        match self {
            Shape::Rectangle { width, height } => {
                let c = height.atan2(*width);
                vec![c, PI - c, PI + c, 2.0 * PI - c]
            }
            _ => Vec::new(),
        }
    }

    pub fn corners(&self) -> Vec<DVector<f64>> {
        match self {
            Shape::Rectangle { width, height } => [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]
                .iter()
                .map(|(sx, sy)| DVector::from_vec(vec![0.5 * width * sx, 0.5 * height * sy]))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Boundary points farthest from the origin that quadrature nodes can miss.
    pub fn extreme_points(&self) -> Vec<DVector<f64>> {
        match self {
            Shape::Ellipsoid { axes } => (0..axes.len())
                .flat_map(|i| {
                    [1.0, -1.0].map(|s| {
                        let mut v = DVector::zeros(axes.len());
                        v[i] = s * axes[i];
                        v
                    })
                })
                .collect(),
            Shape::PerturbedCircle { mode, .. } if *mode > 0 => (0..2 * mode)
                .map(|j| {
                    let t = PI * j as f64 / *mode as f64;
                    let r = self.components()[0].radial.value(&[t]);
                    DVector::from_vec(vec![r * t.cos(), r * t.sin()])
                })
                .collect(),
            _ => self.corners(),
        }
    }

    /// Radii on a ray where d(·, ∂Ω) has a ridge, known in closed form.
    pub fn radial_kinks(&self) -> Vec<f64> {
        match self {
            Shape::Annulus { inner, outer } => vec![0.5 * (inner + outer)],
            _ => Vec::new(),
        }
    }

    /// Largest distance of a boundary point from the origin, in coordinates.
    pub fn max_radius(&self) -> f64 {
        match self {
            Shape::Ball { radius } => *radius,
            Shape::Ellipsoid { axes } => axes.iter().cloned().fold(0.0, f64::max),
            Shape::Annulus { outer, .. } => *outer,
            Shape::Rectangle { width, height } => 0.5 * width.hypot(*height),
            Shape::PerturbedCircle { radius, amplitude, .. } => radius * (1.0 + amplitude.abs()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(r: &Radial, u: &[f64]) {
        let h = 1e-5;
        let j = r.jet(u, &direction(u));
        for a in 0..u.len() {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[a] += h;
            dn[a] -= h;
            let jp = r.jet(&up, &direction(&up));
            let jm = r.jet(&dn, &direction(&dn));
            assert!(((jp.value - jm.value) / (2.0 * h) - j.grad[a]).abs() < 1e-7);
            for b in 0..u.len() {
                assert!(((jp.grad[b] - jm.grad[b]) / (2.0 * h) - j.hess[(a, b)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn radial_derivatives_match_differences() {
        fd_check(&Radial::Quadric(vec![2.0, 1.0]), &[0.7]);
        fd_check(&Radial::Quadric(vec![1.0, 1.0, 2.0]), &[0.9, 2.1]);
        fd_check(&Radial::Perturbed { radius: 1.0, amplitude: 0.1, mode: 3.0 }, &[0.4]);
        fd_check(&Radial::Rectangle { half_width: 1.0, half_height: 0.5 }, &[0.2]);
        fd_check(&Radial::Rectangle { half_width: 1.0, half_height: 0.5 }, &[2.0]);
    }

    #[test]
    fn rectangle_rays_hit_the_sides() {
        let r = Radial::Rectangle { half_width: 1.0, half_height: 0.5 };
        assert!((r.value(&[0.0]) - 1.0).abs() < 1e-15);
        assert!((r.value(&[PI / 2.0]) - 0.5).abs() < 1e-15);
        let c = 0.5f64.atan2(1.0);
        assert!((r.value(&[c]) - 1.25f64.sqrt()).abs() < 1e-12);
    }
}
