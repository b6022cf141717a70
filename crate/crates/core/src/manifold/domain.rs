//! Compact domains with boundary: the operations shared by every domain family.

use nalgebra::DVector;
use ode_solvers::{Dopri5, System};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::closed::TorusHole;
use super::optimize::{brent_root, nelder_mead};
use super::spaceform_domain::SpaceFormDomain;
use super::{Ambient, BoundarySample, Point, Resolution};
use crate::error::{Error, Result};
use crate::kernels::Ext;

/// Relative accuracy asked of volume and area quadratures.
pub const MEASURE_TARGET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    pub volume: f64,
    pub boundary_area: f64,
    /// Change under panel doubling.
    pub volume_error: f64,
    pub area_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBounds {
    /// Minimum of Ric(v,v)/((n-1)|v|²).
    pub ric_lower: f64,
    pub sec_upper: f64,
    pub sec_lower: f64,
    pub samples: usize,
    /// Where the lowest Ricci value was seen.
    pub worst_location: Vec<f64>,
}

impl CurvatureBounds {
    pub fn constant(k: f64, samples: usize) -> Self {
        CurvatureBounds { ric_lower: k, sec_upper: k, sec_lower: k, samples, worst_location: vec![] }
    }
}

pub trait Domain: Send + Sync {
    fn dim(&self) -> usize;

    /// Characteristic length used to scale tolerances.
    fn scale(&self) -> f64;

    /// Boundary samples with geometry and quadrature weights; cut and focal left empty.
    fn boundary_samples(&self, res: &Resolution) -> Result<Vec<BoundarySample>>;

    /// (volume, boundary area) at one resolution.
    fn raw_measures(&self, res: &Resolution) -> Result<(f64, f64)>;

    fn distance_to_boundary(&self, x: &Point) -> f64;

    /// exp_p(t N(p)).
    fn normal_point(&self, p: &BoundarySample, t: f64) -> Point;

    /// Sectional curvature of the plane spanned by the normal geodesic and each
    /// principal direction (transported), at parameter t.
    fn normal_curvatures(&self, p: &BoundarySample, t: f64) -> Vec<f64>;

    /// Largest parameter to which the normal geodesic from p is followed.
    fn horizon(&self, p: &BoundarySample) -> f64;

    fn curvature_bounds(&self, res: &Resolution) -> CurvatureBounds;

    /// ∫_Ω f(d(x, ∂Ω)) dV; f may jump at the listed distance levels.
    fn interior_integral(&self, f: &(dyn Fn(f64) -> f64 + Sync), levels: &[f64], res: &Resolution) -> Result<f64>;

    /// sup of d(x, ∂Ω) and a point attaining it.
    fn inradius(&self, res: &Resolution) -> Result<(f64, Point)>;

    fn ambient(&self) -> Option<&dyn Ambient> {
        None
    }

    fn as_space_form(&self) -> Option<&SpaceFormDomain> {
        None
    }

    fn as_torus_hole(&self) -> Option<&TorusHole> {
        None
    }

    /// Corner points of a piecewise smooth boundary.
    fn corners(&self) -> Vec<Point> {
        Vec::new()
    }

    /// Boundary points to include when maximizing distances over ∂Ω.
    fn support_points(&self) -> Vec<Point> {
        self.corners()
    }

    /// Threshold for the predicate t − d(exp_p(tN), ∂Ω) ≤ δ; must exceed the distance oracle's error.
    fn cut_threshold(&self) -> f64 {
        1e-4 * self.scale()
    }

    /// Largest amount by which the distance oracle exceeds a mesh path length to ∂Ω.
    fn oracle_check(&self, _res: &Resolution) -> Option<f64> {
        None
    }
}

/// Volume and area, validated by one panel doubling.
pub fn measures(dom: &dyn Domain, res: &Resolution) -> Result<Measures> {
    let (v1, a1) = dom.raw_measures(res)?;
    let (v2, a2) = dom.raw_measures(&res.doubled())?;
    let (ev, ea) = ((v2 - v1).abs(), (a2 - a1).abs());
    if ev > 10.0 * MEASURE_TARGET * v2.abs() || ea > 10.0 * MEASURE_TARGET * a2.abs() {
        return Err(Error::NonConvergence(format!(
            "panel doubling moved volume by {ev:e} and area by {ea:e}"
        )));
    }
    Ok(Measures { volume: v2, boundary_area: a2, volume_error: ev, area_error: ea })
}

/// Boundary samples of the domain (corners excluded by construction).
pub fn boundary_geometry(dom: &dyn Domain, res: &Resolution) -> Result<Vec<BoundarySample>> {
    dom.boundary_samples(res)
}

/// Cut predicate tolerance for a domain.
pub fn cut_tolerance(dom: &dyn Domain) -> f64 {
    1e-4 * dom.scale()
}

fn cut_crossing(dom: &dyn Domain, p: &BoundarySample, delta: f64, hi: f64) -> f64 {
    let holds = |t: f64| t - dom.distance_to_boundary(&dom.normal_point(p, t)) <= delta;
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// c(p) = sup{t : d(exp_p(tN), Σ) = t}, by bisection on the monotone predicate
/// t − d(exp_p(tN), Σ) ≤ δ with a Richardson step in δ.
pub fn cut_distance(dom: &dyn Domain, p: &BoundarySample) -> Result<Ext> {
    let delta = dom.cut_threshold();
    let hi = dom.horizon(p);
    let t_hi = hi - dom.distance_to_boundary(&dom.normal_point(p, hi));
    if t_hi <= delta {
        return Ok(Ext::Infinite);
    }
    let t1 = cut_crossing(dom, p, delta, hi);
    let t2 = cut_crossing(dom, p, 0.5 * delta, hi);
    Ok(Ext::Finite((2.0 * t2 - t1).clamp(0.0, hi)))
}

/// Density of the normal exponential map and mean curvature of the parallel hypersurfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianTransport {
    pub t: Vec<f64>,
    /// F(p, t) = det of the Jacobi tensor.
    pub f: Vec<f64>,
    /// Mean curvature H(p, t) of the parallel hypersurface.
    pub ht: Vec<f64>,
    /// Principal Jacobi fields J_i and their derivatives.
    pub j: Vec<Vec<f64>>,
    pub jd: Vec<Vec<f64>>,
    /// First zero of det J before the end of integration.
    pub focal: Option<f64>,
}

impl JacobianTransport {
    /// J_i(t) by cubic Hermite interpolation of the stored trajectory.
    pub fn jacobi_at(&self, t: f64) -> Vec<f64> {
        let i = match self.t.partition_point(|&s| s <= t) {
            0 => 1,
            i if i >= self.t.len() => self.t.len() - 1,
            i => i,
        };
        let (t0, t1) = (self.t[i - 1], self.t[i]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (h00, h10, h01, h11) =
            (2.0 * s.powi(3) - 3.0 * s * s + 1.0, s.powi(3) - 2.0 * s * s + s, -2.0 * s.powi(3) + 3.0 * s * s, s.powi(3) - s * s);
        (0..self.j[0].len())
            .map(|k| h00 * self.j[i - 1][k] + h10 * h * self.jd[i - 1][k] + h01 * self.j[i][k] + h11 * h * self.jd[i][k])
            .collect()
    }

    pub fn f_at(&self, t: f64) -> f64 {
        self.jacobi_at(t).iter().product()
    }
}

struct JacobiSystem<'a> {
    dom: &'a dyn Domain,
    p: &'a BoundarySample,
    m: usize,
}

impl System<f64, ode_solvers::DVector<f64>> for JacobiSystem<'_> {
    fn system(&self, t: f64, y: &ode_solvers::DVector<f64>, dy: &mut ode_solvers::DVector<f64>) {
        let kk = self.dom.normal_curvatures(self.p, t);
        for i in 0..self.m {
            dy[i] = y[self.m + i];
            dy[self.m + i] = -kk[i] * y[i];
        }
    }

    fn solout(&mut self, _t: f64, y: &ode_solvers::DVector<f64>, _dy: &ode_solvers::DVector<f64>) -> bool {
        (0..self.m).any(|i| y[i] <= 0.0)
    }
}

/// Integrates J'' + K(t) J = 0, J(0) = 1, J'(0) = −κ_i along the inward normal geodesic.
pub fn exp_normal(dom: &dyn Domain, p: &BoundarySample, t_max: f64) -> Result<JacobianTransport> {
    let m = p.principal_curvatures.len();
    let mut y0 = ode_solvers::DVector::zeros(2 * m);
    for i in 0..m {
        y0[i] = 1.0;
        y0[m + i] = -p.principal_curvatures[i];
    }
    let sys = JacobiSystem { dom, p, m };
    let dt = t_max / 400.0;
    let mut solver = Dopri5::new(sys, 0.0, t_max, dt, y0, 1e-11, 1e-13);
    solver.integrate().map_err(|e| Error::Integration(format!("{e:?}")))?;
    let mut out = JacobianTransport { t: vec![], f: vec![], ht: vec![], j: vec![], jd: vec![], focal: None };
    for (t, y) in solver.x_out().iter().zip(solver.y_out()) {
        let j: Vec<f64> = (0..m).map(|i| y[i]).collect();
        let jd: Vec<f64> = (0..m).map(|i| y[m + i]).collect();
        out.t.push(*t);
        out.f.push(j.iter().product());
        out.ht.push(-(0..m).map(|i| jd[i] / j[i]).sum::<f64>());
        out.j.push(j);
        out.jd.push(jd);
    }
    let last = out.j.len() - 1;
    if out.j[last].iter().any(|&v| v <= 0.0) && last > 0 {
        let (a, b) = (out.t[last - 1], out.t[last]);
        let g = |t: f64| out.jacobi_at(t).into_iter().fold(f64::INFINITY, f64::min);
        out.focal = brent_root(g, a, b, 1e-14).or(Some(b));
    }
    Ok(out)
}

/// Focal(p): first zero of the normal Jacobian, or ∞ before the horizon.
pub fn focal_distance(dom: &dyn Domain, p: &BoundarySample) -> Result<Ext> {
    let tr = exp_normal(dom, p, dom.horizon(p))?;
    Ok(tr.focal.map_or(Ext::Infinite, Ext::Finite))
}

/// Fills cut and focal distances on every sample, in parallel.
pub fn fill_cut_and_focal(dom: &dyn Domain, samples: &mut [BoundarySample]) -> Result<()> {
    let vals: Vec<Result<(Ext, Ext)>> =
        samples.par_iter().map(|p| Ok((cut_distance(dom, p)?, focal_distance(dom, p)?))).collect();
    for (s, v) in samples.iter_mut().zip(vals) {
        let (c, f) = v?;
        s.cut = Some(c);
        s.focal = Some(f);
    }
    Ok(())
}

/// d(x, ∂Ω) at each grid node.
pub fn distance_to_boundary_field(dom: &dyn Domain, grid: &[Point]) -> Vec<f64> {
    grid.par_iter().map(|x| dom.distance_to_boundary(x)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrinsicRadius {
    pub rad: f64,
    pub avrad: f64,
    pub center: Vec<f64>,
    pub avrad_center: Vec<f64>,
    pub converged: bool,
}

/// Seeds: the centroid and eight perturbations of it.
fn seeds(centroid: &Point, step: f64) -> Vec<Vec<f64>> {
    let n = centroid.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    if n == 2 {
        for i in 0..8 {
            let a = i as f64 * std::f64::consts::FRAC_PI_4;
            dirs.push(vec![a.cos(), a.sin()]);
        }
    } else {
        for i in 0..n.min(3) {
            for s in [1.0, -1.0] {
                let mut d = vec![0.0; n];
                d[i] = s;
                dirs.push(d);
            }
        }
        let c = 1.0 / (n as f64).sqrt();
        dirs.push(vec![c; n]);
        dirs.push(vec![-c; n]);
        dirs.truncate(8);
    }
    let mut out = vec![centroid.as_slice().to_vec()];
    for d in dirs {
        out.push(centroid.iter().zip(&d).map(|(c, d)| c + step * d).collect());
    }
    out
}

/// rad_M(Ω) by minimax over centres and avrad by minimizing the boundary mean distance.
pub fn extrinsic_radius(
    ambient: &dyn Ambient,
    samples: &[BoundarySample],
    corners: &[Point],
    scale: f64,
) -> ExtrinsicRadius {
    let pts: Vec<Point> = samples.iter().map(|s| s.point()).collect();
    let total: f64 = samples.iter().map(|s| s.weight).sum();
    let mut centroid = DVector::zeros(ambient.dim());
    for (p, s) in pts.iter().zip(samples) {
        centroid += p * (s.weight / total);
    }
    let worst = |c: &[f64]| {
        let c = DVector::from_column_slice(c);
        pts.iter().chain(corners).map(|p| ambient.distance(&c, p)).fold(0.0, f64::max)
    };
    let mean = |c: &[f64]| {
        let c = DVector::from_column_slice(c);
        pts.iter().zip(samples).map(|(p, s)| s.weight * ambient.distance(&c, p)).sum::<f64>() / total
    };
    let run = |f: &(dyn Fn(&[f64]) -> f64 + Sync)| {
        seeds(&centroid, 0.1 * scale)
            .par_iter()
            .map(|s| nelder_mead(f, s, 0.05 * scale, 1e-13 * scale, 4000))
            .reduce_with(|a, b| if b.value < a.value { b } else { a })
            .expect("seeds are nonempty")
    };
    let r = run(&worst);
    let a = run(&mean);
    ExtrinsicRadius { rad: r.value, avrad: a.value, center: r.x, avrad_center: a.x, converged: r.converged && a.converged }
}
