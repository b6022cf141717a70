//! Domains in the model space M_k^n bounded by star-shaped hypersurfaces.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::chart::{christoffel, curvature_at, ChartMetric};
use super::dijkstra::{grid_distances, Grid};
use super::domain::{CurvatureBounds, Domain};
use super::optimize::{brent_min, brent_root, nelder_mead};
use super::shapes::{direction, Component, Shape};
use super::spaceform::SpaceForm;
use super::{Ambient, BoundarySample, Point, Resolution};
use crate::error::{Error, Result};
use crate::quadrature::{breaks_with, GlRule};

#[derive(Debug, Clone)]
struct CloudPoint {
    comp: usize,
    u: Vec<f64>,
    w: Point,
}

#[derive(Debug, Clone)]
pub struct SpaceFormDomain {
    pub space: SpaceForm,
    pub shape: Shape,
    components: Vec<Component>,
    round: Option<Vec<f64>>,
    cloud: Vec<CloudPoint>,
    cloud_step: f64,
}

impl SpaceFormDomain {
    pub fn new(k: f64, n: usize, shape: Shape) -> Result<Self> {
        shape.validate(n)?;
        let space = SpaceForm::new(k, n)?;
        if k > 0.0 && shape.max_radius() >= space.ctx.conjugate_radius() {
            return Err(Error::Domain(format!(
                "shape reaches radius {} beyond π/√k = {}",
                shape.max_radius(),
                space.ctx.conjugate_radius()
            )));
        }
        let components = shape.components();
        let round = shape.round_radii();
        let (cloud, cloud_step) = if round.is_some() {
            (Vec::new(), 0.0)
        } else {
            Self::build_cloud(&components, n)
        };
        Ok(SpaceFormDomain { space, shape, components, round, cloud, cloud_step })
    }

    fn build_cloud(components: &[Component], n: usize) -> (Vec<CloudPoint>, f64) {
        let mut cloud = Vec::new();
        let (m_theta, m_phi) = if n == 2 { (1, 720) } else { (24, 48) };
        let step = 2.0 * PI / m_phi as f64;
        for (ci, c) in components.iter().enumerate() {
            for i in 0..m_theta {
                for j in 0..m_phi {
                    let phi = j as f64 * step;
                    let u = if n == 2 { vec![phi] } else { vec![(i as f64 + 0.5) * PI / m_theta as f64, phi] };
                    let d = direction(&u).d;
                    let w = &d * c.radial.along(&d);
                    cloud.push(CloudPoint { comp: ci, u, w });
                }
            }
        }
        (cloud, step)
    }

    pub fn k(&self) -> f64 {
        self.space.k()
    }

    pub fn n(&self) -> usize {
        self.space.ctx.n
    }

    fn boundary_point(&self, comp: usize, u: &[f64]) -> Point {
        let d = direction(u).d;
        let r = self.components[comp].radial.along(&d);
        d * r
    }

    /// Parameter nodes and weights over the unit sphere (dσ not included).
    fn param_nodes(&self, res: &Resolution) -> Vec<(Vec<f64>, f64)> {
        let rule = GlRule::new(res.order);
        if self.n() == 2 {
            rule.composite(&breaks_with(0.0, 2.0 * PI, res.boundary_panels, &self.shape.angular_breaks()))
                .into_iter()
                .map(|(u, w)| (vec![u], w))
                .collect()
        } else {
            let th = rule.panels(0.0, PI, (res.boundary_panels / 2).max(1));
            let ph = rule.panels(0.0, 2.0 * PI, res.boundary_panels);
            let mut out = Vec::with_capacity(th.len() * ph.len());
            for &(t, wt) in &th {
                for &(p, wp) in &ph {
                    out.push((vec![t, p], wt * wp));
                }
            }
            out
        }
    }

    /// Unit directions with the weights of dσ on S^{n-1}.
    fn direction_nodes(&self, res: &Resolution) -> Vec<(DVector<f64>, f64)> {
        self.param_nodes(res)
            .into_iter()
            .map(|(u, w)| {
                let d = direction(&u).d;
                let w = if u.len() == 2 { w * u[0].sin() } else { w };
                (d, w)
            })
            .collect()
    }

    fn sample_at(&self, comp: usize, u: &[f64], wq: f64) -> Result<BoundarySample> {
        let n = self.n();
        let c = &self.components[comp];
        let dir = direction(u);
        let jet = c.radial.jet(u, &dir);
        let m = n - 1;
        let w = &dir.d * jet.value;
        let wa: Vec<DVector<f64>> = (0..m).map(|a| &dir.d * jet.grad[a] + &dir.da[a] * jet.value).collect();
        let wab = |a: usize, b: usize| {
            &dir.d * jet.hess[(a, b)] + &dir.da[b] * jet.grad[a] + &dir.da[a] * jet.grad[b] + &dir.dab[a][b] * jet.value
        };
        let g = self.space.metric(w.as_slice());
        let gam = christoffel(&self.space, w.as_slice());
        // Euclidean conormal to the tangent plane
        let mut cov = if n == 2 {
            DVector::from_vec(vec![wa[0][1], -wa[0][0]])
        } else {
            wa[0].cross(&wa[1])
        };
        if cov.dot(&w) < 0.0 {
            cov = -cov;
        }
        cov *= c.orient;
        let ginv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DegenerateMetric(format!("metric singular at {:?}", w.as_slice())))?;
        let nu_raw = &ginv * &cov;
        let len = (nu_raw.transpose() * &g * &nu_raw)[(0, 0)].sqrt();
        let nu = nu_raw / len;
        let ip = |x: &DVector<f64>, y: &DVector<f64>| (x.transpose() * &g * y)[(0, 0)];
        let mut first = DMatrix::zeros(m, m);
        let mut second = DMatrix::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                first[(a, b)] = ip(&wa[a], &wa[b]);
                let mut cov_d = wab(a, b);
                for (i, gi) in gam.iter().enumerate() {
                    cov_d[i] += (wa[a].transpose() * gi * &wa[b])[(0, 0)];
                }
                second[(a, b)] = -ip(&nu, &cov_d);
            }
        }
        let det = first.determinant();
        if !(det > 1e-300) {
            return Err(Error::DegenerateMetric(format!("induced metric singular at u = {u:?}")));
        }
        let chol = first.clone().cholesky().ok_or_else(|| Error::DegenerateMetric("induced metric".into()))?;
        let linv = chol.l().try_inverse().ok_or_else(|| Error::DegenerateMetric("induced metric".into()))?;
        let shape_op = &linv * second * linv.transpose();
        let sym = (&shape_op + shape_op.transpose()) * 0.5;
        let kappa: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
        Ok(BoundarySample::new(w, -nu, kappa, det.sqrt() * wq))
    }

    fn foot_distance(&self, x: &Point) -> f64 {
        let mut best: Vec<(f64, usize)> = self
            .cloud
            .iter()
            .enumerate()
            .map(|(i, c)| (self.space.distance(x, &c.w), i))
            .collect();
        let take = 3.min(best.len());
        best.select_nth_unstable_by(take - 1, |a, b| a.0.total_cmp(&b.0));
        best.truncate(take);
        let n = self.n();
        best.iter()
            .map(|&(d0, i)| {
                let c = &self.cloud[i];
                let refined = if n == 2 {
                    let f = |u: f64| self.space.distance(x, &self.boundary_point(c.comp, &[u]));
                    brent_min(f, c.u[0] - self.cloud_step, c.u[0] + self.cloud_step, 1e-12).1
                } else {
                    let f = |u: &[f64]| self.space.distance(x, &self.boundary_point(c.comp, u));
                    nelder_mead(f, &c.u, 0.5 * self.cloud_step, 1e-15, 600).value
                };
                refined.min(d0)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// d along the ray t·dir for t in [a, b]: radii where it crosses the given levels.
    fn level_breaks(&self, dir: &DVector<f64>, a: f64, b: f64, levels: &[f64]) -> Vec<f64> {
        let probes = 32;
        let ts: Vec<f64> = (0..=probes).map(|i| a + (b - a) * i as f64 / probes as f64).collect();
        let ds: Vec<f64> = ts.iter().map(|&t| self.distance_to_boundary(&(dir * t))).collect();
        let mut out = self.shape.radial_kinks().into_iter().filter(|&r| r > a && r < b).collect::<Vec<_>>();
        if self.round.is_none() {
            let imax = (0..ds.len()).max_by(|&i, &j| ds[i].total_cmp(&ds[j])).unwrap_or(0);
            if imax > 0 && imax < probes {
                out.push(ts[imax]);
            }
        }
        for &lv in levels {
            for i in 0..probes {
                let (f0, f1) = (ds[i] - lv, ds[i + 1] - lv);
                if f0 == 0.0 {
                    out.push(ts[i]);
                } else if f0 * f1 < 0.0 {
                    let g = |t: f64| self.distance_to_boundary(&(dir * t)) - lv;
                    if let Some(r) = brent_root(g, ts[i], ts[i + 1], 1e-14) {
                        out.push(r);
                    }
                }
            }
        }
        out
    }

    fn interior_nodes(&self, res: &Resolution) -> Vec<Point> {
        let dirs = self.direction_nodes(&Resolution { boundary_panels: 4, order: 4, ..*res });
        let mut pts = vec![DVector::zeros(self.n())];
        for (d, _) in dirs {
            for (a, b) in self.shape.radial_intervals(&d) {
                for f in [0.1, 0.3, 0.5, 0.7, 0.9] {
                    pts.push(&d * (a + f * (b - a)));
                }
            }
        }
        pts.retain(|p| self.contains(p));
        pts
    }

    /// Whether x lies in Ω.
    pub fn contains(&self, x: &Point) -> bool {
        let r = x.norm();
        if r == 0.0 {
            return self.shape.radial_intervals(&DVector::from_fn(self.n(), |i, _| if i == 0 { 1.0 } else { 0.0 }))[0].0 == 0.0;
        }
        let d = x / r;
        self.shape.radial_intervals(&d).iter().any(|&(a, b)| r >= a && r <= b)
    }
}

impl Domain for SpaceFormDomain {
    fn dim(&self) -> usize {
        self.n()
    }

    fn scale(&self) -> f64 {
        self.shape.max_radius()
    }

    fn boundary_samples(&self, res: &Resolution) -> Result<Vec<BoundarySample>> {
        let nodes = self.param_nodes(res);
        let jobs: Vec<(usize, &(Vec<f64>, f64))> =
            (0..self.components.len()).flat_map(|c| nodes.iter().map(move |nd| (c, nd))).collect();
        jobs.par_iter().map(|(c, (u, w))| self.sample_at(*c, u, *w)).collect()
    }

    fn raw_measures(&self, res: &Resolution) -> Result<(f64, f64)> {
        let ctx = &self.space.ctx;
        let volume: f64 = self
            .direction_nodes(res)
            .par_iter()
            .map(|(d, w)| {
                self.shape.radial_intervals(d).iter().map(|&(a, b)| ctx.power_integral(a, b)).sum::<f64>() * w
            })
            .sum();
        let area = self.boundary_samples(res)?.iter().map(|s| s.weight).sum();
        Ok((volume, area))
    }

    fn distance_to_boundary(&self, x: &Point) -> f64 {
        match &self.round {
            Some(radii) => {
                let r = self.space.distance(&DVector::zeros(self.n()), x);
                radii.iter().map(|rr| (r - rr).abs()).fold(f64::INFINITY, f64::min)
            }
            None => self.foot_distance(x),
        }
    }

    fn normal_point(&self, p: &BoundarySample, t: f64) -> Point {
        self.space.exp(&p.point(), &p.normal(), t)
    }

    fn normal_curvatures(&self, _p: &BoundarySample, _t: f64) -> Vec<f64> {
        vec![self.k(); self.n() - 1]
    }

    fn horizon(&self, p: &BoundarySample) -> f64 {
        let mut h = 2.0 * self.shape.max_radius();
        let kmax = p.max_curvature();
        // flat pieces carry rounding-level curvature
        if kmax * self.shape.max_radius() > 1e-9 {
            if let Ok(l) = self.space.ctx.l_of_lambda(kmax) {
                h = h.max(1.25 * l);
            }
        }
        if self.k() > 0.0 {
            h = h.min(self.space.ctx.conjugate_radius() * (1.0 - 1e-9));
        }
        h
    }

    fn cut_threshold(&self) -> f64 {
        // foot-point distances are accurate to about 1e-13·scale
        1e-9 * self.scale()
    }

    fn curvature_bounds(&self, res: &Resolution) -> CurvatureBounds {
        let pts = self.interior_nodes(res);
        let vals: Vec<(f64, f64, f64)> = pts.par_iter().map(|p| curvature_at(&self.space, p.as_slice())).collect();
        let mut out = CurvatureBounds {
            ric_lower: f64::INFINITY,
            sec_upper: f64::NEG_INFINITY,
            sec_lower: f64::INFINITY,
            samples: pts.len(),
            worst_location: vec![],
        };
        let m = (self.n() - 1) as f64;
        for (p, &(lo, hi, ric)) in pts.iter().zip(&vals) {
            out.sec_lower = out.sec_lower.min(lo);
            out.sec_upper = out.sec_upper.max(hi);
            if ric / m < out.ric_lower {
                out.ric_lower = ric / m;
                out.worst_location = p.as_slice().to_vec();
            }
        }
        out
    }

    fn interior_integral(&self, f: &(dyn Fn(f64) -> f64 + Sync), levels: &[f64], res: &Resolution) -> Result<f64> {
        let rule = GlRule::new(res.order);
        let n = self.n();
        let total = self
            .direction_nodes(res)
            .par_iter()
            .map(|(d, w)| {
                let mut acc = 0.0;
                for (a, b) in self.shape.radial_intervals(d) {
                    let extra = self.level_breaks(d, a, b, levels);
                    for (r, wr) in rule.composite(&breaks_with(a, b, res.radial_panels, &extra)) {
                        let x = d * r;
                        acc += wr * self.space.ctx.s(r).powi(n as i32 - 1) * f(self.distance_to_boundary(&x));
                    }
                }
                acc * w
            })
            .sum();
        Ok(total)
    }

    fn inradius(&self, res: &Resolution) -> Result<(f64, Point)> {
        let mut cand: Vec<(f64, Point)> =
            self.interior_nodes(res).into_par_iter().map(|p| (self.distance_to_boundary(&p), p)).collect();
        cand.sort_by(|a, b| b.0.total_cmp(&a.0));
        cand.truncate(3);
        let best = cand
            .par_iter()
            .map(|(_, p)| {
                let f = |x: &[f64]| {
                    let x = DVector::from_column_slice(x);
                    if self.contains(&x) {
                        -self.distance_to_boundary(&x)
                    } else {
                        f64::INFINITY
                    }
                };
                let m = nelder_mead(f, p.as_slice(), 0.05 * self.scale(), 1e-14 * self.scale(), 3000);
                (-m.value, DVector::from_vec(m.x))
            })
            .reduce_with(|a, b| if b.0 > a.0 { b } else { a })
            .ok_or_else(|| Error::Domain("domain has no interior nodes".into()))?;
        Ok(best)
    }

    fn ambient(&self) -> Option<&dyn Ambient> {
        Some(&self.space)
    }

    fn as_space_form(&self) -> Option<&SpaceFormDomain> {
        Some(self)
    }

    fn corners(&self) -> Vec<Point> {
        self.shape.corners()
    }

    fn support_points(&self) -> Vec<Point> {
        self.shape.extreme_points()
    }

    fn oracle_check(&self, _res: &Resolution) -> Option<f64> {
        if self.n() != 2 {
            return None;
        }
        let r = 1.05 * self.shape.max_radius();
        let grid = Grid { x0: -r, x1: r, y0: -r, y1: r, nx: 81, ny: 81, periodic_y: false };
        let h = grid.spacing();
        let nodes = grid.nodes();
        let exact: Vec<f64> = nodes.par_iter().map(|p| self.distance_to_boundary(&DVector::from_column_slice(p))).collect();
        let seeds: Vec<(usize, f64)> = exact.iter().enumerate().filter(|(_, &d)| d <= 1.5 * h).map(|(i, &d)| (i, d)).collect();
        let mesh = grid_distances(&grid, &self.space, &seeds);
        let worst = nodes
            .iter()
            .zip(exact.iter().zip(&mesh))
            .filter(|(p, _)| self.contains(&DVector::from_column_slice(p.as_slice())))
            .map(|(_, (e, m))| e - m)
            .fold(f64::NEG_INFINITY, f64::max);
        Some(worst)
    }
}
