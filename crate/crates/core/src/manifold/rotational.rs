//! Rotationally symmetric domains: warped products dt² + f(t)² g_{S^{n-1}} over an
//! interval, and the surface of revolution of the graph of e^{x-L}.
//!
//! Points are stored as (x, angles...). Everything reduces to one-dimensional
//! computations along the meridian.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::chart::ChartMetric;
use super::dijkstra::{grid_distances, Grid};
use super::domain::{CurvatureBounds, Domain};
use super::optimize::brent_root;
use super::{BoundarySample, Point, Resolution};
use crate::error::{Error, Result};
use crate::kernels::{unit_sphere_area, CurvatureContext};
use crate::quadrature::{integrate, GlRule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// f = s_k
    SpaceForm { k: f64 },
    /// f = offset + slope·t
    Linear { offset: f64, slope: f64 },
    /// f = e^{rate·t}
    Exponential { rate: f64 },
    /// Natural cubic spline through the samples.
    Samples { t: Vec<f64>, f: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
struct Spline {
    t: Vec<f64>,
    f: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    fn new(t: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        let n = t.len();
        if n < 3 || f.len() != n || t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation("profile samples need ≥ 3 strictly increasing abscissae".into()));
        }
        // second derivatives with natural end conditions (Thomas algorithm)
        let mut a = vec![0.0; n];
        let mut b = vec![1.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let (h0, h1) = (t[i] - t[i - 1], t[i + 1] - t[i]);
            a[i] = h0;
            b[i] = 2.0 * (h0 + h1);
            c[i] = h1;
            d[i] = 6.0 * ((f[i + 1] - f[i]) / h1 - (f[i] - f[i - 1]) / h0);
        }
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = d[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
        }
        Ok(Spline { t, f, m })
    }

    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.t.len();
        let i = self.t.partition_point(|&s| s <= x).clamp(1, n - 1);
        let (t0, t1) = (self.t[i - 1], self.t[i]);
        let h = t1 - t0;
        let (a, b) = ((t1 - x) / h, (x - t0) / h);
        let (m0, m1) = (self.m[i - 1], self.m[i]);
        let (f0, f1) = (self.f[i - 1], self.f[i]);
        let v = a * f0 + b * f1 + ((a.powi(3) - a) * m0 + (b.powi(3) - b) * m1) * h * h / 6.0;
        let d1 = (f1 - f0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let d2 = a * m0 + b * m1;
        (v, d1, d2)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    SpaceForm(CurvatureContext),
    Linear(f64, f64),
    Exponential(f64),
    Spline(Spline),
    /// Graph of e^{x-L} rotated about the x-axis.
    Revolution(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationalDomain {
    n: usize,
    kind: Kind,
    a: f64,
    b: f64,
    length: f64,
    has_inner: bool,
}

struct Meridian {
    r: f64,
    dr: f64,
    ddr: f64,
    e: f64,
    de: f64,
}

impl RotationalDomain {
    pub fn warped(n: usize, profile: Profile, range: [f64; 2]) -> Result<Self> {
        let kind = match profile {
            Profile::SpaceForm { k } => Kind::SpaceForm(CurvatureContext::new(k, n)?),
            Profile::Linear { offset, slope } => Kind::Linear(offset, slope),
            Profile::Exponential { rate } => Kind::Exponential(rate),
            Profile::Samples { t, f } => {
                if range[0] < t[0] || range[1] > *t.last().unwrap_or(&f64::NAN) {
                    return Err(Error::Validation("t_range must lie inside the sampled profile".into()));
                }
                Kind::Spline(Spline::new(t, f)?)
            }
        };
        Self::build(n, kind, range)
    }

    pub fn revolution(length: f64) -> Result<Self> {
        if length <= 0.0 {
            return Err(Error::Validation(format!("length must be positive, got {length}")));
        }
        Self::build(2, Kind::Revolution(length), [0.0, length])
    }

    fn build(n: usize, kind: Kind, range: [f64; 2]) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation("dimension must be at least 2".into()));
        }
        let [a, b] = range;
        if !(b > a) {
            return Err(Error::Validation(format!("empty range [{a}, {b}]")));
        }
        let mut d = RotationalDomain { n, kind, a, b, length: 0.0, has_inner: true };
        let ra = d.mer(a).r;
        if ra < -1e-12 || (0..=64).any(|i| d.mer(a + (b - a) * (i as f64 + 0.5) / 65.0).r <= 0.0) {
            return Err(Error::Validation("profile must be positive inside the range".into()));
        }
        d.has_inner = ra > 1e-12;
        d.length = d.arclength(b);
        Ok(d)
    }

    fn mer(&self, x: f64) -> Meridian {
        let flat = |r: f64, dr: f64, ddr: f64| Meridian { r, dr, ddr, e: 1.0, de: 0.0 };
        match &self.kind {
            Kind::SpaceForm(ctx) => {
                let (s, c) = (ctx.s(x), ctx.c(x));
                flat(s, c, -ctx.k * s)
            }
            Kind::Linear(o, sl) => flat(o + sl * x, *sl, 0.0),
            Kind::Exponential(q) => {
                let v = (q * x).exp();
                flat(v, q * v, q * q * v)
            }
            Kind::Spline(sp) => {
                let (v, d1, d2) = sp.eval(x);
                flat(v, d1, d2)
            }
            Kind::Revolution(l) => {
                let r = (x - l).exp();
                let e = (1.0 + r * r).sqrt();
                Meridian { r, dr: r, ddr: r, e, de: r * r / e }
            }
        }
    }

    /// df/ds and d²f/ds² with s the meridian arclength.
    fn arclength_derivatives(&self, x: f64) -> (f64, f64, f64) {
        let m = self.mer(x);
        let fs = m.dr / m.e;
        let fss = (m.ddr * m.e - m.dr * m.de) / m.e.powi(3);
        (m.r, fs, fss)
    }

    /// Sectional curvature of radial planes and of planes tangent to the fibre.
    pub fn curvatures(&self, x: f64) -> (f64, f64) {
        let (f, fs, fss) = self.arclength_derivatives(x);
        (-fss / f, (1.0 - fs * fs) / (f * f))
    }

    fn arclength(&self, x: f64) -> f64 {
        match self.kind {
            Kind::Revolution(_) => integrate(|u| self.mer(u).e, self.a, x, 1e-13, 1e-15).map(|v| v.0).unwrap_or(f64::NAN),
            _ => x - self.a,
        }
    }

    fn x_of_s(&self, s: f64) -> f64 {
        match self.kind {
            Kind::Revolution(_) => {
                if s <= 0.0 {
                    return self.a;
                }
                if s >= self.length {
                    return self.b;
                }
                brent_root(|x| self.arclength(x) - s, self.a, self.b, 1e-14).unwrap_or(self.a + s)
            }
            _ => self.a + s.clamp(0.0, self.length),
        }
    }

    /// Meridian length |b − a| measured in the metric.
    pub fn meridian_length(&self) -> f64 {
        self.length
    }

    pub fn has_inner_boundary(&self) -> bool {
        self.has_inner
    }

    fn sphere_samples(&self, res: &Resolution) -> Vec<(Vec<f64>, f64)> {
        let rule = GlRule::new(res.order);
        if self.n == 2 {
            rule.panels(0.0, 2.0 * PI, res.boundary_panels).into_iter().map(|(u, w)| (vec![u], w)).collect()
        } else if self.n == 3 {
            let mut out = Vec::new();
            for (t, wt) in rule.panels(0.0, PI, (res.boundary_panels / 2).max(1)) {
                for &(p, wp) in &rule.panels(0.0, 2.0 * PI, res.boundary_panels) {
                    out.push((vec![t, p], wt * wp * t.sin()));
                }
            }
            out
        } else {
            // the geometry does not depend on the fibre point: one node with the full measure
            vec![(vec![0.0; self.n - 1], unit_sphere_area(self.n - 1))]
        }
    }
}

impl ChartMetric for RotationalDomain {
    fn dim(&self) -> usize {
        2
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let m = self.mer(x[0]);
        DMatrix::from_diagonal(&DVector::from_vec(vec![m.e * m.e, m.r * m.r]))
    }

    fn contains(&self, x: &[f64]) -> bool {
        x[0] >= self.a - 1e-12 && x[0] <= self.b + 1e-12
    }
}

impl Domain for RotationalDomain {
    fn dim(&self) -> usize {
        self.n
    }

    fn scale(&self) -> f64 {
        self.length
    }

    fn boundary_samples(&self, res: &Resolution) -> Result<Vec<BoundarySample>> {
        let mut out = Vec::new();
        let mut ends = vec![(self.b, 1.0)];
        if self.has_inner {
            ends.push((self.a, -1.0));
        }
        for (x, side) in ends {
            let (f, fs, _) = self.arclength_derivatives(x);
            let m = self.mer(x);
            let kappa = side * fs / f;
            for (u, w) in self.sphere_samples(res) {
                let mut p = vec![x];
                p.extend(u);
                let mut nrm = vec![0.0; self.n];
                nrm[0] = -side / m.e;
                out.push(BoundarySample::new(
                    DVector::from_vec(p),
                    DVector::from_vec(nrm),
                    vec![kappa; self.n - 1],
                    w * f.powi(self.n as i32 - 1),
                ));
            }
        }
        Ok(out)
    }

    fn raw_measures(&self, _res: &Resolution) -> Result<(f64, f64)> {
        let om = unit_sphere_area(self.n - 1);
        let p = self.n as i32 - 1;
        let (v, _) = integrate(|x| { let m = self.mer(x); m.e * m.r.powi(p) }, self.a, self.b, 1e-13, 1e-15)?;
        let mut area = self.mer(self.b).r.powi(p);
        if self.has_inner {
            area += self.mer(self.a).r.powi(p);
        }
        Ok((om * v, om * area))
    }

    fn distance_to_boundary(&self, x: &Point) -> f64 {
        let s = self.arclength(x[0].clamp(self.a, self.b));
        if self.has_inner {
            s.min(self.length - s)
        } else {
            self.length - s
        }
    }

    fn normal_point(&self, p: &BoundarySample, t: f64) -> Point {
        let s0 = self.arclength(p.point[0]);
        let inward = if p.inward_normal[0] < 0.0 { -1.0 } else { 1.0 };
        let mut s = s0 + inward * t;
        if !self.has_inner && s < 0.0 {
            // through the pole onto the opposite meridian
            s = -s;
        }
        let mut q = p.point.clone();
        q[0] = self.x_of_s(s);
        DVector::from_vec(q)
    }

    fn normal_curvatures(&self, p: &BoundarySample, t: f64) -> Vec<f64> {
        let x = self.normal_point(p, t)[0];
        vec![self.curvatures(x).0; self.n - 1]
    }

    fn horizon(&self, _p: &BoundarySample) -> f64 {
        if self.has_inner {
            self.length
        } else {
            2.0 * self.length
        }
    }

    fn curvature_bounds(&self, _res: &Resolution) -> CurvatureBounds {
        let mut out = CurvatureBounds {
            ric_lower: f64::INFINITY,
            sec_upper: f64::NEG_INFINITY,
            sec_lower: f64::INFINITY,
            samples: 0,
            worst_location: vec![],
        };
        let m = 200;
        let nn = self.n as f64;
        for i in 0..m {
            let x = self.a + (self.b - self.a) * (i as f64 + 0.5) / m as f64;
            let (kr, kt) = self.curvatures(x);
            let (lo, hi, ric) = if self.n == 2 {
                (kr, kr, kr)
            } else {
                (kr.min(kt), kr.max(kt), kr.min((kr + (nn - 2.0) * kt) / (nn - 1.0)))
            };
            out.sec_lower = out.sec_lower.min(lo);
            out.sec_upper = out.sec_upper.max(hi);
            if ric < out.ric_lower {
                out.ric_lower = ric;
                let mut loc = vec![0.0; self.n];
                loc[0] = x;
                out.worst_location = loc;
            }
            out.samples += 1;
        }
        out
    }

    fn interior_integral(&self, f: &(dyn Fn(f64) -> f64 + Sync), levels: &[f64], _res: &Resolution) -> Result<f64> {
        let om = unit_sphere_area(self.n - 1);
        let p = self.n as i32 - 1;
        let mut breaks = vec![self.a, self.b];
        let mut ss: Vec<f64> = Vec::new();
        for &lv in levels {
            ss.push(self.length - lv);
            if self.has_inner {
                ss.push(lv);
            }
        }
        if self.has_inner {
            ss.push(0.5 * self.length);
        }
        for s in ss {
            if s > 0.0 && s < self.length {
                breaks.push(self.x_of_s(s));
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let g = |x: f64| {
                let m = self.mer(x);
                m.e * m.r.powi(p) * f(self.distance_to_boundary(&DVector::from_vec(vec![x; 1])))
            };
            total += integrate(g, w[0], w[1], 1e-12, 1e-15)?.0;
        }
        Ok(om * total)
    }

    fn inradius(&self, _res: &Resolution) -> Result<(f64, Point)> {
        let mut p = vec![0.0; self.n];
        if self.has_inner {
            p[0] = self.x_of_s(0.5 * self.length);
            Ok((0.5 * self.length, DVector::from_vec(p)))
        } else {
            p[0] = self.a;
            Ok((self.length, DVector::from_vec(p)))
        }
    }

    fn oracle_check(&self, _res: &Resolution) -> Option<f64> {
        if self.n != 2 {
            return None;
        }
        let grid = Grid { x0: self.a, x1: self.b, y0: 0.0, y1: 2.0 * PI, nx: 161, ny: 96, periodic_y: true };
        let mut seeds: Vec<(usize, f64)> = (0..grid.ny).map(|j| (grid.index(grid.nx - 1, j), 0.0)).collect();
        if self.has_inner {
            seeds.extend((0..grid.ny).map(|j| (grid.index(0, j), 0.0)));
        } else {
            return None;
        }
        let mesh = grid_distances(&grid, self, &seeds);
        let worst = grid
            .nodes()
            .iter()
            .zip(&mesh)
            .map(|(p, m)| self.distance_to_boundary(&DVector::from_vec(vec![p[0]])) - m)
            .fold(f64::NEG_INFINITY, f64::max);
        Some(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::domain::{cut_distance, exp_normal, focal_distance, measures};
    use crate::manifold::chart::curvature_at;

    #[test]
    fn exponential_revolution_is_negatively_curved() {
        for l in [3.0, 5.0, 8.0] {
            let d = RotationalDomain::revolution(l).unwrap();
            let b = d.curvature_bounds(&Resolution::default());
            assert!(b.sec_upper < 0.0);
            let x = 0.3 * l;
            let k = -1.0 / (1.0 + (2.0 * (x - l)).exp()).powi(2);
            assert!((d.curvatures(x).0 - k).abs() < 1e-12);
            let fd = curvature_at(&d, &[x, 0.7]).0;
            assert!((fd - k).abs() < 1e-6, "{fd} vs {k}");
            let m = measures(&d, &Resolution::default()).unwrap();
            assert!((m.boundary_area - 2.0 * PI * (1.0 + (-l).exp())).abs() < 1e-12);
            assert!(m.volume < PI * (2f64.sqrt() + 1f64.asinh()));
        }
    }

    #[test]
    fn cut_is_half_the_meridian() {
        let d = RotationalDomain::revolution(5.0).unwrap();
        let s = d.boundary_samples(&Resolution::default()).unwrap();
        let c = cut_distance(&d, &s[0]).unwrap().to_f64();
        assert!((c - 0.5 * d.meridian_length()).abs() < 1e-8, "{c}");
        assert!(focal_distance(&d, &s[0]).unwrap().to_f64() >= c);
        let gap = d.oracle_check(&Resolution::default()).unwrap();
        assert!(gap < 1e-4 * d.scale(), "{gap}");
    }

    #[test]
    fn warped_model_ball_transport() {
        let d = RotationalDomain::warped(3, Profile::SpaceForm { k: 1.0 }, [0.0, 1.0]).unwrap();
        let s = &d.boundary_samples(&Resolution::default()).unwrap()[0];
        assert!((s.principal_curvatures[0] - 1.0 / 1f64.tan()).abs() < 1e-12);
        let tr = exp_normal(&d, s, 1.5).unwrap();
        let ctx = CurvatureContext::new(1.0, 3).unwrap();
        let lam = ctx.lambda_of_l(1.0).unwrap();
        for t in [0.2, 0.5, 0.9] {
            assert!((tr.f_at(t) - ctx.sigma(lam, t).powi(2)).abs() < 1e-8);
        }
        assert!((tr.focal.unwrap() - 1.0).abs() < 1e-8);
        assert!((cut_distance(&d, s).unwrap().to_f64() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn spline_reproduces_cubics() {
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let f: Vec<f64> = t.iter().map(|x| 1.0 + 2.0 * x).collect();
        let sp = Spline::new(t, f).unwrap();
        let (v, d1, d2) = sp.eval(0.55);
        assert!((v - 2.1).abs() < 1e-14 && (d1 - 2.0).abs() < 1e-12 && d2.abs() < 1e-12);
    }
}
