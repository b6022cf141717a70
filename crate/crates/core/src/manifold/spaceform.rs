//! The model space M_k^n in geodesic normal coordinates about a base point o.
//!
//! Points are vectors w ∈ R^n with d(o, w) = |w|. Distances use the haversine form of
//! the law of cosines, which stays well conditioned for nearby points at any radius;
//! the exponential map goes through the sphere/hyperboloid embedding.

use nalgebra::{DMatrix, DVector};

use super::chart::ChartMetric;
use super::{Ambient, Point};
use crate::error::{Error, Result};
use crate::kernels::CurvatureContext;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceForm {
    pub ctx: CurvatureContext,
}

/// T(x) = (S(x) − 1)/x and T'(x), where S(x) = sin²√x / x continued analytically to x ≤ 0.
fn t_series(x: f64) -> (f64, f64) {
    if x.abs() < 1.0 {
        // S(x) = Σ_{j≥1} (−1)^{j+1} 2^{2j−1} x^{j−1} / (2j)!
        let mut t = 0.0;
        let mut dt = 0.0;
        let mut coef = 8.0 / 24.0; // j = 2 term magnitude: 2^3/4!
        let mut sign = -1.0;
        for j in 2..30usize {
            let p = (j - 2) as i32;
            t += sign * coef * x.powi(p);
            if j >= 3 {
                dt += sign * coef * (j - 2) as f64 * x.powi(p - 1);
            }
            let jj = j as f64 + 1.0;
            coef *= 4.0 / ((2.0 * jj - 1.0) * (2.0 * jj));
            sign = -sign;
        }
        (t, dt)
    } else {
        let (s, ds) = if x > 0.0 {
            let z = x.sqrt();
            let s = z.sin().powi(2) / x;
            (s, (z * (2.0 * z).sin() - 2.0 * z.sin().powi(2)) / (2.0 * x * x))
        } else {
            let z = (-x).sqrt();
            let s = z.sinh().powi(2) / -x;
            (s, -(z * (2.0 * z).sinh() - 2.0 * z.sinh().powi(2)) / (2.0 * x * x))
        };
        ((s - 1.0) / x, (ds * x - (s - 1.0)) / (x * x))
    }
}

impl SpaceForm {
    pub fn new(k: f64, n: usize) -> Result<Self> {
        Ok(SpaceForm { ctx: CurvatureContext::new(k, n)? })
    }

    pub fn k(&self) -> f64 {
        self.ctx.k
    }

    /// 1/√|k|.
    fn big_r(&self) -> f64 {
        1.0 / self.ctx.k.abs().sqrt()
    }

    /// (s_k(r)/r)².
    pub fn sigma(&self, r: f64) -> f64 {
        if r == 0.0 {
            1.0
        } else {
            (self.ctx.s(r) / r).powi(2)
        }
    }

    /// Φ(q) and dΦ/dq for g = δ + Φ(q)(q δ − x xᵀ), q = |x|².
    fn phi(&self, q: f64) -> (f64, f64) {
        let k = self.ctx.k;
        let (t, dt) = t_series(k * q);
        (k * t, k * k * dt)
    }

    /// Inverse of s_k on [0, s_k(π/(2√k))].
    fn s_inv(&self, y: f64) -> f64 {
        let k = self.ctx.k;
        if k == 0.0 {
            y
        } else if k > 0.0 {
            let q = k.sqrt();
            (q * y).min(1.0).asin() / q
        } else {
            let q = (-k).sqrt();
            (q * y).asinh() / q
        }
    }

    /// Brings a point of the sphere back into the closed normal ball of radius π/√k.
    fn normalize(&self, x: &Point) -> Point {
        if self.ctx.k > 0.0 && x.norm() > self.ctx.conjugate_radius() {
            self.unembed(&self.embed(x))
        } else {
            x.clone()
        }
    }

    pub fn embed(&self, w: &Point) -> DVector<f64> {
        let n = self.ctx.n;
        if self.ctx.k == 0.0 {
            return w.clone();
        }
        let r = w.norm();
        let mut x = DVector::zeros(n + 1);
        x[0] = self.big_r() * self.ctx.c(r);
        if r > 0.0 {
            let f = self.ctx.s(r) / r;
            for i in 0..n {
                x[i + 1] = f * w[i];
            }
        }
        x
    }

    pub fn unembed(&self, x: &DVector<f64>) -> Point {
        let n = self.ctx.n;
        if self.ctx.k == 0.0 {
            return x.clone();
        }
        let sp = x.rows(1, n).into_owned();
        let rho = sp.norm();
        let big_r = self.big_r();
        if rho == 0.0 {
            let mut w = DVector::zeros(n);
            if self.ctx.k > 0.0 && x[0] < 0.0 {
                w[0] = std::f64::consts::PI * big_r;
            }
            return w;
        }
        let r = if self.ctx.k > 0.0 { big_r * rho.atan2(x[0]) } else { big_r * (rho / big_r).asinh() };
        sp * (r / rho)
    }

    /// Differential of the embedding at w applied to v.
    pub fn push_forward(&self, w: &Point, v: &Point) -> DVector<f64> {
        let n = self.ctx.n;
        if self.ctx.k == 0.0 {
            return v.clone();
        }
        let mut out = DVector::zeros(n + 1);
        let r = w.norm();
        if r == 0.0 {
            out.rows_mut(1, n).copy_from(v);
            return out;
        }
        let u = w / r;
        let a = u.dot(v);
        let (s, c) = (self.ctx.s(r), self.ctx.c(r));
        out[0] = -self.ctx.k * self.big_r() * s * a;
        let sp = &u * (c * a) + (v - &u * a) * (s / r);
        out.rows_mut(1, n).copy_from(&sp);
        out
    }

    /// Inverse of `push_forward` on the tangent space at w.
    pub fn pull_back(&self, w: &Point, big_v: &DVector<f64>) -> Point {
        let n = self.ctx.n;
        if self.ctx.k == 0.0 {
            return big_v.clone();
        }
        let sp = big_v.rows(1, n).into_owned();
        let r = w.norm();
        if r == 0.0 {
            return sp;
        }
        let u = w / r;
        let (s, c) = (self.ctx.s(r), self.ctx.c(r));
        let a = u.dot(&sp);
        let rv = c * a - s / self.big_r() * big_v[0];
        &u * rv + (sp - &u * a) * (r / s)
    }

    fn eta(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        let d = a.dot(b);
        if self.ctx.k < 0.0 {
            d - 2.0 * a[0] * b[0]
        } else {
            d
        }
    }

    /// Points along the geodesic from x with initial unit direction v at the given times.
    pub fn geodesic_points(&self, x: &Point, v: &Point, times: &[f64]) -> Vec<Point> {
        times.iter().map(|&t| self.exp(x, v, t)).collect()
    }
}

impl ChartMetric for SpaceForm {
    fn dim(&self) -> usize {
        self.ctx.n
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.ctx.n;
        let q: f64 = x.iter().map(|v| v * v).sum();
        let (phi, _) = self.phi(q);
        let mut g = DMatrix::identity(n, n) * (1.0 + phi * q);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] -= phi * x[i] * x[j];
            }
        }
        g
    }

    fn metric_derivatives(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let n = self.ctx.n;
        let q: f64 = x.iter().map(|v| v * v).sum();
        let (phi, dphi) = self.phi(q);
        (0..n)
            .map(|k| {
                let mut d = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        let mut v = -2.0 * x[k] * dphi * x[i] * x[j];
                        if i == j {
                            v += 2.0 * x[k] * (dphi * q + phi);
                        }
                        if i == k {
                            v -= phi * x[j];
                        }
                        if j == k {
                            v -= phi * x[i];
                        }
                        d[(i, j)] = v;
                    }
                }
                d
            })
            .collect()
    }

    fn contains(&self, x: &[f64]) -> bool {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        r < self.ctx.conjugate_radius()
    }
}

impl Ambient for SpaceForm {
    fn dim(&self) -> usize {
        self.ctx.n
    }

    fn curvature(&self) -> f64 {
        self.ctx.k
    }

    fn distance(&self, x: &Point, y: &Point) -> f64 {
        let (x, y) = (self.normalize(x), self.normalize(y));
        let (r1, r2) = (x.norm(), y.norm());
        if r1 == 0.0 {
            return r2;
        }
        if r2 == 0.0 {
            return r1;
        }
        let half_chord = (&x / r1 - &y / r2).norm() * 0.5;
        let a = self.ctx.s(0.5 * (r1 - r2));
        let b = self.ctx.s(r1) * self.ctx.s(r2) * half_chord * half_chord;
        2.0 * self.s_inv((a * a + b.max(0.0)).sqrt())
    }

    fn exp(&self, x: &Point, v: &Point, t: f64) -> Point {
        let len = self.norm(x, v);
        if self.ctx.k == 0.0 {
            return x + v * (t / len);
        }
        let big_x = self.embed(x);
        let big_v = self.push_forward(x, v) / len;
        let y = big_x * self.ctx.c(t) + big_v * self.ctx.s(t);
        self.unembed(&y)
    }

    fn log(&self, x: &Point, y: &Point) -> Result<(Point, f64)> {
        let d = self.distance(x, y);
        if d == 0.0 {
            return Err(Error::Geodesic("log of a point at itself".into()));
        }
        if self.ctx.k > 0.0 && d > self.ctx.conjugate_radius() * (1.0 - 1e-9) {
            return Err(Error::Geodesic("antipodal points have no unique geodesic".into()));
        }
        let v = if self.ctx.k == 0.0 {
            (y - x) / d
        } else {
            let bx = self.embed(x);
            let by = self.embed(y);
            let big_v = (by - &bx * self.ctx.c(d)) / self.ctx.s(d);
            let v = self.pull_back(x, &big_v);
            let len = self.norm(x, &v);
            v / len
        };
        Ok((v, d))
    }

    fn norm(&self, x: &Point, v: &Point) -> f64 {
        let r = x.norm();
        if r == 0.0 {
            return v.norm();
        }
        let a = x.dot(v) / r;
        (a * a + self.sigma(r) * (v.norm_squared() - a * a).max(0.0)).sqrt()
    }

    fn frame(&self, x: &Point) -> Vec<Point> {
        let n = self.ctx.n;
        let r = x.norm();
        if r == 0.0 {
            return (0..n).map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 })).collect();
        }
        let u = x / r;
        let mut basis = vec![u.clone()];
        for i in 0..n {
            let mut e = DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 });
            for b in &basis {
                e -= b * b.dot(&e);
            }
            if e.norm() > 1e-8 && basis.len() < n {
                e /= e.norm();
                basis.push(e);
            }
        }
        let f = 1.0 / self.sigma(r).sqrt();
        basis.iter().enumerate().map(|(i, b)| if i == 0 { b.clone() } else { b * f }).collect()
    }

    fn injectivity_radius(&self) -> f64 {
        self.ctx.conjugate_radius()
    }

    fn total_volume(&self) -> Option<f64> {
        (self.ctx.k > 0.0).then(|| self.ctx.ball_volume(self.ctx.conjugate_radius()))
    }

    fn chart(&self) -> &dyn ChartMetric {
        self
    }
}

impl SpaceForm {
    /// η-inner product of embedded points; exposed for the tests.
    pub fn embedded_inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.eta(a, b)
    }
}
