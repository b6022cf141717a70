//! Closed-form quantities of the simply connected space form M_k^n.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature;

/// Below this value of |k| t² the Taylor branches are used.
const TAYLOR_CUTOFF: f64 = 1e-8;

/// A value in (-∞, ∞]; the top element stands for an infinite cut or focal distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ext {
    Finite(f64),
    Infinite,
}

impl Ext {
    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    /// `f64::INFINITY` for the top element.
    pub fn to_f64(self) -> f64 {
        match self {
            Ext::Finite(x) => x,
            Ext::Infinite => f64::INFINITY,
        }
    }

    pub fn min(self, other: Ext) -> Ext {
        match (self, other) {
            (Ext::Infinite, o) => o,
            (s, Ext::Infinite) => s,
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a.min(b)),
        }
    }
}

impl Serialize for Ext {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ext::Finite(x) => s.serialize_f64(*x),
            Ext::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Ext::Finite(x)),
            Raw::Str(s) if s == "inf" => Ok(Ext::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

/// Area of the unit sphere S^m ⊂ R^{m+1}.
pub fn unit_sphere_area(m: usize) -> f64 {
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (m as f64 - 1.0) * unit_sphere_area(m - 2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureContext {
    pub k: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValues {
    pub s: f64,
    pub c: f64,
    pub ct: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelMeasures {
    pub sphere_area: f64,
    pub ball_volume: f64,
    pub h: f64,
}

impl CurvatureContext {
    pub fn new(k: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("dimension must be at least 2, got {n}")));
        }
        if !k.is_finite() {
            return Err(domain("curvature must be finite"));
        }
        Ok(CurvatureContext { k, n })
    }

    /// √|k|.
    fn q(&self) -> f64 {
        self.k.abs().sqrt()
    }

    /// π/√k for k > 0, +∞ otherwise.
    pub fn conjugate_radius(&self) -> f64 {
        if self.k > 0.0 {
            PI / self.q()
        } else {
            f64::INFINITY
        }
    }

    pub fn s(&self, t: f64) -> f64 {
        let x = self.k * t * t;
        if x.abs() < TAYLOR_CUTOFF {
            t * (1.0 - x / 6.0 * (1.0 - x / 20.0 * (1.0 - x / 42.0)))
        } else if self.k > 0.0 {
            (self.q() * t).sin() / self.q()
        } else {
            (self.q() * t).sinh() / self.q()
        }
    }

    pub fn c(&self, t: f64) -> f64 {
        let x = self.k * t * t;
        if x.abs() < TAYLOR_CUTOFF {
            1.0 - x / 2.0 * (1.0 - x / 12.0 * (1.0 - x / 30.0))
        } else if self.k > 0.0 {
            (self.q() * t).cos()
        } else {
            (self.q() * t).cosh()
        }
    }

    /// ρ_k(t) = ∫₀ᵗ s_k.
    pub fn rho(&self, t: f64) -> f64 {
        let x = self.k * t * t;
        if x.abs() < TAYLOR_CUTOFF {
            0.5 * t * t * (1.0 - x / 12.0 * (1.0 - x / 30.0 * (1.0 - x / 56.0)))
        } else if self.k > 0.0 {
            2.0 * (0.5 * self.q() * t).sin().powi(2) / self.k
        } else {
            2.0 * (0.5 * self.q() * t).sinh().powi(2) / -self.k
        }
    }

    pub fn ct(&self, t: f64) -> Result<f64> {
        if t <= 0.0 || t >= self.conjugate_radius() {
            return Err(domain(format!("ct_k undefined at t = {t} for k = {}", self.k)));
        }
        Ok(self.c(t) / self.s(t))
    }

    /// Inverse of ct_k on (0, π/√k).
    pub fn ct_inverse(&self, y: f64) -> Result<f64> {
        if self.k < 0.0 && y <= self.q() {
            return Err(domain(format!("ct_k never takes the value {y} for k = {}", self.k)));
        }
        if self.k == 0.0 && y <= 0.0 {
            return Err(domain(format!("ct_0 never takes the value {y}")));
        }
        self.l_of_lambda(y)
    }

    pub fn eval(&self, t: f64) -> Result<KernelValues> {
        if !(t >= 0.0) {
            return Err(domain(format!("kernels need t >= 0, got {t}")));
        }
        Ok(KernelValues { s: self.s(t), c: self.c(t), ct: self.ct(t)?, rho: self.rho(t) })
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r > 0.0) || r > self.conjugate_radius() * (1.0 + 1e-15) {
            return Err(domain(format!("radius {r} outside (0, {}]", self.conjugate_radius())));
        }
        Ok(())
    }

    pub fn sphere_area(&self, r: f64) -> f64 {
        unit_sphere_area(self.n - 1) * self.s(r).max(0.0).powi(self.n as i32 - 1)
    }

    /// ∫_a^b s_k^{n−1}.
    pub fn power_integral(&self, a: f64, b: f64) -> f64 {
        let m = self.n as i32 - 1;
        if self.k == 0.0 {
            return (b.powi(m + 1) - a.powi(m + 1)) / (m + 1) as f64;
        }
        let (v, _) = quadrature::integrate(|t| self.s(t).powi(m), a, b, 1e-12, 0.0)
            .or_else(|_| quadrature::integrate(|t| self.s(t).powi(m), a, b, 1e-10, 0.0))
            .expect("integrand is smooth on a bounded interval");
        v
    }

    pub fn ball_volume(&self, r: f64) -> f64 {
        unit_sphere_area(self.n - 1) * self.power_integral(0.0, r)
    }

    pub fn model_measures(&self, r: f64) -> Result<ModelMeasures> {
        self.check_radius(r)?;
        let sphere_area = self.sphere_area(r);
        let ball_volume = self.ball_volume(r);
        let h = if self.k == 0.0 { r / self.n as f64 } else { ball_volume / sphere_area };
        Ok(ModelMeasures { sphere_area, ball_volume, h })
    }

    pub fn h(&self, r: f64) -> Result<f64> {
        Ok(self.model_measures(r)?.h)
    }

    /// h_k on the extended half-line; h_k(∞) is the reciprocal of the k ≤ 0 limit.
    pub fn h_ext(&self, r: Ext) -> Result<f64> {
        match r {
            Ext::Finite(r) => self.h(r),
            Ext::Infinite if self.k < 0.0 => Ok(1.0 / self.h_inverse_limit()?),
            Ext::Infinite if self.k == 0.0 => Ok(f64::INFINITY),
            Ext::Infinite => Err(domain("infinite radius in a positively curved model")),
        }
    }

    pub fn lambda_of_l(&self, l: f64) -> Result<f64> {
        if !(l > 0.0) || l >= self.conjugate_radius() {
            return Err(domain(format!("λ_k(l) undefined at l = {l} for k = {}", self.k)));
        }
        let x = self.k * l * l;
        Ok(if x.abs() < TAYLOR_CUTOFF {
            (1.0 - x / 3.0 - x * x / 45.0 - 2.0 * x * x * x / 945.0) / l
        } else if self.k > 0.0 {
            self.q() / (self.q() * l).tan()
        } else {
            self.q() / (self.q() * l).tanh()
        })
    }

    /// λ_k on the extended half-line; λ_k(∞) is the limit √(−k).
    pub fn lambda_ext(&self, l: Ext) -> Result<f64> {
        match l {
            Ext::Finite(l) => self.lambda_of_l(l),
            Ext::Infinite if self.k <= 0.0 => Ok(self.q()),
            Ext::Infinite => Err(domain("infinite length in a positively curved model")),
        }
    }

    pub fn lambda_admissible(&self, lambda: f64) -> bool {
        if self.k == 0.0 {
            lambda > 0.0
        } else if self.k > 0.0 {
            lambda.is_finite()
        } else {
            lambda > self.q()
        }
    }

    pub fn l_of_lambda(&self, lambda: f64) -> Result<f64> {
        if !self.lambda_admissible(lambda) {
            return Err(domain(format!("λ = {lambda} is not admissible for k = {}", self.k)));
        }
        if lambda > 0.0 {
            let x = self.k / (lambda * lambda);
            if x.abs() < TAYLOR_CUTOFF {
                return Ok((1.0 - x / 3.0 + x * x / 5.0 - x * x * x / 7.0) / lambda);
            }
        }
        let q = self.q();
        Ok(if self.k > 0.0 { 1.0f64.atan2(lambda / q) / q } else { (q / lambda).atanh() / q })
    }

    pub fn sigma(&self, lambda: f64, t: f64) -> f64 {
        let q = self.q();
        if self.k < 0.0 && q * t > 20.0 {
            let g = lambda / q;
            let e = (q * t).exp();
            return 0.5 * e * (1.0 - g) + 0.5 * (1.0 + g) / e;
        }
        self.c(t) - lambda * self.s(t)
    }

    pub fn j_tube(&self, r: f64, rho: f64) -> Result<f64> {
        self.check_radius(r)?;
        if !(rho >= 0.0) {
            return Err(domain(format!("tube radius must be nonnegative, got {rho}")));
        }
        if rho >= r {
            return self.h(r);
        }
        let m = self.n as i32 - 1;
        if self.k == 0.0 {
            let a = r - rho;
            return Ok((r.powi(m + 1) - a.powi(m + 1)) / ((m + 1) as f64 * r.powi(m)));
        }
        Ok(self.power_integral(r - rho, r) / self.s(r).powi(m))
    }

    pub fn h_inverse_limit(&self) -> Result<f64> {
        if self.k > 0.0 {
            return Err(domain("1/h_k has no limit at infinity for k > 0"));
        }
        Ok((self.n - 1) as f64 * self.q())
    }
}
