//! F_k-convexity: chords from span{s_k, c_k}, the convexifying transform, sampled
//! convexity verdicts and the comparison bound against σ_{k,λ}.

pub mod toponogov;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::kernels::CurvatureContext;

pub use toponogov::{comparison_distance, toponogov_verify, Triangle};

/// A function on an interval, known on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
    h_max: f64,
}

impl SampledFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let h = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        Self::with_resolution(grid, values, h)
    }

    /// Like `new`, but rejects grids coarser than `h_max`.
    pub fn with_resolution(grid: Vec<f64>, values: Vec<f64>, h_max: f64) -> Result<Self> {
        if grid.len() < 3 {
            return Err(domain(format!("need at least 3 samples, got {}", grid.len())));
        }
        if grid.len() != values.len() {
            return Err(domain("grid and values differ in length"));
        }
        if grid.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(domain("samples must be finite"));
        }
        for w in grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(domain("grid must be strictly increasing"));
            }
            if w[1] - w[0] > h_max * (1.0 + 1e-12) {
                return Err(domain(format!("grid spacing {} exceeds h_max = {h_max}", w[1] - w[0])));
            }
        }
        Ok(SampledFunction { grid, values, h_max })
    }

    /// Samples `f` at `m` equally spaced points of [a, b].
    pub fn from_fn(a: f64, b: f64, m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let m = m.max(3);
        let grid: Vec<f64> = (0..m).map(|i| a + (b - a) * i as f64 / (m - 1) as f64).collect();
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.grid[0], *self.grid.last().unwrap())
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Magnitude used to scale slacks.
    pub fn scale(&self) -> f64 {
        let m = self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if m > 0.0 {
            m
        } else {
            1.0
        }
    }

    /// Piecewise linear interpolation, clamped to the interval.
    pub fn interpolate(&self, t: f64) -> f64 {
        let g = &self.grid;
        if t <= g[0] {
            return self.values[0];
        }
        if t >= g[g.len() - 1] {
            return self.values[g.len() - 1];
        }
        let i = g.partition_point(|&x| x <= t) - 1;
        let u = (t - g[i]) / (g[i + 1] - g[i]);
        self.values[i] * (1.0 - u) + self.values[i + 1] * u
    }
}

/// h = α s_k + β c_k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FkChord {
    pub alpha: f64,
    pub beta: f64,
}

impl FkChord {
    pub fn eval(&self, ctx: &CurvatureContext, t: f64) -> f64 {
        self.alpha * ctx.s(t) + self.beta * ctx.c(t)
    }
}

fn solve_chord(s1: f64, c1: f64, s2: f64, c2: f64, y1: f64, y2: f64) -> Result<FkChord> {
    let det = s1 * c2 - s2 * c1;
    if det.abs() < 1e-14 {
        return Err(Error::Singular { det });
    }
    Ok(FkChord { alpha: (y1 * c2 - y2 * c1) / det, beta: (s1 * y2 - s2 * y1) / det })
}

pub fn chord(ctx: &CurvatureContext, x1: f64, y1: f64, x2: f64, y2: f64) -> Result<FkChord> {
    if !(0.0 <= x1 && x1 < x2) {
        return Err(domain(format!("chord needs 0 <= x1 < x2, got ({x1}, {x2})")));
    }
    let ch = solve_chord(ctx.s(x1), ctx.c(x1), ctx.s(x2), ctx.c(x2), y1, y2)?;
    if x2 - x1 >= ctx.conjugate_radius() {
        let det = ctx.s(x1) * ctx.c(x2) - ctx.s(x2) * ctx.c(x1);
        return Err(Error::Singular { det });
    }
    Ok(ch)
}

/// ψ(y) = √(k + y²) φ(ct_k⁻¹(y)) on the image grid y_i = ct_k(t_i), sorted increasingly.
pub fn convexify_transform(ctx: &CurvatureContext, phi: &SampledFunction) -> Result<SampledFunction> {
    let (a, b) = phi.interval();
    if a <= 0.0 || b >= ctx.conjugate_radius() {
        return Err(domain(format!("interval [{a}, {b}] must lie inside (0, {})", ctx.conjugate_radius())));
    }
    let mut pts: Vec<(f64, f64)> = phi
        .grid
        .iter()
        .zip(&phi.values)
        .map(|(&t, &v)| {
            let y = ctx.c(t) / ctx.s(t);
            (y, v / ctx.s(t))
        })
        .collect();
    pts.reverse();
    let (grid, values): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    SampledFunction::new(grid, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Convex,
    Concave,
}

impl Sense {
    fn sign(self) -> f64 {
        match self {
            Sense::Convex => 1.0,
            Sense::Concave => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub ok: bool,
    /// Largest amount by which φ crosses a chord on the wrong side (≤ 0 when none does).
    pub worst_violation: f64,
    pub location: f64,
    pub slack: f64,
    /// scale·h_max², the size of the interpolation error between grid points.
    pub resolution_slack: f64,
}

fn report(worst: f64, location: f64, phi: &SampledFunction) -> ConvexityReport {
    let slack = 1e-9 * phi.scale();
    ConvexityReport {
        ok: worst <= slack,
        worst_violation: worst,
        location,
        slack,
        resolution_slack: phi.scale() * phi.h_max * phi.h_max,
    }
}

/// Brute-force chord test over every pair of grid points.
pub fn is_fk_convex(ctx: &CurvatureContext, phi: &SampledFunction, sense: Sense) -> ConvexityReport {
    let g = &phi.grid;
    let v = &phi.values;
    let s: Vec<f64> = g.iter().map(|&t| ctx.s(t)).collect();
    let c: Vec<f64> = g.iter().map(|&t| ctx.c(t)).collect();
    let sign = sense.sign();
    let reach = ctx.conjugate_radius();
    let (mut worst, mut location) = (f64::NEG_INFINITY, g[0]);
    for i in 0..g.len() {
        for j in i + 2..g.len() {
            if g[j] - g[i] >= reach {
                break;
            }
            let Ok(ch) = solve_chord(s[i], c[i], s[j], c[j], v[i], v[j]) else { continue };
            for m in i + 1..j {
                let h = ch.alpha * s[m] + ch.beta * c[m];
                let viol = sign * (v[m] - h);
                if viol > worst {
                    worst = viol;
                    location = g[m];
                }
            }
        }
    }
    report(worst, location, phi)
}

/// The same verdict through the transform: consecutive second differences of ψ.
/// Violations are mapped back to the φ scale by the factor s_k(t).
pub fn transformed_test(ctx: &CurvatureContext, phi: &SampledFunction, sense: Sense) -> Result<ConvexityReport> {
    let psi = convexify_transform(ctx, phi)?;
    let (y, p) = (&psi.grid, &psi.values);
    let sign = sense.sign();
    let (mut worst, mut location) = (f64::NEG_INFINITY, phi.grid[0]);
    for b in 1..y.len() - 1 {
        let u = (y[b] - y[b - 1]) / (y[b + 1] - y[b - 1]);
        let line = p[b - 1] * (1.0 - u) + p[b + 1] * u;
        let t = ctx.ct_inverse(y[b])?;
        let viol = sign * (p[b] - line) * ctx.s(t);
        if viol > worst {
            worst = viol;
            location = t;
        }
    }
    Ok(report(worst, location, phi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub ok: bool,
    /// Whether the sampled f is F_k-concave, i.e. f'' ≤ −k f.
    pub hypothesis_ok: bool,
    pub concavity: ConvexityReport,
    pub lambda: f64,
    /// min over the grid of f − σ_{k,λ}.
    pub min_margin: f64,
    pub location: f64,
}

/// Compares f on [0, l] with the model profile σ_{k, λ_k(l)}.
pub fn comparison_bound(ctx: &CurvatureContext, f: &SampledFunction, l: f64) -> Result<ComparisonReport> {
    let (a, b) = f.interval();
    if a != 0.0 || (b - l).abs() > 1e-12 * l.abs().max(1.0) {
        return Err(domain(format!("f must be sampled on [0, {l}], got [{a}, {b}]")));
    }
    if (f.values[0] - 1.0).abs() > 1e-9 {
        return Err(Error::Hypothesis(format!("f(0) = {} differs from 1", f.values[0])));
    }
    let fl = *f.values.last().unwrap();
    if fl < -1e-9 {
        return Err(Error::Hypothesis(format!("f(l) = {fl} is negative")));
    }
    let lambda = ctx.lambda_of_l(l)?;
    let concavity = is_fk_convex(ctx, f, Sense::Concave);
    let (mut min_margin, mut location) = (f64::INFINITY, 0.0);
    for (&t, &v) in f.grid.iter().zip(&f.values) {
        let m = v - ctx.sigma(lambda, t);
        if m < min_margin {
            min_margin = m;
            location = t;
        }
    }
    Ok(ComparisonReport {
        ok: min_margin >= -1e-8 * f.scale(),
        hypothesis_ok: concavity.ok,
        concavity,
        lambda,
        min_margin,
        location,
    })
}
