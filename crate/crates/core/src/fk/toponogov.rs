//! Triangle comparison against the model plane M²_k.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::CurvatureContext;
use crate::manifold::{build_ambient, Ambient, ManifoldSpec, Point};
use crate::suite::{Check, ReportBuilder, VerificationReport};

/// A hinge: the side γ from p0 to p1 and the opposite vertex q.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    pub q: Point,
    pub p0: Point,
    pub p1: Point,
}

/// Outcome of one triangle: the worst sample of d(q, γ(t)) − d(q̄, γ̄(t)).
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleComparison {
    /// Worst difference divided by the longest side.
    pub margin: f64,
    pub t: f64,
    pub distance: f64,
    pub model_distance: f64,
    pub sides: [f64; 3],
}

fn s_inverse(ctx: &CurvatureContext, y: f64) -> f64 {
    let k = ctx.k;
    if k > 0.0 {
        let q = k.sqrt();
        (q * y).clamp(-1.0, 1.0).asin() / q
    } else if k < 0.0 {
        let q = (-k).sqrt();
        (q * y).asinh() / q
    } else {
        y
    }
}

/// Side opposite the angle β between sides a and b in M²_k, by the haversine form
/// s_k(d/2)² = s_k((a−b)/2)² + s_k(a) s_k(b) sin²(β/2) of the law of cosines.
pub fn comparison_distance(ctx: &CurvatureContext, a: f64, b: f64, beta: f64) -> f64 {
    let v = ctx.s(0.5 * (a - b)).powi(2) + ctx.s(a) * ctx.s(b) * (0.5 * beta).sin().powi(2);
    2.0 * s_inverse(ctx, v.max(0.0).sqrt())
}

/// Angle between sides a and b of a model triangle whose third side is d.
pub fn comparison_angle(ctx: &CurvatureContext, a: f64, b: f64, d: f64) -> f64 {
    let den = ctx.s(a) * ctx.s(b);
    if den <= 0.0 {
        return 0.0;
    }
    let x = (ctx.s(0.5 * d).powi(2) - ctx.s(0.5 * (a - b)).powi(2)) / den;
    2.0 * x.clamp(0.0, 1.0).sqrt().asin()
}

/// Samples t_i = |γ| i/(N+1), i = 1..N, on the minimal geodesic from p0 to p1.
pub fn compare_triangle(amb: &dyn Ambient, tri: &Triangle, k: f64, t_samples: usize) -> Result<TriangleComparison> {
    let ctx = CurvatureContext::new(k, 2)?;
    let a = amb.distance(&tri.q, &tri.p0);
    let b = amb.distance(&tri.q, &tri.p1);
    let (v, c) = amb.log(&tri.p0, &tri.p1).map_err(|e| Error::Geodesic(e.to_string()))?;
    let scale = a.max(b).max(c);
    if scale == 0.0 || c <= 1e-12 * scale || a <= 1e-12 * scale {
        return Ok(TriangleComparison { margin: 0.0, t: 0.0, distance: a, model_distance: a, sides: [a, b, c] });
    }
    let beta = comparison_angle(&ctx, a, c, b);
    let rows: Vec<(f64, f64, f64)> = (1..=t_samples)
        .into_par_iter()
        .map(|i| {
            let t = c * i as f64 / (t_samples + 1) as f64;
            let x = amb.exp(&tri.p0, &v, t);
            (t, amb.distance(&tri.q, &x), comparison_distance(&ctx, a, t, beta))
        })
        .collect();
    let (t, d, dbar) = rows
        .into_iter()
        .min_by(|x, y| (x.1 - x.2).total_cmp(&(y.1 - y.2)))
        .expect("t_samples is positive");
    Ok(TriangleComparison { margin: (d - dbar) / scale, t, distance: d, model_distance: dbar, sides: [a, b, c] })
}

/// Adds the hinge hypotheses and the comparison check for one triangle.
pub fn add_triangle(
    b: &mut ReportBuilder,
    amb: &dyn Ambient,
    tri: &Triangle,
    k: f64,
    t_samples: usize,
    name: &str,
) -> Result<TriangleComparison> {
    let cmp = compare_triangle(amb, tri, k, t_samples)?;
    let [sa, sb, sc] = cmp.sides;
    b.hypothesis.require_ge("sectional curvature", amb.curvature(), k, 1e-9);
    b.hypothesis.require_le(&format!("{name}: |γ| ≤ |γ0| + |γ1|"), sc, sa + sb, 1e-9 * (sa + sb));
    if k > 0.0 {
        let pi_k = std::f64::consts::PI / k.sqrt();
        b.hypothesis.require_le(&format!("{name}: |γ| ≤ π/√k"), sc, pi_k, 1e-12);
        b.hypothesis.require_le(&format!("{name}: perimeter ≤ 2π/√k"), sa + sb + sc, 2.0 * pi_k, 1e-12);
    }
    b.check(Check {
        name: name.into(),
        lhs: cmp.distance,
        rhs: cmp.model_distance,
        relation: ">=".into(),
        margin: cmp.margin,
    });
    Ok(cmp)
}

/// Compares one hinge in the given manifold with its model in M²_k.
pub fn toponogov_verify(
    manifold: &ManifoldSpec,
    q: &Point,
    p0: &Point,
    p1: &Point,
    k: f64,
    t_samples: usize,
) -> Result<VerificationReport> {
    let amb = build_ambient(manifold)?;
    let tri = Triangle { q: q.clone(), p0: p0.clone(), p1: p1.clone() };
    let mut b = ReportBuilder::new("toponogov", crate::manifold::spec::kind_name(manifold), 1e-4, false);
    let cmp = add_triangle(&mut b, amb.as_ref(), &tri, k, t_samples, "triangle")?;
    b.ingredient("side_q_p0", cmp.sides[0], "ambient distance");
    b.ingredient("side_q_p1", cmp.sides[1], "ambient distance");
    b.ingredient("side_p0_p1", cmp.sides[2], "ambient log");
    b.ingredient("worst_t", cmp.t, "sampled geodesic");
    Ok(b.finish())
}
