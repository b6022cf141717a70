//! Cut loci of points on closed surfaces and metric-ball volumes.

use std::f64::consts::PI;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Ambient, Point};
use crate::error::{Error, Result};
use crate::kernels::CurvatureContext;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutPoint {
    pub direction_index: usize,
    pub t: f64,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutLocus {
    /// rad(x0) = max over the direction grid of the cut function.
    pub rad: f64,
    /// Estimate of H^1(Cut(x0)).
    pub measure: f64,
    pub curves: Vec<Vec<CutPoint>>,
    /// ρ(v) on the uniform direction grid.
    pub rho: Vec<f64>,
    /// Largest allowed distance between consecutive cut points.
    pub tolerance: f64,
}

/// Unit vector at angle θ in the ambient's orthonormal frame at x.
fn unit(amb: &dyn Ambient, x: &Point, theta: f64) -> Point {
    let f = amb.frame(x);
    &f[0] * theta.cos() + &f[1] * theta.sin()
}

/// Upper bound on distances in a closed surface, used as the search horizon.
fn horizon(amb: &dyn Ambient) -> f64 {
    let area = amb.total_volume().unwrap_or(1.0);
    let k = amb.curvature();
    if k > 0.0 {
        1.5 * PI / k.sqrt()
    } else {
        4.0 * area.sqrt() + 2.0 * amb.injectivity_radius()
    }
}

fn crossing(amb: &dyn Ambient, x0: &Point, v: &Point, delta: f64, hi: f64) -> f64 {
    let holds = |t: f64| t - amb.distance(x0, &amb.exp(x0, v, t)) <= delta;
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

/// ρ(v) = sup{t : d(x0, exp(tv)) = t} along each direction angle.
pub fn cut_function(amb: &dyn Ambient, x0: &Point, angles: &[f64]) -> Result<Vec<f64>> {
    if amb.dim() != 2 {
        return Err(Error::Domain("cut loci are computed on surfaces".into()));
    }
    let hi = horizon(amb);
    let delta = 1e-4 * amb.injectivity_radius();
    angles
        .par_iter()
        .map(|&th| {
            let v = unit(amb, x0, th);
            if hi - amb.distance(x0, &amb.exp(x0, &v, hi)) <= delta {
                return Err(Error::Resolution(format!("direction {th} minimizes up to the search horizon")));
            }
            let t1 = crossing(amb, x0, &v, delta, hi);
            let t2 = crossing(amb, x0, &v, 0.5 * delta, hi);
            Ok((2.0 * t2 - t1).max(0.0))
        })
        .collect()
}

/// Cut locus of x0 on a closed surface from a uniform grid of `directions` angles.
pub fn point_cut_locus(amb: &dyn Ambient, x0: &Point, directions: usize) -> Result<CutLocus> {
    if directions < 8 {
        return Err(Error::Validation("at least 8 directions are needed".into()));
    }
    let dth = 2.0 * PI / directions as f64;
    let angles: Vec<f64> = (0..directions).map(|i| i as f64 * dth).collect();
    let rho = cut_function(amb, x0, &angles)?;
    let pts: Vec<Point> =
        angles.iter().zip(&rho).map(|(&th, &r)| amb.exp(x0, &unit(amb, x0, th), r)).collect();
    let rad = rho.iter().cloned().fold(0.0, f64::max);
    let tolerance = 20.0 * rad * dth;
    let mut curves: Vec<Vec<CutPoint>> = vec![Vec::new()];
    let mut total = 0.0;
    for i in 0..directions {
        let j = (i + 1) % directions;
        curves.last_mut().expect("nonempty").push(CutPoint {
            direction_index: i,
            t: rho[i],
            point: pts[i].as_slice().to_vec(),
        });
        let len = amb.distance(&pts[i], &pts[j]);
        if len > tolerance {
            return Err(Error::Resolution(format!(
                "cut points of directions {i} and {j} are {len:.3e} apart (tolerance {tolerance:.3e})"
            )));
        }
        total += len;
    }
    if let Some(c) = curves.last_mut() {
        let first = c[0].clone();
        c.push(CutPoint { direction_index: directions, ..first });
    }
    // every cut point is reached from two sides of the sweep
    Ok(CutLocus { rad, measure: 0.5 * total, curves, rho, tolerance })
}

/// |B(x0, r)| for each r, integrating the polar density s_K^{n-1} up to min(r, ρ(v)).
pub fn ball_volume(amb: &dyn Ambient, x0: &Point, radii: &[f64], directions: usize) -> Result<Vec<f64>> {
    let ctx = CurvatureContext::new(amb.curvature(), amb.dim())?;
    if amb.dim() != 2 {
        let cut = if ctx.k > 0.0 { ctx.conjugate_radius() } else { f64::INFINITY };
        return Ok(radii.iter().map(|&r| ctx.ball_volume(r.min(cut))).collect());
    }
    let dth = 2.0 * PI / directions as f64;
    let angles: Vec<f64> = (0..directions).map(|i| (i as f64 + 0.5) * dth).collect();
    let rho = cut_function(amb, x0, &angles)?;
    // ∫_0^t s_K = ρ_K(t)
    Ok(radii.iter().map(|&r| rho.iter().map(|&c| ctx.rho(r.min(c))).sum::<f64>() * dth).collect())
}

/// Cut-locus polylines as rows (direction_index, t, chart_x, chart_y).
pub fn polyline_rows(locus: &CutLocus) -> Vec<(usize, f64, f64, f64)> {
    locus
        .curves
        .iter()
        .flat_map(|c| c.iter().map(|p| (p.direction_index, p.t, p.point[0], p.point[1])))
        .collect()
}

pub fn origin(n: usize) -> Point {
    DVector::zeros(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::closed::{FlatTorus, ProjectivePlane};
    use crate::manifold::spaceform::SpaceForm;

    #[test]
    fn square_torus() {
        let t = FlatTorus::new(1.0, 1.0).unwrap();
        let c = point_cut_locus(&t, &origin(2), 256).unwrap();
        assert!((c.rad - 0.5f64.sqrt()).abs() < 1e-6, "{}", c.rad);
        assert!((c.measure - 2.0).abs() < 2e-2, "{}", c.measure);
        for (i, r) in c.rho.iter().enumerate() {
            let th = i as f64 * 2.0 * PI / 256.0;
            let exact = 0.5 / th.cos().abs().max(th.sin().abs());
            assert!((r - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn projective_plane_and_sphere() {
        let rp = ProjectivePlane::new(1.0).unwrap();
        let c = point_cut_locus(&rp, &origin(2), 256).unwrap();
        assert!((c.measure - PI).abs() < 1e-3 && (c.rad - PI / 2.0).abs() < 1e-8);
        let s2 = SpaceForm::new(1.0, 2).unwrap();
        let c = point_cut_locus(&s2, &origin(2), 64).unwrap();
        assert!(c.measure < 1e-6 && (c.rad - PI).abs() < 1e-8);
    }

    #[test]
    fn sphere_ball_volumes() {
        let s2 = SpaceForm::new(1.0, 2).unwrap();
        let v = ball_volume(&s2, &origin(2), &[0.5, 1.0], 64).unwrap();
        assert!((v[0] - 2.0 * PI * (1.0 - 0.5f64.cos())).abs() < 1e-12);
        let t = FlatTorus::new(1.0, 1.0).unwrap();
        let v = ball_volume(&t, &origin(2), &[0.3, 1.0], 1024).unwrap();
        assert!((v[0] - PI * 0.09).abs() < 1e-12);
        assert!((v[1] - 1.0).abs() < 1e-4, "{}", v[1]);
    }
}
