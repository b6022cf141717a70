use std::f64::consts::PI;

use nalgebra::DVector;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use super::{Check, ReportBuilder, Series, VerificationReport, VerifierEntry, VerifierParams, Weight, Workspace};
use crate::error::{Error, Result};
use crate::fk::toponogov::{add_triangle, Triangle};
use crate::kernels::{unit_sphere_area, CurvatureContext, Ext};
use crate::manifold::cutlocus::origin;
use crate::manifold::domain::{cut_distance, cut_tolerance, measures};
use crate::manifold::{
    ball_volume, extrinsic_radius, point_cut_locus, Ambient, BoundarySample, Domain, Shape, SpaceFormDomain,
};
use crate::quadrature;

/// Slack allowed when comparing sampled curvature against a hypothesis.
const HYPOTHESIS_TOL: f64 = 1e-4;

pub(super) fn dispatch(ws: &Workspace, e: &VerifierEntry) -> Result<VerificationReport> {
    match &e.params {
        VerifierParams::CutIsoperimetric {} => cut_isoperimetric(ws, e),
        VerifierParams::Superlevel { t_grid } => superlevel(ws, e, t_grid),
        VerifierParams::Tube { rho_grid } => tube(ws, e, rho_grid),
        VerifierParams::Inradius { lambda } => inradius(ws, e, *lambda),
        VerifierParams::BishopGromov { r_grid, center } => bishop_gromov(ws, e, r_grid, center.as_deref()),
        VerifierParams::Hkr { lambda } => hkr(ws, e, *lambda),
        VerifierParams::Fenchel {} => fenchel(ws, e),
        VerifierParams::Isodiametric {} => isodiametric(ws, e),
        VerifierParams::Cheeger {} => cheeger(ws, e),
        VerifierParams::SantaloYanez { radii, n } => santalo_yanez(ws, e, radii, *n),
        VerifierParams::QuermassRatio { i, j } => quermass_ratio(ws, e, *i, *j),
        VerifierParams::Weighted { weight } => weighted(ws, e, weight),
        VerifierParams::FocalLowerBound { lambda_max, cut_equals_focal } => {
            focal_lower_bound(ws, e, *lambda_max, *cut_equals_focal)
        }
        VerifierParams::CutlocusBound { point, subdomain_radius } => {
            cutlocus_bound(ws, e, point.as_deref(), *subdomain_radius)
        }
        VerifierParams::Toponogov { triangles, random, t_samples } => toponogov(ws, e, triangles, random, *t_samples),
    }
}

fn builder(ws: &Workspace, e: &VerifierEntry) -> ReportBuilder {
    ReportBuilder::new(e.id(), &ws.scenario, e.tolerance.unwrap_or(ws.tolerance), e.equality_expected)
}

fn k_of(ws: &Workspace, e: &VerifierEntry) -> f64 {
    e.k.unwrap_or(ws.k)
}

fn hyp_tol(x: f64) -> f64 {
    HYPOTHESIS_TOL * x.abs().max(1.0)
}

fn ricci_hypothesis(b: &mut ReportBuilder, ws: &Workspace, k: f64) -> Result<()> {
    let cb = ws.bounds()?;
    b.hypothesis.require_ge("Ricci lower bound Ric/(n-1) ≥ k", cb.ric_lower, k, hyp_tol(k));
    b.ingredient("ric_lower", cb.ric_lower, "sampled curvature");
    Ok(())
}

fn sec_upper_hypothesis(b: &mut ReportBuilder, ws: &Workspace, k: f64) -> Result<()> {
    let cb = ws.bounds()?;
    b.hypothesis.require_le("sectional curvature ≤ k", cb.sec_upper, k, hyp_tol(k));
    b.ingredient("sec_upper", cb.sec_upper, "sampled curvature");
    Ok(())
}

fn record_measures(b: &mut ReportBuilder, ws: &Workspace) -> Result<(f64, f64)> {
    let m = ws.measures()?;
    b.quadrature_error = ws.quadrature_error();
    b.ingredient("volume", m.volume, "interior quadrature");
    b.ingredient("boundary_area", m.boundary_area, "boundary quadrature");
    Ok((m.volume, m.boundary_area))
}

fn cut(p: &BoundarySample) -> Ext {
    p.cut.expect("cut distances are filled")
}

fn min_cut(s: &[BoundarySample]) -> Ext {
    s.iter().map(cut).fold(Ext::Infinite, Ext::min)
}

fn mean_cut(s: &[BoundarySample]) -> Ext {
    let mut num = 0.0;
    let mut den = 0.0;
    for p in s {
        match cut(p) {
            Ext::Finite(c) => num += p.weight * c,
            Ext::Infinite => return Ext::Infinite,
        }
        den += p.weight;
    }
    Ext::Finite(num / den)
}

/// l for the area/volume ratio bound: the mean cut for k ≥ 0, the least cut for k < 0.
fn branch_length(k: f64, s: &[BoundarySample]) -> Ext {
    if k >= 0.0 {
        mean_cut(s)
    } else {
        min_cut(s)
    }
}

fn ext_value(x: Ext) -> f64 {
    x.to_f64()
}

/// Vol ≥ rhs with rhs possibly infinite.
fn check_ge_finite(name: &str, lhs: f64, rhs: f64) -> Check {
    if rhs.is_finite() {
        Check::ge(name, lhs, rhs)
    } else {
        Check { name: name.into(), lhs, rhs: f64::MAX, relation: ">=".into(), margin: -1.0 }
    }
}

fn oracle(b: &mut ReportBuilder, ws: &Workspace) -> Result<()> {
    let dom = ws.domain()?;
    if let Some(gap) = dom.oracle_check(&ws.res) {
        b.ingredient("oracle_gap", gap, "mesh shortest paths");
        if gap > 1e-3 * dom.scale() {
            return Err(Error::OracleResolution(format!(
                "distance oracle exceeds mesh path length by {gap:.3e}"
            )));
        }
    }
    Ok(())
}

fn cut_isoperimetric(ws: &Workspace, e: &VerifierEntry) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    ricci_hypothesis(&mut b, ws, k)?;
    let ctx = ws.ctx(k)?;
    let n = ctx.n as f64;
    let (vol, area) = record_measures(&mut b, ws)?;
    oracle(&mut b, ws)?;
    let s = ws.samples_with_cut()?;

    let mut integral = 0.0;
    let mut pointwise: Option<Check> = None;
    for p in s {
        integral += p.weight * ctx.h_ext(cut(p))?;
        let c = Check::le("mean_curvature_vs_cut", p.h, (n - 1.0) * ctx.lambda_ext(cut(p))?);
        if pointwise.as_ref().is_none_or(|w| c.margin < w.margin) {
            pointwise = Some(c);
        }
    }
    b.check(check_ge_finite("volume_vs_cut_integral", vol, integral));
    if let Some(c) = pointwise {
        b.check(c);
    }

    let l = branch_length(k, s);
    let c_omega = min_cut(s);
    b.ingredient("cut_integral", integral, "boundary quadrature of h_k(c)");
    b.ingredient("mean_cut", ext_value(mean_cut(s)), "boundary quadrature");
    b.ingredient("min_cut", ext_value(c_omega), "cut bisection");
    match l {
        Ext::Finite(l) => b.check(Check::le("area_volume_ratio", area / vol, 1.0 / ctx.h(l)?)),
        Ext::Infinite if k < 0.0 => b.check(Check::le("area_volume_ratio", area / vol, ctx.h_inverse_limit()?)),
        Ext::Infinite => b.note("infinite cut distance on a compact domain with k >= 0; ratio branch skipped"),
    }
    if k >= 0.0 {
        if let Ext::Finite(c) = c_omega {
            b.check(Check::le("cut_times_area_vs_n_volume", c * area, n * vol));
        }
    }
    if let Ext::Finite(c) = c_omega {
        if ctx.k <= 0.0 || c <= ctx.conjugate_radius() {
            b.ingredient("model_ball_volume_at_min_cut", ctx.ball_volume(c), "kernels");
            b.ingredient("model_sphere_area_at_min_cut", ctx.sphere_area(c), "kernels");
        }
    }
    Ok(b.finish())
}

fn superlevel(ws: &Workspace, e: &VerifierEntry, t_grid: &[f64]) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    ricci_hypothesis(&mut b, ws, k)?;
    let ctx = ws.ctx(k)?;
    let (vol, _) = record_measures(&mut b, ws)?;
    let s = ws.samples_with_cut()?;
    let delta = cut_tolerance(ws.domain()?);
    let mut rows = Vec::new();
    for &t in t_grid {
        if !(t > 0.0) || (k > 0.0 && t > ctx.conjugate_radius()) {
            b.note(format!("t = {t} outside the admissible range; skipped"));
            continue;
        }
        let set: f64 = s.iter().filter(|p| cut(p).to_f64() >= t - delta).map(|p| p.weight).sum();
        let lhs = ctx.h(t)? * set;
        b.check(Check::le(format!("t={t}"), lhs, vol));
        rows.push([t, lhs, vol]);
    }
    let infinite: f64 = s.iter().filter(|p| !cut(p).is_finite()).map(|p| p.weight).sum();
    b.ingredient("infinite_cut_measure", infinite, "boundary quadrature");
    if k < 0.0 {
        b.check(Check::le("infinite_cut_set", infinite, ctx.h_inverse_limit()? * vol));
    } else if infinite > 0.0 {
        b.check(Check::le("infinite_cut_set", infinite, 0.0));
    }
    b.series = Some(Series { x_label: "t".into(), rows });
    Ok(b.finish())
}

/// j_k(r, ρ) on the extended half-line in r.
fn j_ext(ctx: &CurvatureContext, r: Ext, rho: f64) -> Result<f64> {
    match r {
        Ext::Finite(r) => ctx.j_tube(r, rho),
        Ext::Infinite if ctx.k == 0.0 => Ok(rho),
        Ext::Infinite if ctx.k < 0.0 => {
            let a = (ctx.n - 1) as f64 * (-ctx.k).sqrt();
            Ok(-(-a * rho).exp_m1() / a)
        }
        Ext::Infinite => Err(Error::Domain("infinite cut distance in a positively curved model".into())),
    }
}

fn tube(ws: &Workspace, e: &VerifierEntry, rho_grid: &[f64]) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    ricci_hypothesis(&mut b, ws, k)?;
    let ctx = ws.ctx(k)?;
    record_measures(&mut b, ws)?;
    let dom = ws.domain()?;
    let s = ws.samples_with_cut()?;
    let mut rows = Vec::new();
    for &rho in rho_grid {
        if !(rho >= 0.0) {
            return Err(Error::Validation(format!("tube radius must be nonnegative, got {rho}")));
        }
        let lhs = dom.interior_integral(&|d| if d <= rho { 1.0 } else { 0.0 }, &[rho], &ws.res)?;
        let mut rhs = 0.0;
        for p in s {
            rhs += p.weight * j_ext(&ctx, cut(p), rho)?;
        }
        b.check(Check::ge(format!("rho={rho}"), lhs, rhs));
        rows.push([rho, lhs, rhs]);
    }
    b.series = Some(Series { x_label: "rho".into(), rows });
    Ok(b.finish())
}

fn inradius(ws: &Workspace, e: &VerifierEntry, lambda: Option<f64>) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    ricci_hypothesis(&mut b, ws, k)?;
    let ctx = ws.ctx(k)?;
    let dom = ws.domain()?;
    let s = ws.samples()?;
    let h1min = s.iter().map(|p| p.h1).fold(f64::INFINITY, f64::min);
    let lambda = lambda.unwrap_or(h1min);
    b.hypothesis.require_ge("H_1 ≥ λ", h1min, lambda, hyp_tol(lambda));
    b.ingredient("min_h1", h1min, "boundary geometry");
    b.ingredient("lambda", lambda, "scenario or min H_1");
    let (r, _) = dom.inradius(&ws.res)?;
    b.ingredient("inradius", r, "distance field maximization");
    if ctx.lambda_admissible(lambda) {
        let l = ctx.l_of_lambda(lambda)?;
        b.ingredient("l_k(lambda)", l, "kernels");
        b.check(Check::le("inradius", r, l));
        if l > 1e3 * dom.scale() {
            b.note("weak hypothesis: λ is close to the admissibility threshold");
        }
    } else {
        b.check(Check::vacuous("inradius", r));
        b.note("weak hypothesis: λ is not admissible, so the bound l_k(λ) is infinite");
    }
    Ok(b.finish())
}

fn bishop_gromov(ws: &Workspace, e: &VerifierEntry, r_grid: &[f64], center: Option<&[f64]>) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    b.tolerance = e.tolerance.unwrap_or(1e-5);
    let amb = ws.ambient()?;
    b.hypothesis.require_ge("Ricci lower bound Ric/(n-1) ≥ k", amb.curvature(), k, hyp_tol(k));
    let x0 = match center {
        Some(c) => DVector::from_column_slice(c),
        None => origin(amb.dim()),
    };
    let ctx = CurvatureContext::new(k, amb.dim())?;
    for &r in r_grid {
        if !(r > 0.0) || (k > 0.0 && r > ctx.conjugate_radius()) {
            b.hypothesis.fail(format!("radius {r} outside the model range"));
        }
    }
    if !b.hypothesis.satisfied {
        return Ok(b.finish());
    }
    let vols = ball_volume(amb, &x0, r_grid, ws.res.directions)?;
    let ratios: Vec<f64> = r_grid.iter().zip(&vols).map(|(&r, v)| v / ctx.ball_volume(r)).collect();
    b.check(Check::le(format!("r={}", r_grid[0]), ratios[0], 1.0));
    for i in 1..ratios.len() {
        b.check(Check::le(format!("r={}", r_grid[i]), ratios[i], ratios[i - 1]));
    }
    for (r, q) in r_grid.iter().zip(&ratios) {
        b.ingredient(&format!("ratio_r={r}"), *q, "polar volume over cut function");
    }
    b.series = Some(Series {
        x_label: "r".into(),
        rows: r_grid.iter().zip(&ratios).map(|(&r, &q)| [r, q, 1.0]).collect(),
    });
    Ok(b.finish())
}

fn hkr(ws: &Workspace, e: &VerifierEntry, lambda: Option<f64>) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    ricci_hypothesis(&mut b, ws, k)?;
    let ctx = ws.ctx(k)?;
    let s = ws.samples()?;
    let h1min = s.iter().map(|p| p.h1).fold(f64::INFINITY, f64::min);
    b.ingredient("min_h1", h1min, "boundary geometry");
    if k <= 0.0 {
        let q = (-k).sqrt();
        b.hypothesis.require_ge("H_1 > √(-k)", h1min, q, 0.0);
        if h1min <= q {
            b.hypothesis.fail(format!("H_1 = {h1min:.6e} does not exceed √(-k) = {q:.6e}"));
        }
    }
    if let Some(lam) = lambda {
        b.hypothesis.require_ge("H_1 ≥ λ", h1min, lam, hyp_tol(lam));
        if !ctx.lambda_admissible(lam) {
            b.hypothesis.fail(format!("λ = {lam} is not admissible"));
        }
    }
    if !b.hypothesis.satisfied {
        return Ok(b.finish());
    }
    let (vol, area) = record_measures(&mut b, ws)?;
    let mut rhs = 0.0;
    for p in s {
        rhs += p.weight * ctx.h(ctx.l_of_lambda(p.h1)?)?;
    }
    b.ingredient("mean_curvature_integral", rhs, "boundary quadrature of h_k(l_k(H_1))");
    b.check(Check::le("volume_vs_mean_curvature_integral", vol, rhs));
    if let Some(lam) = lambda {
        b.check(Check::le("volume_area_ratio", vol / area, ctx.h(ctx.l_of_lambda(lam)?)?));
    }
    Ok(b.finish())
}

fn space_form_domain<'a>(ws: &'a Workspace, what: &str) -> Result<&'a SpaceFormDomain> {
    ws.domain()?
        .as_space_form()
        .ok_or_else(|| Error::Domain(format!("{what} needs a domain in a space form")))
}

fn fenchel(ws: &Workspace, e: &VerifierEntry) -> Result<VerificationReport> {
    let mut b = builder(ws, e);
    let sf = space_form_domain(ws, "fenchel")?;
    if sf.n() != 2 {
        return Err(Error::Domain("fenchel needs a curve on a surface".into()));
    }
    if sf.shape.components().len() != 1 {
        b.hypothesis.fail("the boundary must be a single closed curve".into());
        return Ok(b.finish());
    }
    let kk = sf.k();
    let (vol, _) = record_measures(&mut b, ws)?;
    let s = ws.samples()?;
    let kappa = |p: &BoundarySample| p.principal_curvatures[0];
    let kmin = s.iter().map(kappa).fold(f64::INFINITY, f64::min);
    b.ingredient("min_geodesic_curvature", kmin, "boundary geometry");
    let total: f64 = s.iter().map(|p| p.weight * (kappa(p).powi(2) + kk).max(0.0).sqrt()).sum();
    let turning: f64 = s.iter().map(|p| p.weight * kappa(p)).sum();
    b.ingredient("fenchel_integral", total, "boundary quadrature");
    b.ingredient("gauss_bonnet_residual", turning + kk * vol - 2.0 * PI, "boundary and interior quadrature");
    if kk > 0.0 {
        b.check(Check::ge("fenchel_integral", total, 2.0 * PI));
        let area_form: f64 = s.iter().map(|p| p.weight * ((kappa(p).powi(2) + kk).sqrt() - kappa(p))).sum();
        b.check(Check::le("area_form", kk * vol, area_form));
    } else if kk == 0.0 {
        let abs: f64 = s.iter().map(|p| p.weight * kappa(p).abs()).sum();
        b.check(Check::ge("total_absolute_curvature", abs, 2.0 * PI));
    } else {
        let q = (-kk).sqrt();
        b.hypothesis.require_ge("κ > √(-K)", kmin, q, 0.0);
        if kmin <= q {
            b.hypothesis.fail(format!("κ = {kmin:.6e} does not exceed √(-K) = {q:.6e}"));
        }
        b.check(Check::le("fenchel_integral", total, 2.0 * PI));
    }
    Ok(b.finish())
}

fn isodiametric(ws: &Workspace, e: &VerifierEntry) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    let dom = ws.domain()?;
    if let Some(th) = dom.as_torus_hole() {
        let (a, bb) = (th.torus.a, th.torus.b);
        // every point of the torus lies within half the diagonal of the point opposite the hole
        let r = 0.5 * a.hypot(bb);
        let ctx = ws.ctx(k)?;
        let (vol, area) = record_measures(&mut b, ws)?;
        let bound = 1.0 / ctx.h(r)?;
        b.ingredient("metric_ball_radius", r, "torus geometry");
        b.ingredient("ratio_bound", bound, "kernels");
        b.ingredient("achieved_ratio", area / vol, "exact measures");
        b.check(Check::ge("area_volume_ratio_vs_metric_ball", area / vol, bound));
        b.not_applicable(
            "Ω lies in a metric ball but in no geodesic ball; with metric balls the ratio bound fails as the hole shrinks",
        );
        return Ok(b.finish());
    }
    let amb = ws.ambient()?;
    sec_upper_hypothesis(&mut b, ws, k)?;
    let ctx = ws.ctx(k)?;
    let er = ws.extrinsic_radius()?;
    if !er.converged {
        b.note("extrinsic radius optimizer did not converge");
    }
    b.ingredient("rad", er.rad, "minimax over centres");
    b.ingredient("avrad", er.avrad, "mean boundary distance minimization");
    let (l, center) = if k > 0.0 { (er.rad, &er.center) } else { (er.avrad, &er.avrad_center) };
    if k > 0.0 {
        b.hypothesis.require_le("rad ≤ π/√k", l, ctx.conjugate_radius(), 0.0);
    }
    b.hypothesis.require_le("Ω inside a geodesic ball", er.rad, amb.injectivity_radius(), 0.0);
    if !b.hypothesis.satisfied {
        return Ok(b.finish());
    }
    let (vol, area) = record_measures(&mut b, ws)?;
    b.check(Check::ge("area_volume_ratio", area / vol, 1.0 / ctx.h(l)?));
    let c = DVector::from_column_slice(center);
    let mut radial = 0.0;
    for p in ws.samples()? {
        radial += p.weight * ctx.h(amb.distance(&c, &p.point()))?;
    }
    b.check(Check::le("volume_vs_radial_integral", vol, radial));
    Ok(b.finish())
}

fn cheeger(ws: &Workspace, e: &VerifierEntry) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    let sf = space_form_domain(ws, "cheeger")?;
    sec_upper_hypothesis(&mut b, ws, k)?;
    let ctx = ws.ctx(k)?;
    let er = ws.extrinsic_radius()?;
    let l = er.rad;
    if k > 0.0 {
        b.hypothesis.require_le("rad ≤ π/√k", l, ctx.conjugate_radius(), 0.0);
    }
    if !b.hypothesis.satisfied {
        return Ok(b.finish());
    }
    let h = ctx.h(l)?;
    b.ingredient("rad", l, "minimax over centres");
    b.ingredient("cheeger_bound", 1.0 / h, "kernels");
    b.ingredient("lambda1_bound", 1.0 / (4.0 * h * h), "kernels");
    let o = origin(sf.n());
    if !sf.contains(&o) {
        return Err(Error::Domain("test subdomains are centred at the origin, which lies outside Ω".into()));
    }
    let d0 = sf.distance_to_boundary(&o);
    let mut family: Vec<(String, Shape)> =
        [0.3, 0.6, 0.9].iter().map(|f| (format!("ball_{f}"), Shape::Ball { radius: f * d0 })).collect();
    if sf.n() == 2 {
        let side = 0.9 * d0 * 2f64.sqrt();
        family.push(("square".into(), Shape::Rectangle { width: side, height: side }));
        let w = 3.6 * d0 / 5f64.sqrt();
        family.push(("rectangle_2x1".into(), Shape::Rectangle { width: w, height: 0.5 * w }));
    } else {
        let axes = [0.8, 0.6, 0.4].iter().map(|f| f * d0).chain(std::iter::repeat(0.4 * d0)).take(sf.n()).collect();
        family.push(("ellipsoid".into(), Shape::Ellipsoid { axes }));
    }
    for (name, shape) in family {
        let sub = SpaceFormDomain::new(sf.k(), sf.n(), shape)?;
        let m = measures(&sub, &ws.res)?;
        b.check(Check::ge(name, m.boundary_area / m.volume, 1.0 / h));
    }
    Ok(b.finish())
}

fn santalo_yanez(ws: &Workspace, e: &VerifierEntry, radii: &[f64], n: Option<usize>) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    if k > 0.0 {
        b.hypothesis.fail(format!("needs k ≤ 0, got {k}"));
        return Ok(b.finish());
    }
    let n = n.unwrap_or(ws.manifold.dim());
    let ctx = CurvatureContext::new(k, n)?;
    let limit = ctx.h_inverse_limit()?;
    b.ingredient("limit", limit, "kernels");
    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    for &t in radii {
        let dom = SpaceFormDomain::new(k, n, Shape::Ball { radius: t })?;
        let m = measures(&dom, &ws.res)?;
        b.quadrature_error = b.quadrature_error.max(m.volume_error / m.volume).max(m.area_error / m.boundary_area);
        let ratio = m.boundary_area / m.volume;
        let s = dom.boundary_samples(&ws.res)?;
        let mut l_t = Ext::Infinite;
        for p in &s {
            l_t = l_t.min(cut_distance(&dom, p)?);
        }
        let big_l = extrinsic_radius(&dom.space, &s, &[], t).avrad;
        b.check(Check::ge(format!("lower t={t}"), ratio, 1.0 / ctx.h(big_l)?));
        let upper = match l_t {
            Ext::Finite(l) => 1.0 / ctx.h(l)?,
            Ext::Infinite => limit,
        };
        b.check(Check::le(format!("upper t={t}"), ratio, upper));
        let err = (ratio - limit).abs();
        if let Some(p) = prev {
            b.check(Check::le(format!("convergence t={t}"), err, p));
        }
        prev = Some(err);
        b.ingredient(&format!("ratio_t={t}"), ratio, "measures of the geodesic ball");
        rows.push([t, ratio, limit]);
    }
    b.series = Some(Series { x_label: "t".into(), rows });
    Ok(b.finish())
}

fn quermass_ratio(ws: &Workspace, e: &VerifierEntry, i: i32, j: i32) -> Result<VerificationReport> {
    let mut b = builder(ws, e);
    let sf = space_form_domain(ws, "quermass_ratio")?;
    let n = sf.n();
    if !(i >= -1 && i < j && j <= n as i32 - 1) {
        return Err(Error::Validation(format!("need -1 <= i < j <= n-1, got i = {i}, j = {j}, n = {n}")));
    }
    let k = sf.k();
    let ctx = CurvatureContext::new(k, n)?;
    let er = ws.extrinsic_radius()?;
    let l = er.rad;
    b.ingredient("rad", l, "minimax over centres");
    if k > 0.0 {
        let half = 0.5 * ctx.conjugate_radius();
        b.hypothesis.require_le("Ω in an open hemisphere", l, half, 0.0);
        if l >= half {
            b.hypothesis.fail(format!("rad = {l:.6e} is not below π/(2√k)"));
        }
    } else if k < 0.0 {
        b.note("outside proven range: the ratio bound is established for k >= 0 only");
    }
    let s = ws.samples()?;
    if j >= 1 {
        let hj_min = s.iter().map(|p| p.hj[j as usize]).fold(f64::INFINITY, f64::min);
        b.ingredient(&format!("min_H_{j}"), hj_min, "boundary geometry");
        b.hypothesis.require_ge(&format!("H_{j} > 0"), hj_min, 0.0, 0.0);
        if hj_min <= 0.0 {
            b.hypothesis.fail(format!("H_{j} vanishes somewhere"));
        }
    }
    if !b.hypothesis.satisfied {
        return Ok(b.finish());
    }
    let (vol, _) = record_measures(&mut b, ws)?;
    let integral = |idx: i32| -> f64 {
        if idx == -1 {
            n as f64 * vol
        } else {
            s.iter().map(|p| p.weight * p.hj[idx as usize]).sum()
        }
    };
    let model = |idx: i32| -> Result<f64> {
        Ok(if idx == -1 { n as f64 * ctx.ball_volume(l) } else { ctx.ct(l)?.powi(idx) * ctx.sphere_area(l) })
    };
    let (ii, ij) = (integral(i), integral(j));
    b.ingredient(&format!("I_{i}"), ii, "quadrature");
    b.ingredient(&format!("I_{j}"), ij, "quadrature");
    b.check(Check::le(format!("I_{i}/I_{j}"), ii / ij, model(i)? / model(j)?));
    Ok(b.finish())
}

fn weighted(ws: &Workspace, e: &VerifierEntry, weight: &Weight) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    ricci_hypothesis(&mut b, ws, k)?;
    let ctx = ws.ctx(k)?;
    let dom = ws.domain()?;
    let (r_in, _) = dom.inradius(&ws.res)?;
    let phi_min = (1..=64).map(|i| weight.eval(r_in * i as f64 / 64.0)).fold(f64::INFINITY, f64::min);
    b.hypothesis.require_ge("φ > 0 on (0, inradius]", phi_min, 0.0, 0.0);
    if phi_min <= 0.0 {
        b.hypothesis.fail("φ is not positive".into());
        return Ok(b.finish());
    }
    let (_, area) = record_measures(&mut b, ws)?;
    let s = ws.samples_with_cut()?;
    let l = match branch_length(k, s) {
        Ext::Finite(l) => l,
        Ext::Infinite => return Err(Error::Domain("weighted comparison needs a finite cut length".into())),
    };
    let f = |d: f64| weight.eval(d);
    let weighted_volume = dom.interior_integral(&f, &weight.breaks(), &ws.res)?;
    let m = ctx.n as i32 - 1;
    let (model, _) = quadrature::integrate(|r| weight.eval(l - r) * ctx.s(r).powi(m), 0.0, l, 1e-11, 0.0)?;
    let model = unit_sphere_area(ctx.n - 1) * model;
    b.ingredient("l", l, "cut distances");
    b.ingredient("weighted_volume", weighted_volume, "interior quadrature");
    b.ingredient("model_weighted_volume", model, "radial quadrature");
    b.check(Check::le("weighted_ratio", area / weighted_volume, ctx.sphere_area(l) / model));
    Ok(b.finish())
}

fn focal_lower_bound(
    ws: &Workspace,
    e: &VerifierEntry,
    lambda_max: Option<f64>,
    cut_equals_focal: bool,
) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    sec_upper_hypothesis(&mut b, ws, k)?;
    let ctx = ws.ctx(k)?;
    let s = ws.samples_with_focal()?;
    let kmax = s.iter().map(BoundarySample::max_curvature).fold(f64::NEG_INFINITY, f64::max);
    let lam = lambda_max.unwrap_or(kmax);
    b.ingredient("max_principal_curvature", kmax, "boundary geometry");
    b.ingredient("Lambda", lam, "scenario or max curvature");
    b.hypothesis.require_le("principal curvatures ≤ Λ", kmax, lam, hyp_tol(lam));
    if !ctx.lambda_admissible(lam) {
        b.hypothesis.fail(format!("Λ = {lam} is not admissible"));
    }
    if cut_equals_focal && k < 0.0 {
        let q = (-k).sqrt();
        let need = ctx.n as f64 / 2.0;
        let worst = s
            .iter()
            .map(|p| p.principal_curvatures.iter().filter(|&&x| x >= q - 1e-12).count())
            .min()
            .unwrap_or(0);
        b.hypothesis.require_ge("#{κ_i ≥ √(-k)} ≥ n/2", worst as f64, need, 0.0);
    }
    if !b.hypothesis.satisfied {
        return Ok(b.finish());
    }
    let l = ctx.l_of_lambda(lam)?;
    let focal = s.iter().map(|p| p.focal.expect("focal distances are filled")).fold(Ext::Infinite, Ext::min);
    b.ingredient("l_k(Lambda)", l, "kernels");
    b.ingredient_ext("min_focal", focal, "Jacobi transport");
    match focal {
        Ext::Finite(f) => b.check(Check::ge("min_focal_distance", f, l)),
        Ext::Infinite => b.check(Check { name: "min_focal_distance".into(), lhs: f64::MAX, rhs: l, relation: ">=".into(), margin: 1.0 }),
    }
    if cut_equals_focal {
        let (vol, area) = record_measures(&mut b, ws)?;
        b.check(Check::le("model_ratio", ctx.h(l)? * area, vol));
    }
    Ok(b.finish())
}

fn cutlocus_bound(
    ws: &Workspace,
    e: &VerifierEntry,
    point: Option<&[f64]>,
    subdomain_radius: Option<f64>,
) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    let amb = ws.ambient()?;
    if amb.dim() != 2 {
        return Err(Error::Domain("cut loci are computed on surfaces only".into()));
    }
    let total = amb.total_volume().ok_or_else(|| Error::Domain("cutlocus_bound needs a closed surface".into()))?;
    b.hypothesis.require_le("sectional curvature ≤ k", amb.curvature(), k, hyp_tol(k));
    let x0 = match point {
        Some(p) => DVector::from_column_slice(p),
        None => origin(2),
    };
    let locus = point_cut_locus(amb, &x0, ws.res.directions)?;
    b.ingredient("rad", locus.rad, "cut function");
    b.ingredient("cut_locus_measure", locus.measure, "polyline length");
    b.ingredient("total_volume", total, "ambient");
    if locus.measure <= 1e-9 * locus.rad.max(1.0) {
        b.not_applicable("measure-zero cut locus, bound vacuous");
        return Ok(b.finish());
    }
    let ctx = ws.ctx(k)?;
    if k > 0.0 {
        b.hypothesis.require_le("rad(x0) < π/√k", locus.rad, ctx.conjugate_radius(), 0.0);
        if locus.rad >= ctx.conjugate_radius() {
            b.hypothesis.fail("rad(x0) is not below π/√k".into());
        }
    }
    if !b.hypothesis.satisfied {
        return Ok(b.finish());
    }
    let coarse = point_cut_locus(amb, &x0, (ws.res.directions / 2).max(8))?;
    let err = (coarse.measure - locus.measure).abs() / locus.measure + (coarse.rad - locus.rad).abs() / locus.rad;
    b.ingredient("resolution_error", err, "direction grid halving");
    b.quadrature_error = err;
    b.tolerance = b.tolerance.max(err);
    b.check(Check::le("volume_over_twice_cut_measure", total / (2.0 * locus.measure), ctx.h(locus.rad)?));
    if let Some(rho) = subdomain_radius {
        let inj = locus.rho.iter().cloned().fold(f64::INFINITY, f64::min);
        b.hypothesis.require_le("subdomain radius below the cut distance", rho, inj, 0.0);
        if rho < inj {
            let model = CurvatureContext::new(amb.curvature(), 2)?;
            let (vol, area) = (model.ball_volume(rho), model.sphere_area(rho));
            b.check(Check::le("subdomain_ball", vol, ctx.h(rho)? * area));
        }
    }
    Ok(b.finish())
}

fn random_triangles(amb: &dyn Ambient, count: usize, seed: u64, spread: f64) -> Vec<Triangle> {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = amb.dim();
    let o = origin(n);
    let point = |rng: &mut StdRng| {
        let v = DVector::from_iterator(n, (0..n).map(|_| rng.random_range(-1.0..1.0)));
        let r = spread * rng.random_range(0.0f64..1.0).sqrt();
        amb.exp(&o, &v, r)
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (q, p0, p1) = (point(&mut rng), point(&mut rng), point(&mut rng));
        let short = amb.distance(&q, &p0).min(amb.distance(&q, &p1)).min(amb.distance(&p0, &p1));
        if short > 0.05 * spread {
            out.push(Triangle { q, p0, p1 });
        }
    }
    out
}

fn toponogov(
    ws: &Workspace,
    e: &VerifierEntry,
    triangles: &[[Vec<f64>; 3]],
    random: &Option<super::RandomTriangles>,
    t_samples: usize,
) -> Result<VerificationReport> {
    let k = k_of(ws, e);
    let mut b = builder(ws, e);
    let amb = ws.ambient()?;
    let mut tris: Vec<Triangle> = triangles
        .iter()
        .map(|[q, p0, p1]| Triangle {
            q: DVector::from_column_slice(q),
            p0: DVector::from_column_slice(p0),
            p1: DVector::from_column_slice(p1),
        })
        .collect();
    if let Some(r) = random {
        tris.extend(random_triangles(amb, r.count, r.seed, r.spread));
    }
    for (i, tri) in tris.iter().enumerate() {
        add_triangle(&mut b, amb, tri, k, t_samples, &format!("triangle_{i}"))?;
    }
    b.ingredient("triangles", tris.len() as f64, "scenario");
    Ok(b.finish())
}
