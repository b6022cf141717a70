use std::f64::consts::PI;

use isoperimetry::manifold::{
    build_ambient, build_domain, cut_distance, distance_to_boundary_field, exp_normal, focal_distance,
    integrate_geodesic, measures, point_cut_locus, Ambient, BoundarySample, ChartMetric, Domain, FlatTorus,
    ManifoldSpec, Point, ProjectivePlane, Resolution, RotationalDomain, Shape, SpaceForm, SpaceFormDomain,
};
use isoperimetry::suite::Workspace;
use isoperimetry::CurvatureContext;

fn pt(v: &[f64]) -> Point {
    Point::from_column_slice(v)
}

fn res() -> Resolution {
    Resolution::default()
}

fn domain(k: f64, n: usize, shape: Shape) -> SpaceFormDomain {
    SpaceFormDomain::new(k, n, shape).unwrap()
}

fn ball(k: f64, n: usize, r: f64) -> SpaceFormDomain {
    domain(k, n, Shape::Ball { radius: r })
}

#[test]
fn geodesics_on_torus_and_sphere() {
    let t = FlatTorus::new(1.0, 1.0).unwrap();
    let end = t.reduce(&t.exp(&pt(&[0.0, 0.0]), &pt(&[1.0, 0.0]), 2.5));
    assert!((end[0] - 0.5).abs() < 1e-12 && end[1].abs() < 1e-12, "{end}");

    let s2 = SpaceForm::new(1.0, 2).unwrap();
    let x = pt(&[PI / 2.0, 0.0]);
    let y = s2.exp(&x, &pt(&[0.0, 1.0]), PI);
    assert!((s2.distance(&x, &y) - PI).abs() < 1e-9);
    // the chart integrator agrees with the closed-form exponential map and keeps unit speed
    let x0 = pt(&[0.2, -0.1]);
    let v = pt(&[0.3, 0.9]);
    let v = &v / s2.norm(&x0, &v);
    let path = integrate_geodesic(s2.chart(), &[0.2, -0.1], v.as_slice(), 1.0, 0.1).unwrap();
    let closed = s2.exp(&pt(&[0.2, -0.1]), &v, 1.0);
    let last = path.x.last().unwrap();
    assert!((pt(last) - &closed).norm() < 1e-6, "{:?} vs {closed}", last);
    for (x, v) in path.x.iter().zip(&path.v) {
        let g = s2.chart().metric(x);
        let speed = (pt(v).transpose() * &g * pt(v))[(0, 0)].sqrt();
        assert!((speed - 1.0).abs() < 1e-6, "{speed}");
    }
}

#[test]
fn clairaut_relation_on_the_exponential_surface() {
    let d = RotationalDomain::revolution(3.0).unwrap();
    let meridian = integrate_geodesic(&d, &[1.0, 0.4], &[1.0 / d.metric(&[1.0, 0.4])[(0, 0)].sqrt(), 0.0], 1.0, 0.05)
        .unwrap();
    assert!(meridian.x.iter().all(|x| (x[1] - 0.4).abs() < 1e-12));

    let x0 = [1.5, 0.0];
    let g = d.metric(&x0);
    let v0 = [0.6 / g[(0, 0)].sqrt(), 0.8 / g[(1, 1)].sqrt()];
    let path = integrate_geodesic(&d, &x0, &v0, 0.8, 0.02).unwrap();
    let clairaut = |x: &[f64], v: &[f64]| d.metric(x)[(1, 1)] * v[1];
    let c0 = clairaut(&x0, &v0);
    for (x, v) in path.x.iter().zip(&path.v) {
        assert!((clairaut(x, v) - c0).abs() < 1e-9);
        let g = d.metric(x);
        let speed = (g[(0, 0)] * v[0] * v[0] + g[(1, 1)] * v[1] * v[1]).sqrt();
        assert!((speed - 1.0).abs() < 1e-9);
    }
}

#[test]
fn normal_exponential_transport() {
    for n in [2, 3] {
        let d = ball(0.0, n, 1.0);
        let p = &d.boundary_samples(&res()).unwrap()[0];
        let tr = exp_normal(&d, p, 1.0).unwrap();
        assert_eq!(tr.f_at(0.0), 1.0);
        for t in [0.1, 0.4, 0.8] {
            assert!((tr.f_at(t) - (1.0 - t).powi(n as i32 - 1)).abs() < 1e-8, "n={n} t={t}");
        }
    }
    for (k, l) in [(1.0, 1.2), (-1.0, 0.9)] {
        let d = ball(k, 3, l);
        let p = &d.boundary_samples(&res()).unwrap()[3];
        let tr = exp_normal(&d, p, l).unwrap();
        let ctx = CurvatureContext::new(k, 3).unwrap();
        let lam = ctx.lambda_of_l(l).unwrap();
        for t in [0.2, 0.5, 0.8] {
            assert!((tr.f_at(t) - ctx.sigma(lam, t).powi(2)).abs() < 1e-8, "k={k} t={t}");
        }
    }
}

#[test]
fn transport_obeys_the_first_variation_and_riccati_comparison() {
    let d = domain(0.0, 2, Shape::Ellipsoid { axes: vec![2.0, 1.0] });
    for p in d.boundary_samples(&res()).unwrap().iter().step_by(7) {
        let tr = exp_normal(&d, p, 0.4).unwrap();
        for i in 1..tr.t.len() - 1 {
            let (t0, t1) = (tr.t[i - 1], tr.t[i + 1]);
            if t1 - t0 < 1e-6 {
                continue;
            }
            let fd = (tr.f[i + 1] - tr.f[i - 1]) / (t1 - t0);
            let tol = 1e-3 * (1.0 + fd.abs()) + 10.0 * (t1 - t0).powi(2);
            assert!((fd + tr.ht[i] * tr.f[i]).abs() < tol, "F' = {fd}, −H F = {}", -tr.ht[i] * tr.f[i]);
        }
        // f = F here (n = 2); flat ambient gives f'' ≤ 0
        let h = 0.01;
        for t in [0.05, 0.15, 0.25] {
            let dd = (tr.f_at(t + h) - 2.0 * tr.f_at(t) + tr.f_at(t - h)) / (h * h);
            assert!(dd <= 1e-4, "{dd}");
        }
    }
}

#[test]
fn cut_distance_examples() {
    let annulus = domain(0.0, 2, Shape::Annulus { inner: 1.0, outer: 2.0 });
    for p in annulus.boundary_samples(&res()).unwrap().iter().step_by(5) {
        assert!((cut_distance(&annulus, p).unwrap().to_f64() - 0.5).abs() < 1e-4);
    }
    let b = ball(0.0, 2, 1.3);
    let p = &b.boundary_samples(&res()).unwrap()[0];
    assert!((cut_distance(&b, p).unwrap().to_f64() - 1.3).abs() < 1e-4);
    let cap = ball(1.0, 2, 2.0);
    for p in cap.boundary_samples(&res()).unwrap().iter().step_by(9) {
        let c = cut_distance(&cap, p).unwrap().to_f64();
        assert!((c - 2.0).abs() < 1e-4);
        assert!(c < PI - 1e-4);
    }
}

#[test]
fn focal_distance_examples() {
    let b = ball(0.0, 3, 0.7);
    let p = &b.boundary_samples(&res()).unwrap()[2];
    assert!((focal_distance(&b, p).unwrap().to_f64() - 0.7).abs() < 1e-6);

    let ell = domain(0.0, 2, Shape::Ellipsoid { axes: vec![2.0, 1.0] });
    for p in ell.boundary_samples(&res()).unwrap() {
        let lam = p.max_curvature();
        assert!(focal_distance(&ell, &p).unwrap().to_f64() >= 1.0 / lam - 1e-6);
    }
    // minor-axis end: the evolute point (0, 1 − a²/b) is at distance a²/b = 4
    let tip = BoundarySample::new(pt(&[0.0, 1.0]), pt(&[0.0, -1.0]), vec![0.25], 1.0);
    assert!((focal_distance(&ell, &tip).unwrap().to_f64() - 4.0).abs() < 1e-6);
}

#[test]
fn boundary_geometry_examples() {
    let r = 1.7;
    for p in ball(0.0, 3, r).boundary_samples(&res()).unwrap() {
        assert!(p.principal_curvatures.iter().all(|k| (k - 1.0 / r).abs() < 1e-10));
        assert!((p.h1 - 1.0 / r).abs() < 1e-10 && (p.hj[2] - 1.0 / (r * r)).abs() < 1e-10);
        assert!((p.h - p.principal_curvatures.iter().sum::<f64>()).abs() <= 1e-8 * p.h.abs());
    }
    let l = 0.8;
    for p in ball(1.0, 2, l).boundary_samples(&res()).unwrap() {
        assert!((p.principal_curvatures[0] - 1.0 / l.tan()).abs() < 1e-10);
    }
    // 1:1:2 spheroid near the equator: meridian curvature of x² + z²/4 = 1 and the parallel
    // curvature from the horizontal part of the normal; both reduce to (1/4, 1) at z = 0
    let sph = domain(0.0, 3, Shape::Ellipsoid { axes: vec![1.0, 1.0, 2.0] });
    let samples = sph.boundary_samples(&res()).unwrap();
    let near = samples.iter().min_by(|a, b| a.point[2].abs().total_cmp(&b.point[2].abs())).unwrap();
    let z = near.point[2];
    assert!(z.abs() < 0.2);
    let x2 = 1.0 - z * z / 4.0;
    let q = x2 + z * z / 16.0;
    let (km, kp) = (1.0 / (4.0 * q.powf(1.5)), 1.0 / q.sqrt());
    let got = &near.principal_curvatures;
    assert!((got[0] - km).abs() < 1e-8 && (got[1] - kp).abs() < 1e-8, "{got:?} vs {km} {kp}");
    assert!((km - 0.25).abs() < 0.02 && (kp - 1.0).abs() < 0.02);
    // H_j convention
    for p in samples.iter().step_by(11) {
        let (a, b) = (p.principal_curvatures[0], p.principal_curvatures[1]);
        assert!((p.hj[0] - 1.0).abs() < 1e-15);
        assert!((p.hj[1] - 0.5 * (a + b)).abs() < 1e-12 && (p.hj[2] - a * b).abs() < 1e-12);
    }
}

#[test]
fn curvature_bound_examples() {
    let hole = build_domain(&ManifoldSpec::FlatTorus {
        a: 1.0,
        b: 1.0,
        hole: Some(isoperimetry::manifold::spec::Hole { center: [0.5, 0.5], radius: 0.1 }),
    })
    .unwrap();
    let c = hole.curvature_bounds(&res());
    assert!(c.ric_lower.abs() < 1e-9 && c.sec_upper.abs() < 1e-9 && c.sec_lower.abs() < 1e-9);
    let cap = ball(1.0, 2, 1.0);
    let c = cap.curvature_bounds(&res());
    assert!((c.sec_upper - 1.0).abs() < 1e-6 && (c.sec_lower - 1.0).abs() < 1e-6 && (c.ric_lower - 1.0).abs() < 1e-6);
    for l in [3.0, 5.0, 8.0] {
        let c = RotationalDomain::revolution(l).unwrap().curvature_bounds(&res());
        assert!(c.sec_upper < 0.0, "L={l}");
    }
}

#[test]
fn measure_examples() {
    let m = measures(&ball(0.0, 3, 1.0), &res()).unwrap();
    assert!((m.volume - 4.0 * PI / 3.0).abs() < 1e-8 && (m.boundary_area - 4.0 * PI).abs() < 1e-8);
    let m = measures(&ball(-1.0, 2, 1.0), &res()).unwrap();
    let ctx = CurvatureContext::new(-1.0, 2).unwrap();
    assert!((m.volume - 2.0 * PI * (1f64.cosh() - 1.0)).abs() < 1e-8);
    assert!((m.volume - ctx.ball_volume(1.0)).abs() < 1e-8);
    assert!((m.boundary_area - 2.0 * PI * 1f64.sinh()).abs() < 1e-8);
    assert_eq!(FlatTorus::new(1.0, 1.0).unwrap().total_volume(), Some(1.0));
    let ell = measures(&domain(0.0, 3, Shape::Ellipsoid { axes: vec![1.0, 1.0, 2.0] }), &res()).unwrap();
    assert!((ell.volume - 8.0 * PI / 3.0).abs() < 1e-6);
}

#[test]
fn point_cut_locus_examples() {
    let torus = FlatTorus::new(1.0, 1.0).unwrap();
    let o = pt(&[0.0, 0.0]);
    let l = point_cut_locus(&torus, &o, 512).unwrap();
    assert!((l.measure - 2.0).abs() < 1e-2 && (l.rad - 0.5f64.sqrt()).abs() < 1e-6, "{} {}", l.measure, l.rad);
    for c in &l.curves {
        for p in c {
            let on = |v: f64| (v.rem_euclid(1.0) - 0.5).abs() < 1e-6;
            assert!(on(p.point[0]) || on(p.point[1]));
        }
    }
    let rp2 = ProjectivePlane::new(1.0).unwrap();
    let l = point_cut_locus(&rp2, &pt(&[0.3, -0.2]), 512).unwrap();
    assert!((l.measure - PI).abs() < 1e-2 && (l.rad - PI / 2.0).abs() < 1e-6, "{} {}", l.measure, l.rad);
    let s2 = SpaceForm::new(1.0, 2).unwrap();
    let l = point_cut_locus(&s2, &o, 256).unwrap();
    assert!(l.measure.abs() < 1e-9 && (l.rad - PI).abs() < 1e-9);
}

#[test]
fn torus_cut_locus_converges_at_first_order() {
    let torus = FlatTorus::new(1.0, 1.3).unwrap();
    let x0 = pt(&[0.1, 0.2]);
    let exact = 1.0 + 1.3;
    let errs: Vec<f64> = [32, 64, 128, 256]
        .iter()
        .map(|&n| (point_cut_locus(&torus, &x0, n).unwrap().measure - exact).abs())
        .collect();
    for (e, n) in errs.iter().zip([32.0, 64.0, 128.0, 256.0]) {
        assert!(*e <= 4.0 / n, "{errs:?}");
    }
}

#[test]
fn extrinsic_radius_examples() {
    let ws = |m: ManifoldSpec| Workspace::new("r", m, None, 0.0, res(), 1e-4);
    let er = ws(ManifoldSpec::ModelBall { k: 0.0, n: 3, radius: 1.4 }).extrinsic_radius().unwrap().clone();
    assert!((er.rad - 1.4).abs() < 1e-6 && (er.avrad - 1.4).abs() < 1e-6 && er.avrad <= er.rad + 1e-9);
    let rect = ManifoldSpec::EuclideanDomain { n: 2, shape: Shape::Rectangle { width: 2.0, height: 1.0 } };
    let er = ws(rect).extrinsic_radius().unwrap().clone();
    assert!((er.rad - 5f64.sqrt() / 2.0).abs() < 1e-6, "{}", er.rad);
    let er = ws(ManifoldSpec::ModelBall { k: -1.0, n: 2, radius: 1.1 }).extrinsic_radius().unwrap().clone();
    assert!((er.rad - 1.1).abs() < 1e-6);
}

#[test]
fn distance_field_examples() {
    let b = ball(0.0, 2, 1.0);
    assert!((distance_to_boundary_field(&b, &[pt(&[0.0, 0.0])])[0] - 1.0).abs() < 1e-12);
    let a = domain(0.0, 2, Shape::Annulus { inner: 1.0, outer: 2.0 });
    assert!((distance_to_boundary_field(&a, &[pt(&[1.3, 0.0])])[0] - 0.3).abs() < 1e-12);
    let full = b.interior_integral(&|d| if d <= 1.0 { 1.0 } else { 0.0 }, &[1.0], &res()).unwrap();
    assert!((full - PI).abs() < 1e-8);
}

#[test]
fn ambients_from_specs() {
    let t = build_ambient(&ManifoldSpec::FlatTorus { a: 1.0, b: 2.0, hole: None }).unwrap();
    assert_eq!(t.curvature(), 0.0);
    assert!((t.distance(&pt(&[0.1, 0.1]), &pt(&[0.9, 1.9])) - (0.2f64 * 0.2 + 0.2 * 0.2).sqrt()).abs() < 1e-12);
    let rp2 = build_ambient(&ManifoldSpec::ProjectivePlane { radius: 1.0 }).unwrap();
    assert!(rp2.distance(&pt(&[0.0, 0.0]), &pt(&[PI - 1e-3, 0.0])) < 1e-2);
    assert!(build_domain(&ManifoldSpec::SpaceForm { k: 1.0, n: 2 }).is_err());
}

#[test]
fn mean_curvature_is_bounded_by_the_cut_distance() {
    // H(p) ≤ (n−1) λ_k(c(p)) when Ric ≥ (n−1)k, with equality at the spheroid poles
    let cases = [
        domain(0.0, 2, Shape::Ellipsoid { axes: vec![2.0, 1.0] }),
        domain(0.0, 2, Shape::Annulus { inner: 1.0, outer: 2.0 }),
        domain(0.0, 3, Shape::Ellipsoid { axes: vec![1.0, 1.0, 1.5] }),
        ball(-1.0, 2, 1.2),
        ball(1.0, 3, 1.0),
    ];
    for d in &cases {
        let k = d.curvature_bounds(&res()).ric_lower;
        let ctx = CurvatureContext::new(k, d.dim()).unwrap();
        for p in d.boundary_samples(&res()).unwrap().iter().step_by(3) {
            let c = cut_distance(d, p).unwrap().to_f64();
            let bound = (d.dim() - 1) as f64 * ctx.lambda_of_l(c).unwrap();
            assert!(p.h <= bound + 1e-7 * bound.abs().max(1.0), "H {} > {bound} at {:?}", p.h, p.point);
        }
    }
}
