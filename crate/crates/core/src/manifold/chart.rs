//! Riemannian metrics given by components on a single chart: Christoffel symbols,
//! the geodesic ODE and finite-difference curvature.

use nalgebra::{DMatrix, DVector};
use ode_solvers::{Dopri5, System};

use crate::error::{Error, Result};

pub trait ChartMetric: Sync {
    fn dim(&self) -> usize;

    fn metric(&self, x: &[f64]) -> DMatrix<f64>;

    /// ∂_k g for k = 0..dim; central differences unless overridden.
    fn metric_derivatives(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let h = 1e-5;
        (0..self.dim())
            .map(|k| {
                let mut a = x.to_vec();
                let mut b = x.to_vec();
                a[k] += h;
                b[k] -= h;
                (self.metric(&a) - self.metric(&b)) / (2.0 * h)
            })
            .collect()
    }

    /// Whether x lies in the region where the chart is valid.
    fn contains(&self, _x: &[f64]) -> bool {
        true
    }
}

/// Γ^i_{jk}, returned as one matrix per upper index i.
pub fn christoffel(m: &dyn ChartMetric, x: &[f64]) -> Vec<DMatrix<f64>> {
    let n = m.dim();
    let ginv = m.metric(x).try_inverse().expect("metric is positive definite");
    let dg = m.metric_derivatives(x);
    // Γ_{l,jk} = ½(∂_j g_lk + ∂_k g_lj − ∂_l g_jk)
    let mut low = vec![DMatrix::zeros(n, n); n];
    for (l, lo) in low.iter_mut().enumerate() {
        for j in 0..n {
            for k in 0..n {
                lo[(j, k)] = 0.5 * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]);
            }
        }
    }
    (0..n)
        .map(|i| {
            let mut g = DMatrix::zeros(n, n);
            for (l, lo) in low.iter().enumerate() {
                g += lo * ginv[(i, l)];
            }
            g
        })
        .collect()
}

/// R^i_{jkl} with R(∂_k, ∂_l)∂_j = R^i_{jkl} ∂_i, by central differences of Γ.
fn riemann(m: &dyn ChartMetric, x: &[f64]) -> Vec<Vec<Vec<Vec<f64>>>> {
    let n = m.dim();
    let h = 1e-4;
    let gam = christoffel(m, x);
    let dgam: Vec<Vec<DMatrix<f64>>> = (0..n)
        .map(|k| {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[k] += h;
            b[k] -= h;
            let (ga, gb) = (christoffel(m, &a), christoffel(m, &b));
            (0..n).map(|i| (&ga[i] - &gb[i]) / (2.0 * h)).collect()
        })
        .collect();
    let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = dgam[k][i][(l, j)] - dgam[l][i][(k, j)];
                    for p in 0..n {
                        v += gam[i][(k, p)] * gam[p][(l, j)] - gam[i][(l, p)] * gam[p][(k, j)];
                    }
                    r[i][j][k][l] = v;
                }
            }
        }
    }
    r
}

/// Sectional curvature of the plane spanned by u, v at x.
pub fn sectional_curvature(m: &dyn ChartMetric, x: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let n = m.dim();
    let g = m.metric(x);
    let r = riemann(m, x);
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += g[(i, j)] * a[i] * b[j];
            }
        }
        s
    };
    // R(u, v)v
    let mut w = vec![0.0; n];
    for (i, wi) in w.iter_mut().enumerate() {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    *wi += r[i][j][k][l] * v[j] * u[k] * v[l];
                }
            }
        }
    }
    ip(&w, u) / (ip(u, u) * ip(v, v) - ip(u, v).powi(2))
}

/// Smallest and largest sectional curvature over the coordinate planes and their
/// diagonal mixtures, plus the smallest Ricci eigenvalue relative to g.
pub fn curvature_at(m: &dyn ChartMetric, x: &[f64]) -> (f64, f64, f64) {
    let n = m.dim();
    let g = m.metric(x);
    let r = riemann(m, x);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let basis = |i: usize| {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        e
    };
    let mut planes = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            planes.push((basis(a), basis(b)));
            if n > 2 {
                for c in 0..n {
                    if c != a && c != b {
                        let mut u = basis(a);
                        u[c] = 1.0;
                        planes.push((u, basis(b)));
                    }
                }
            }
        }
    }
    for (u, v) in &planes {
        let k = sectional_from(&g, &r, u, v);
        lo = lo.min(k);
        hi = hi.max(k);
    }
    // Ric_{jl} = R^i_{jil}
    let mut ric = DMatrix::zeros(n, n);
    for j in 0..n {
        for l in 0..n {
            ric[(j, l)] = (0..n).map(|i| r[i][j][i][l]).sum();
        }
    }
    let chol = g.clone().cholesky().expect("metric is positive definite");
    let linv = chol.l().try_inverse().expect("invertible factor");
    let sym = &linv * ric * linv.transpose();
    let sym = (&sym + sym.transpose()) * 0.5;
    let ric_min = sym.symmetric_eigenvalues().min();
    (lo, hi, ric_min)
}

fn sectional_from(g: &DMatrix<f64>, r: &[Vec<Vec<Vec<f64>>>], u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += g[(i, j)] * a[i] * b[j];
            }
        }
        s
    };
    let mut w = vec![0.0; n];
    for (i, wi) in w.iter_mut().enumerate() {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    *wi += r[i][j][k][l] * v[j] * u[k] * v[l];
                }
            }
        }
    }
    ip(&w, u) / (ip(u, u) * ip(v, v) - ip(u, v).powi(2))
}

pub fn norm(m: &dyn ChartMetric, x: &[f64], v: &[f64]) -> f64 {
    let g = m.metric(x);
    let v = DVector::from_column_slice(v);
    (v.transpose() * g * &v)[(0, 0)].sqrt()
}

struct GeodesicSystem<'a> {
    m: &'a dyn ChartMetric,
    exited: Option<f64>,
}

impl System<f64, ode_solvers::DVector<f64>> for GeodesicSystem<'_> {
    fn system(&self, _t: f64, y: &ode_solvers::DVector<f64>, dy: &mut ode_solvers::DVector<f64>) {
        let n = self.m.dim();
        let x: Vec<f64> = y.iter().take(n).copied().collect();
        let gam = christoffel(self.m, &x);
        for i in 0..n {
            dy[i] = y[n + i];
            let mut a = 0.0;
            for j in 0..n {
                for k in 0..n {
                    a += gam[i][(j, k)] * y[n + j] * y[n + k];
                }
            }
            dy[n + i] = -a;
        }
    }

    fn solout(&mut self, t: f64, y: &ode_solvers::DVector<f64>, _dy: &ode_solvers::DVector<f64>) -> bool {
        let n = self.m.dim();
        let x: Vec<f64> = y.iter().take(n).copied().collect();
        if !self.m.contains(&x) {
            self.exited = Some(t);
            return true;
        }
        false
    }
}

/// Sampled geodesic: times, positions and velocities in chart coordinates.
#[derive(Debug, Clone)]
pub struct ChartPath {
    pub t: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

/// Integrates the geodesic equation with adaptive Dormand–Prince steps.
pub fn integrate_geodesic(m: &dyn ChartMetric, x: &[f64], v: &[f64], t_end: f64, dt_out: f64) -> Result<ChartPath> {
    let n = m.dim();
    let mut y0 = ode_solvers::DVector::zeros(2 * n);
    for i in 0..n {
        y0[i] = x[i];
        y0[n + i] = v[i];
    }
    let sys = GeodesicSystem { m, exited: None };
    let mut solver = Dopri5::new(sys, 0.0, t_end, dt_out.min(t_end), y0, 1e-11, 1e-12);
    solver.integrate().map_err(|e| Error::Integration(format!("{e:?}")))?;
    let mut path = ChartPath { t: Vec::new(), x: Vec::new(), v: Vec::new() };
    for (t, y) in solver.x_out().iter().zip(solver.y_out()) {
        let p: Vec<f64> = y.iter().take(n).copied().collect();
        if !m.contains(&p) {
            return Err(Error::ChartExit { t: *t });
        }
        path.t.push(*t);
        path.x.push(p);
        path.v.push(y.iter().skip(n).copied().collect());
    }
    if path.t.last().is_none_or(|&t| t < t_end * (1.0 - 1e-12)) {
        return Err(Error::ChartExit { t: path.t.last().copied().unwrap_or(0.0) });
    }
    Ok(path)
}
