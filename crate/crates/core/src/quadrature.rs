//! Quadrature rules: adaptive Gauss–Kronrod (7/15) and composite Gauss–Legendre panels.

use std::collections::BinaryHeap;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel; returns (estimate, error estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

#[derive(PartialEq)]
struct Panel {
    err: f64,
    a: f64,
    b: f64,
    val: f64,
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Adaptive Gauss–Kronrod integration with global error control.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rtol: f64, atol: f64) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (val, err) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { err, a, b, val });
    let (mut total, mut total_err) = (val, err);
    for _ in 0..4000 {
        if total_err <= atol.max(rtol * total.abs()) {
            return Ok((total, total_err));
        }
        let worst = heap.pop().expect("heap never empties");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, m);
        let (v2, e2) = gk15(&f, m, worst.b);
        total += v1 + v2 - worst.val;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { err: e1, a: worst.a, b: m, val: v1 });
        heap.push(Panel { err: e2, a: m, b: worst.b, val: v2 });
    }
    // re-sum to shed accumulated rounding in the running totals
    let total: f64 = heap.iter().map(|p| p.val).sum();
    let total_err: f64 = heap.iter().map(|p| p.err).sum();
    if total_err <= 10.0 * atol.max(rtol * total.abs()) {
        Ok((total, total_err))
    } else {
        Err(Error::NonConvergence(format!(
            "adaptive quadrature on [{a}, {b}] stalled at error {total_err:e}"
        )))
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GlRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GlRule {
    pub fn new(order: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(order.max(1)).expect("order >= 1"));
        let (nodes, weights) = rule.as_node_weight_pairs().iter().copied().unzip();
        GlRule { nodes, weights }
    }

    /// Nodes and weights of the composite rule over the given breakpoints.
    pub fn composite(&self, breaks: &[f64]) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.nodes.len() * breaks.len().saturating_sub(1));
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, wt) in self.nodes.iter().zip(&self.weights) {
                out.push((c + h * x, h * wt));
            }
        }
        out
    }

    /// Composite rule with `panels` equal panels on [a, b].
    pub fn panels(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        self.composite(&uniform_breaks(a, b, panels))
    }
}

pub fn uniform_breaks(a: f64, b: f64, panels: usize) -> Vec<f64> {
    let p = panels.max(1);
    (0..=p).map(|i| a + (b - a) * i as f64 / p as f64).collect()
}

/// Uniform panels on [a, b] with the extra breakpoints merged in.
pub fn breaks_with(a: f64, b: f64, panels: usize, extra: &[f64]) -> Vec<f64> {
    let mut br = uniform_breaks(a, b, panels);
    br.extend(extra.iter().copied().filter(|&x| x > a && x < b));
    br.sort_by(f64::total_cmp);
    let tol = 1e-12 * (b - a).abs();
    br.dedup_by(|x, y| (*x - *y).abs() <= tol);
    br
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_panel_is_exact_for_polynomials() {
        let (v, e) = gk15(&|x: f64| x.powi(7) - 3.0 * x * x, -1.0, 2.0);
        let exact = (256.0 - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-12);
        assert!(e < 1e-10);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let (v, _) = integrate(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-12, 0.0).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn composite_gauss_legendre() {
        let rule = GlRule::new(6);
        let s: f64 = rule.panels(0.0, PI, 4).iter().map(|&(x, w)| w * x.sin()).sum();
        assert!((s - 2.0).abs() < 1e-13);
    }

    #[test]
    fn breakpoints_merge() {
        let br = breaks_with(0.0, 1.0, 2, &[0.25, 0.5, 1.5]);
        assert_eq!(br, vec![0.0, 0.25, 0.5, 1.0]);
    }
}
