use isoperimetry::fk::SampledFunction;

/// State (f, f') advanced by RK4 under f'' = −k f − g(t).
fn step(k: f64, g: &impl Fn(f64) -> f64, t: f64, (f, d): (f64, f64), h: f64) -> (f64, f64) {
    let rhs = |t: f64, f: f64, d: f64| (d, -k * f - g(t));
    let (a1, b1) = rhs(t, f, d);
    let (a2, b2) = rhs(t + 0.5 * h, f + 0.5 * h * a1, d + 0.5 * h * b1);
    let (a3, b3) = rhs(t + 0.5 * h, f + 0.5 * h * a2, d + 0.5 * h * b2);
    let (a4, b4) = rhs(t + h, f + h * a3, d + h * b3);
    (f + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4), d + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4))
}

/// First zero l of the solution with f(0) = 1, f'(0) = d0, and f sampled on [0, l].
pub fn generated(k: f64, d0: f64, g: impl Fn(f64) -> f64) -> Option<(f64, SampledFunction)> {
    let h = 1e-3;
    let (mut t, mut y) = (0.0, (1.0, d0));
    while y.0 > 0.0 {
        if t > 20.0 {
            return None;
        }
        let next = step(k, &g, t, y, h);
        if next.0 <= 0.0 {
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if step(k, &g, t, y, mid).0 > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let l = t + lo;
            let m = 200;
            let sub = 20;
            let dt = l / (m * sub) as f64;
            let (mut s, mut state) = (0.0, (1.0, d0));
            let mut grid = vec![0.0];
            let mut values = vec![1.0];
            for i in 1..=m {
                for _ in 0..sub {
                    state = step(k, &g, s, state, dt);
                    s += dt;
                }
                grid.push(l * i as f64 / m as f64);
                values.push(if i == m { state.0.max(0.0) } else { state.0 });
            }
            return Some((l, SampledFunction::new(grid, values).unwrap()));
        }
        y = next;
        t += h;
    }
    None
}

