//! Thin wrappers over argmin for the derivative-free searches used by the engine.

use argmin::core::{CostFunction, Error as ArgminError, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::brent::BrentOpt;
use argmin::solver::neldermead::NelderMead;

struct Cost<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Cost<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> Result<f64, ArgminError> {
        Ok((self.0)(p))
    }
}

struct Cost1<F>(F);

impl<F: Fn(f64) -> f64> CostFunction for Cost1<F> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, p: &f64) -> Result<f64, ArgminError> {
        Ok((self.0)(*p))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

/// Nelder–Mead from x0 with an axis-aligned initial simplex of the given step.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, tol: f64, max_iter: u64) -> Minimum {
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut p = x0.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let fallback = Minimum { value: f(x0), x: x0.to_vec(), converged: false };
    let Ok(solver) = NelderMead::new(simplex).with_sd_tolerance(tol) else {
        return fallback;
    };
    match Executor::new(Cost(&f), solver).configure(|s| s.max_iters(max_iter)).run() {
        Ok(res) => {
            let st = res.state();
            let converged = matches!(
                st.get_termination_status(),
                TerminationStatus::Terminated(TerminationReason::SolverConverged)
            );
            match st.get_best_param() {
                Some(x) => Minimum { x: x.clone(), value: st.get_best_cost(), converged },
                None => fallback,
            }
        }
        Err(_) => fallback,
    }
}

/// Brent minimization on [a, b]; returns (argmin, min).
pub fn brent_min(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let solver = BrentOpt::new(a, b).set_tolerance(tol, 1e-15);
    match Executor::new(Cost1(&f), solver).configure(|s| s.max_iters(200)).run() {
        Ok(res) => {
            let st = res.state();
            let x = st.get_best_param().copied().unwrap_or(0.5 * (a + b));
            (x, st.get_best_cost())
        }
        Err(_) => {
            let x = 0.5 * (a + b);
            (x, f(x))
        }
    }
}

/// Brent root of f on [a, b] where f changes sign.
pub fn brent_root(f: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> Option<f64> {
    let mut conv = roots::SimpleConvergency { eps, max_iter: 200 };
    roots::find_root_brent(a, b, &f, &mut conv).ok()
}
