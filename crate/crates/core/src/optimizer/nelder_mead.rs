//! Derivative-free minimization with the adaptive Nelder-Mead simplex.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Function-value spread over the simplex fell below the tolerance.
    FunctionSpread,
    /// All vertices coincide to machine precision.
    SimplexCollapsed,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimReport<T = f64> {
    pub best_params: Vec<T>,
    /// Objective value at `best_params` (the minimized quantity).
    pub best_value: T,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub restarts_used: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions<T = f64> {
    /// Convergence threshold on `max f - min f` over the simplex.
    pub tol: T,
    /// Iteration budget per run.
    pub max_iter: usize,
    /// Fresh-simplex restarts from the incumbent before giving up.
    pub restarts: usize,
    /// Per-coordinate edge lengths of the initial simplex; 0.1 each when `None`.
    pub steps: Option<Vec<T>>,
}

impl<T: Scalar> Default for NelderMeadOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-8),
            max_iter: 5000,
            restarts: 3,
            steps: None,
        }
    }
}

fn sanitize<T: Scalar>(v: T) -> T {
    if v.is_finite() {
        v
    } else {
        T::infinity()
    }
}

struct Run<T> {
    x: Vec<T>,
    f: T,
    iterations: usize,
    evaluations: usize,
    termination: Termination,
}

fn run_once<T: Scalar, F: FnMut(&[T]) -> T>(
    f: &mut F,
    x0: &[T],
    steps: &[T],
    tol: T,
    max_iter: usize,
) -> Result<Run<T>> {
    let n = x0.len();
    let nf = T::from_usize_lossy(n.max(1));
    // adaptive coefficients (Gao & Han), reducing to the classic ones for n = 2
    let rho = T::one();
    let chi = T::one() + T::lit(2.0) / nf;
    let gamma = T::lit(0.75) - T::lit(0.5) / nf;
    let sigma = T::one() - T::one() / nf;

    let mut evaluations = 0usize;
    let mut eval = |x: &[T], evaluations: &mut usize| {
        *evaluations += 1;
        sanitize(f(x))
    };

    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evaluations)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let fx = eval(&x, &mut evaluations);
        simplex.push((x, fx));
    }
    if simplex.iter().all(|(_, fx)| !fx.is_finite()) {
        return Err(Error::NonFiniteObjective);
    }

    let order = |s: &mut Vec<(Vec<T>, T)>| {
        s.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    };

    let mut iterations = 0;
    let termination = loop {
        order(&mut simplex);
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if worst - best < tol {
            break Termination::FunctionSpread;
        }
        let collapsed = simplex[1..].iter().all(|(x, _)| {
            x.iter()
                .zip(&simplex[0].0)
                .all(|(a, b)| (*a - *b).abs() <= T::epsilon() * (T::one() + b.abs()))
        });
        if collapsed {
            break Termination::SimplexCollapsed;
        }
        if iterations >= max_iter {
            break Termination::MaxIterations;
        }
        iterations += 1;

        let mut centroid = vec![T::zero(); n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += *xi / nf;
            }
        }
        let along = |coef: T| -> Vec<T> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| *c + coef * (*c - *w))
                .collect()
        };

        let xr = along(rho);
        let fr = eval(&xr, &mut evaluations);
        if fr < simplex[0].1 {
            let xe = along(rho * chi);
            let fe = eval(&xe, &mut evaluations);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(rho * gamma);
            let fc = eval(&xc, &mut evaluations);
            (xc, fc)
        } else {
            let xc = along(-gamma);
            let fc = eval(&xc, &mut evaluations);
            (xc, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        // shrink towards the best vertex
        let xb = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            let x: Vec<T> = xb
                .iter()
                .zip(&v.0)
                .map(|(b, xi)| *b + sigma * (*xi - *b))
                .collect();
            let fx = eval(&x, &mut evaluations);
            *v = (x, fx);
        }
    };
    order(&mut simplex);
    let (x, f) = simplex.swap_remove(0);
    Ok(Run {
        x,
        f,
        iterations,
        evaluations,
        termination,
    })
}

/// Minimizes `f` from `x0`, restarting from the incumbent with a fresh simplex
/// until a restart converges without improving by more than `tol`.
pub fn nelder_mead_with<T: Scalar, F: FnMut(&[T]) -> T>(
    mut f: F,
    x0: &[T],
    opts: &NelderMeadOptions<T>,
) -> Result<OptimReport<T>> {
    let steps = match &opts.steps {
        Some(s) if s.len() == x0.len() => s.clone(),
        Some(_) => return Err(Error::Size("simplex step count differs from dimension".into())),
        None => vec![T::lit(0.1); x0.len()],
    };
    let mut run = run_once(&mut f, x0, &steps, opts.tol, opts.max_iter)?;
    let mut iterations = run.iterations;
    let mut evaluations = run.evaluations;
    let mut restarts_used = 0;
    let mut settled = false;
    while restarts_used < opts.restarts {
        restarts_used += 1;
        let next = run_once(&mut f, &run.x, &steps, opts.tol, opts.max_iter)?;
        iterations += next.iterations;
        evaluations += next.evaluations;
        let improvement = run.f - next.f;
        let next_converged = next.termination != Termination::MaxIterations;
        if next.f <= run.f {
            run = next;
        }
        if next_converged && improvement < opts.tol {
            settled = true;
            break;
        }
    }
    let converged = settled || (opts.restarts == 0 && run.termination != Termination::MaxIterations);
    Ok(OptimReport {
        best_params: run.x,
        best_value: run.f,
        iterations,
        evaluations,
        converged,
        restarts_used,
        termination: run.termination,
    })
}

/// [`nelder_mead_with`] using default restarts and initial simplex.
pub fn nelder_mead<T: Scalar, F: FnMut(&[T]) -> T>(
    f: F,
    x0: &[T],
    tol: T,
    max_iter: usize,
) -> Result<OptimReport<T>> {
    let opts = NelderMeadOptions {
        tol,
        max_iter,
        ..Default::default()
    };
    nelder_mead_with(f, x0, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = nelder_mead(|x: &[f64]| (x[0] - 3.0).powi(2), &[0.0], 1e-14, 5000).unwrap();
        assert!((r.best_params[0] - 3.0).abs() < 1e-6);
        assert!(r.converged);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(f, &[-1.2, 1.0], 1e-14, 5000).unwrap();
        assert!((r.best_params[0] - 1.0).abs() < 1e-4, "{:?}", r);
        assert!((r.best_params[1] - 1.0).abs() < 1e-4, "{:?}", r);
        assert!(r.converged);
    }

    #[test]
    fn nan_everywhere_fails() {
        let r = nelder_mead(|_: &[f64]| f64::NAN, &[0.0, 0.0], 1e-8, 100);
        assert!(matches!(r, Err(Error::NonFiniteObjective)));
    }

    #[test]
    fn iteration_exhaustion_is_not_convergence() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions {
            tol: 1e-14,
            max_iter: 5,
            restarts: 0,
            steps: None,
        };
        let r = nelder_mead_with(f, &[-1.2, 1.0], &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.termination, Termination::MaxIterations);
    }

    #[test]
    fn infeasible_region_is_avoided() {
        // +inf outside x > 0
        let f = |x: &[f64]| if x[0] <= 0.0 { f64::INFINITY } else { x[0] - x[0].ln() };
        let r = nelder_mead(f, &[0.05], 1e-14, 5000).unwrap();
        assert!((r.best_params[0] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + (x[1] + 2.0).powi(4) + x[0] * x[1];
        let a = nelder_mead(f, &[1.0, 1.0], 1e-12, 5000).unwrap();
        let b = nelder_mead(f, &[1.0, 1.0], 1e-12, 5000).unwrap();
        assert_eq!(a, b);
    }
}
