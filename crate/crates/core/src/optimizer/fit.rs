use super::hessian::{covariance_from_hessian, numerical_hessian};
use super::nelder_mead::{nelder_mead_with, NelderMeadOptions, OptimReport};
use super::transform::ParamTransform;
use crate::error::{Error, Result};
use crate::garchs::{is_constant, sample_variance, gc_loglik_values, GarchSFit, GarchSParams, Model};
use crate::inference::InfoCriteria;
use crate::scalar::Scalar;
use crate::timeseries::DatedSeries;

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions<T = f64> {
    pub tol: T,
    pub max_iter: usize,
    pub restarts: usize,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-8),
            max_iter: 5000,
            restarts: 3,
        }
    }
}

const MIN_GARCH11_LEN: usize = 50;
const MIN_GARCHS_LEN: usize = 100;

/// Persistence levels of the deterministic GARCH(1,1) starts.
const GARCH11_STARTS: [f64; 3] = [0.8, 0.9, 0.99];
/// Share of persistence carried by the ARCH term in every start.
const START_ARCH_SHARE: f64 = 0.1;
/// Default skewness starting point `(beta0, beta1, beta2)`.
const SKEW_START: [f64; 3] = [0.0, 0.05, 0.1];

fn simplex_steps<T: Scalar>(model: Model) -> Vec<T> {
    let steps: &[f64] = match model {
        Model::Garch11 => &[0.05, 0.5, 0.5, 0.3],
        Model::GarchS => &[0.05, 0.5, 0.5, 0.3, 0.01, 0.03, 0.2],
    };
    steps.iter().map(|s| T::lit(*s)).collect()
}

fn negative_loglik<T: Scalar>(transform: ParamTransform, returns: &[T]) -> impl Fn(&[T]) -> T + '_ {
    move |u: &[T]| {
        let p = transform.to_constrained(u);
        match gc_loglik_values(&p, returns) {
            Ok((ll, _)) if ll.is_finite() => -ll,
            _ => T::infinity(),
        }
    }
}

fn optimize<T: Scalar>(
    model: Model,
    start: &GarchSParams<T>,
    returns: &[T],
    opts: &FitOptions<T>,
) -> Result<OptimReport<T>> {
    let transform = ParamTransform::new(model);
    let nm = NelderMeadOptions {
        tol: opts.tol,
        max_iter: opts.max_iter,
        restarts: opts.restarts,
        steps: Some(simplex_steps(model)),
    };
    nelder_mead_with(
        negative_loglik(transform, returns),
        &transform.to_unconstrained(start),
        &nm,
    )
}

/// Assembles the fit at the optimizer's incumbent: paths, delta-method
/// standard errors in coefficient space, and information criteria.
fn finish<T: Scalar>(
    model: Model,
    returns: &DatedSeries<T>,
    mut report: OptimReport<T>,
) -> Result<GarchSFit<T>> {
    let transform = ParamTransform::new(model);
    let u = report.best_params.clone();
    let params = transform.to_constrained(&u);
    params.validate()?;
    let (loglik, state) = gc_loglik_values(&params, returns.values())?;

    let hess = numerical_hessian(negative_loglik(transform, returns.values()), &u);
    let cov_u = covariance_from_hessian(&hess);
    let jac = transform.jacobian(&u);
    let dim = transform.dim();
    let theta = params.to_array();
    let mut stderr = [None; 7];
    let mut zstats = [None; 7];
    for r in 0..dim {
        let depends_on_flat = (0..dim).any(|c| !jac[r][c].is_zero() && !cov_u.available[c]);
        if depends_on_flat {
            continue;
        }
        let mut var = T::zero();
        for a in 0..dim {
            for b in 0..dim {
                var += jac[r][a] * cov_u.matrix[a][b] * jac[r][b];
            }
        }
        if var > T::zero() && var.is_finite() {
            let se = var.sqrt();
            stderr[r] = Some(se);
            zstats[r] = Some(theta[r] / se);
        }
    }

    let n_obs = state.len();
    report.best_params = theta.to_vec();
    report.best_value = -loglik;
    Ok(GarchSFit {
        model,
        params,
        state,
        dates: returns.dates()[1..].to_vec(),
        loglik,
        stderr,
        zstats,
        criteria: InfoCriteria::from_loglik(loglik, model.n_params(), n_obs),
        n_obs,
        report,
    })
}

/// Gaussian GARCH(1,1) maximum likelihood (skewness coefficients held at zero),
/// best of three deterministic starts.
pub fn fit_garch11<T: Scalar>(returns: &DatedSeries<T>) -> Result<GarchSFit<T>> {
    fit_garch11_with(returns, &FitOptions::default())
}

pub fn fit_garch11_with<T: Scalar>(
    returns: &DatedSeries<T>,
    opts: &FitOptions<T>,
) -> Result<GarchSFit<T>> {
    if returns.len() < MIN_GARCH11_LEN {
        return Err(Error::InsufficientObservations {
            needed: MIN_GARCH11_LEN - 1,
            have: returns.len(),
        });
    }
    let var = sample_variance(returns.values());
    if is_constant(returns.values()) || !(var > T::zero()) {
        return Err(Error::Estimation("return series has zero variance".into()));
    }
    let mut best: Option<OptimReport<T>> = None;
    let mut last_err = None;
    for pers in GARCH11_STARTS {
        let pers = T::lit(pers);
        let share = T::lit(START_ARCH_SHARE);
        let start = GarchSParams::garch11(
            T::zero(),
            var * (T::one() - pers),
            pers * share,
            pers * (T::one() - share),
        );
        match optimize(Model::Garch11, &start, returns.values(), opts) {
            Ok(r) if r.best_value.is_finite() => {
                if best.as_ref().is_none_or(|b| r.best_value < b.best_value) {
                    best = Some(r);
                }
            }
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    let report = best.ok_or_else(|| {
        Error::Estimation(format!(
            "no GARCH(1,1) start produced a finite likelihood{}",
            last_err.map(|e| format!(": {e}")).unwrap_or_default()
        ))
    })?;
    finish(Model::Garch11, returns, report)
}

/// GARCH-S maximum likelihood. Without an explicit start the search begins at
/// the GARCH(1,1) estimates with skewness coefficients `(0, 0.05, 0.1)`; if that
/// ends below the GARCH(1,1) likelihood, a second search starts from the nested
/// point itself so the reported optimum never falls below it.
///
/// Non-convergence is reported through `report.converged`, not as an error.
pub fn fit_garchs<T: Scalar>(
    returns: &DatedSeries<T>,
    start: Option<GarchSParams<T>>,
) -> Result<GarchSFit<T>> {
    fit_garchs_with(returns, start, &FitOptions::default())
}

pub fn fit_garchs_with<T: Scalar>(
    returns: &DatedSeries<T>,
    start: Option<GarchSParams<T>>,
    opts: &FitOptions<T>,
) -> Result<GarchSFit<T>> {
    if returns.len() < MIN_GARCHS_LEN {
        return Err(Error::InsufficientObservations {
            needed: MIN_GARCHS_LEN - 1,
            have: returns.len(),
        });
    }
    let (start, nested) = match start {
        Some(s) => {
            s.validate()?;
            (s, None)
        }
        None => {
            let g = fit_garch11_with(returns, opts)?;
            let mut s = g.params;
            s.beta0 = T::lit(SKEW_START[0]);
            s.beta1 = T::lit(SKEW_START[1]);
            s.beta2 = T::lit(SKEW_START[2]);
            (s, Some(g))
        }
    };
    let mut report = optimize(Model::GarchS, &start, returns.values(), opts)?;
    if let Some(g) = &nested {
        if -report.best_value < g.loglik {
            let fallback = optimize(Model::GarchS, &g.params, returns.values(), opts)?;
            if fallback.best_value < report.best_value {
                report = fallback;
            }
        }
    }
    finish(Model::GarchS, returns, report)
}
