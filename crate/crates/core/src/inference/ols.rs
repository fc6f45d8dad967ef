use std::collections::HashSet;
use std::fmt;

use chrono::NaiveDate;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::InfoCriteria;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Qr};
use crate::scalar::Scalar;
use crate::timeseries::AlignedTable;

/// One regressor in a time-series regression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Intercept,
    /// The dependent variable lagged one period.
    LaggedDep,
    /// `name_{t-lag}`.
    Var { name: String, lag: usize },
    /// `dummy_t * var_{t-lag}`.
    Interaction {
        dummy: String,
        var: String,
        lag: usize,
    },
}

impl Term {
    pub fn var(name: impl Into<String>, lag: usize) -> Self {
        Term::Var {
            name: name.into(),
            lag,
        }
    }

    pub fn interaction(dummy: impl Into<String>, var: impl Into<String>, lag: usize) -> Self {
        Term::Interaction {
            dummy: dummy.into(),
            var: var.into(),
            lag,
        }
    }

    pub fn max_lag(&self) -> usize {
        match self {
            Term::Intercept => 0,
            Term::LaggedDep => 1,
            Term::Var { lag, .. } | Term::Interaction { lag, .. } => *lag,
        }
    }

    /// Display label, e.g. `rCases_(t-1)` or `D_epid* rEPU_(t)`.
    pub fn label(&self, dependent: &str) -> String {
        fn lagged(name: &str, lag: usize) -> String {
            if lag == 0 {
                format!("{name}_(t)")
            } else {
                format!("{name}_(t-{lag})")
            }
        }
        match self {
            Term::Intercept => "Intercept".to_string(),
            Term::LaggedDep => lagged(dependent, 1),
            Term::Var { name, lag } => lagged(name, *lag),
            Term::Interaction { dummy, var, lag } => format!("{dummy}* {}", lagged(var, *lag)),
        }
    }
}

/// Design-matrix recipe for one regression.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSpec {
    pub dependent: String,
    pub terms: Vec<Term>,
    /// Inclusive date range of the dependent observations; `None` uses every row.
    pub sample: Option<(NaiveDate, NaiveDate)>,
}

impl RegressionSpec {
    pub fn new(dependent: impl Into<String>) -> Self {
        Self {
            dependent: dependent.into(),
            terms: Vec::new(),
            sample: None,
        }
    }

    pub fn with(mut self, term: Term) -> Self {
        self.terms.push(term);
        self
    }

    pub fn with_terms(mut self, terms: impl IntoIterator<Item = Term>) -> Self {
        self.terms.extend(terms);
        self
    }

    pub fn max_lag(&self) -> usize {
        self.terms.iter().map(Term::max_lag).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::Spec("no regressors".into()));
        }
        let mut seen = HashSet::new();
        for t in &self.terms {
            if !seen.insert(t) {
                return Err(Error::Spec(format!(
                    "duplicate term `{}`",
                    t.label(&self.dependent)
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for RegressionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.terms.iter().map(|t| t.label(&self.dependent)).collect();
        write!(f, "{} ~ {}", self.dependent, labels.join(" + "))
    }
}

/// Coefficients, conventional standard errors and fit statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult<T = f64> {
    pub dependent: String,
    pub terms: Vec<Term>,
    pub coefficients: Vec<T>,
    pub std_errors: Vec<T>,
    pub t_stats: Vec<T>,
    pub p_values: Vec<f64>,
    /// `s^2 (X'X)^{-1}`.
    pub covariance: Matrix<T>,
    pub n_obs: usize,
    pub r2: T,
    pub adj_r2: T,
    pub loglik: T,
    pub criteria: InfoCriteria<T>,
    pub residuals: Vec<T>,
    /// Dates of the dependent observations used.
    pub dates: Vec<NaiveDate>,
}

impl<T: Scalar> RegressionResult<T> {
    pub fn index_of(&self, term: &Term) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.label(&self.dependent)).collect()
    }

    pub fn k(&self) -> usize {
        self.terms.len()
    }
}

pub(crate) struct LinearFit<T> {
    pub coef: Vec<T>,
    pub residuals: Vec<T>,
    pub ssr: T,
    pub xtx_inv: Matrix<T>,
}

/// Least squares by Householder QR. On rank deficiency returns the index of
/// the first column that is collinear with earlier ones.
pub(crate) fn least_squares<T: Scalar>(
    x: &Matrix<T>,
    y: &[T],
) -> std::result::Result<LinearFit<T>, usize> {
    let qr = Qr::new(x);
    let rel_tol = T::epsilon().sqrt() * T::lit(1e-2);
    if let Some(c) = qr.first_dependent_column(rel_tol) {
        return Err(c);
    }
    let coef = qr.solve(y);
    let residuals: Vec<T> = x
        .iter()
        .zip(y)
        .map(|(row, yi)| *yi - row.iter().zip(&coef).map(|(a, b)| *a * *b).sum::<T>())
        .collect();
    let ssr = residuals.iter().map(|e| *e * *e).sum();
    Ok(LinearFit {
        coef,
        residuals,
        ssr,
        xtx_inv: qr.inverse_gram(),
    })
}

/// Two-sided Student-t p-value.
pub(crate) fn student_p(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return if t.is_nan() { f64::NAN } else { 0.0 };
    }
    match StudentsT::new(0.0, 1.0, df) {
        Ok(d) => 2.0 * d.sf(t.abs()),
        Err(_) => f64::NAN,
    }
}

/// Fits `spec` on the largest sample its lags allow, starting no earlier than
/// row `first_row` of the table.
pub(crate) fn ols_from<T: Scalar>(
    spec: &RegressionSpec,
    data: &AlignedTable<T>,
    first_row: usize,
) -> Result<RegressionResult<T>> {
    spec.validate()?;
    let y_all = data.require(&spec.dependent)?;
    // Resolve every referenced column up front so missing names fail loudly.
    let columns: Vec<Vec<&[T]>> = spec
        .terms
        .iter()
        .map(|t| match t {
            Term::Intercept => Ok(vec![]),
            Term::LaggedDep => Ok(vec![y_all]),
            Term::Var { name, .. } => Ok(vec![data.require(name)?]),
            Term::Interaction { dummy, var, .. } => {
                Ok(vec![data.require(dummy)?, data.require(var)?])
            }
        })
        .collect::<Result<_>>()?;

    let start = spec.max_lag().max(first_row);
    let rows: Vec<usize> = (start..data.len())
        .filter(|&t| match spec.sample {
            Some((lo, hi)) => data.dates()[t] >= lo && data.dates()[t] <= hi,
            None => true,
        })
        .collect();
    let k = spec.terms.len();
    let n = rows.len();
    if n <= k {
        return Err(Error::InsufficientObservations { needed: k, have: n });
    }

    let x: Matrix<T> = rows
        .iter()
        .map(|&t| {
            spec.terms
                .iter()
                .zip(&columns)
                .map(|(term, cols)| match term {
                    Term::Intercept => T::one(),
                    Term::LaggedDep => cols[0][t - 1],
                    Term::Var { lag, .. } => cols[0][t - lag],
                    Term::Interaction { lag, .. } => cols[0][t] * cols[1][t - lag],
                })
                .collect()
        })
        .collect();
    let y: Vec<T> = rows.iter().map(|&t| y_all[t]).collect();

    let fit = least_squares(&x, &y)
        .map_err(|c| Error::RankDeficient(spec.terms[c].label(&spec.dependent)))?;

    let nf = T::from_usize_lossy(n);
    let df = T::from_usize_lossy(n - k);
    let sigma2 = fit.ssr / df;
    let covariance: Matrix<T> = fit
        .xtx_inv
        .iter()
        .map(|row| row.iter().map(|v| *v * sigma2).collect())
        .collect();
    let std_errors: Vec<T> = (0..k).map(|i| covariance[i][i].sqrt()).collect();
    let t_stats: Vec<T> = fit
        .coef
        .iter()
        .zip(&std_errors)
        .map(|(b, se)| *b / *se)
        .collect();
    let p_values = t_stats
        .iter()
        .map(|t| student_p(t.as_f64(), (n - k) as f64))
        .collect();

    let ybar = y.iter().copied().sum::<T>() / nf;
    let sst: T = y.iter().map(|v| (*v - ybar) * (*v - ybar)).sum();
    let r2 = if sst > T::zero() {
        T::one() - fit.ssr / sst
    } else {
        T::zero()
    };
    let adj_r2 = T::one() - (T::one() - r2) * (nf - T::one()) / df;
    let half = T::lit(0.5);
    let loglik = if fit.ssr > T::zero() {
        -half * nf * (T::one() + T::TAU().ln() + (fit.ssr / nf).ln())
    } else {
        T::infinity()
    };
    let criteria = InfoCriteria::from_loglik(loglik, k, n);

    Ok(RegressionResult {
        dependent: spec.dependent.clone(),
        terms: spec.terms.clone(),
        coefficients: fit.coef,
        std_errors,
        t_stats,
        p_values,
        covariance,
        n_obs: n,
        r2,
        adj_r2,
        loglik,
        criteria,
        residuals: fit.residuals,
        dates: rows.iter().map(|&t| data.dates()[t]).collect(),
    })
}

/// Ordinary least squares with conventional (homoskedastic) standard errors.
pub fn ols<T: Scalar>(spec: &RegressionSpec, data: &AlignedTable<T>) -> Result<RegressionResult<T>> {
    ols_from(spec, data, 0)
}

/// A linear combination of coefficients with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effect<T = f64> {
    pub estimate: T,
    pub std_error: T,
    pub t_stat: T,
    pub p_value: f64,
}

/// Regressor slope before and during the dummy regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitEffect<T = f64> {
    pub pre_period: Effect<T>,
    pub pandemic: Effect<T>,
}

/// Splits the slope of `var_{t-lag}` into the dummy-off effect `lambda` and
/// the dummy-on effect `lambda + theta`, with
/// `var = var(lambda) + var(theta) + 2 cov(lambda, theta)`.
pub fn split_coefficient<T: Scalar>(
    result: &RegressionResult<T>,
    dummy_name: &str,
    var_name: &str,
    lag: usize,
) -> Result<SplitEffect<T>> {
    let var_term = Term::var(var_name, lag);
    let int_term = Term::interaction(dummy_name, var_name, lag);
    let missing = |t: &Term| Error::Spec(format!("result has no term `{}`", t.label(&result.dependent)));
    let l = result.index_of(&var_term).ok_or_else(|| missing(&var_term))?;
    let th = result.index_of(&int_term).ok_or_else(|| missing(&int_term))?;
    let df = result.n_obs.saturating_sub(result.k()) as f64;

    let effect = |estimate: T, variance: T| {
        let std_error = variance.sqrt();
        let t_stat = estimate / std_error;
        Effect {
            estimate,
            std_error,
            t_stat,
            p_value: student_p(t_stat.as_f64(), df),
        }
    };
    let cov = &result.covariance;
    Ok(SplitEffect {
        pre_period: effect(result.coefficients[l], cov[l][l]),
        pandemic: effect(
            result.coefficients[l] + result.coefficients[th],
            cov[l][l] + cov[th][th] + T::lit(2.0) * cov[l][th],
        ),
    })
}
