//! GARCH with an autoregressive conditional-skewness recursion.
//!
//! Return equation `r_t = mu * r_{t-1} + eps_t`, `eps_t = sqrt(h_t) * eta_t`,
//! variance `h_t = alpha0 + alpha1 * eps_{t-1}^2 + alpha2 * h_{t-1}` and
//! skewness `s_t = beta0 + beta1 * eta_{t-1}^3 + beta2 * s_{t-1}`.
//!
//! The innovation `eta_t` follows a Gram-Charlier density truncated after the
//! third Hermite term and squared for positivity:
//!
//! `f(eta; s) = phi(eta) * (1 + s/6 * He3(eta))^2 / (1 + s^2/6)`, with
//! `He3(eta) = eta^3 - 3 eta`.

use chrono::NaiveDate;
use statrs::distribution::{ContinuousCDF, FisherSnedecor, Normal};

use crate::error::{Error, Result};
use crate::inference::InfoCriteria;
use crate::linalg::Qr;
use crate::optimizer::OptimReport;
use crate::quadrature;
use crate::scalar::Scalar;
use crate::timeseries::DatedSeries;

pub const PARAM_NAMES: [&str; 7] = ["mu", "alpha0", "alpha1", "alpha2", "beta0", "beta1", "beta2"];

/// The seven coefficients of the return, variance and skewness equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarchSParams<T = f64> {
    /// AR(1) coefficient of the return equation.
    pub mu: T,
    pub alpha0: T,
    pub alpha1: T,
    pub alpha2: T,
    pub beta0: T,
    pub beta1: T,
    pub beta2: T,
}

impl<T: Scalar> GarchSParams<T> {
    /// Plain GARCH(1,1) point: no skewness dynamics.
    pub fn garch11(mu: T, alpha0: T, alpha1: T, alpha2: T) -> Self {
        Self {
            mu,
            alpha0,
            alpha1,
            alpha2,
            beta0: T::zero(),
            beta1: T::zero(),
            beta2: T::zero(),
        }
    }

    pub fn to_array(&self) -> [T; 7] {
        [
            self.mu,
            self.alpha0,
            self.alpha1,
            self.alpha2,
            self.beta0,
            self.beta1,
            self.beta2,
        ]
    }

    pub fn from_array(a: [T; 7]) -> Self {
        Self {
            mu: a[0],
            alpha0: a[1],
            alpha1: a[2],
            alpha2: a[3],
            beta0: a[4],
            beta1: a[5],
            beta2: a[6],
        }
    }

    pub fn persistence(&self) -> T {
        self.alpha1 + self.alpha2
    }

    /// `alpha0 / (1 - alpha1 - alpha2)`.
    pub fn unconditional_variance(&self) -> T {
        self.alpha0 / (T::one() - self.persistence())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(format!("{msg} ({self:?})")));
        if self.to_array().iter().any(|v| !v.is_finite()) {
            return bad("non-finite coefficient");
        }
        if !(self.alpha0 > T::zero()) {
            return bad("alpha0 must be positive");
        }
        if self.alpha1 < T::zero() || self.alpha2 < T::zero() {
            return bad("alpha1 and alpha2 must be non-negative");
        }
        if !(self.persistence() < T::one()) {
            return bad("alpha1 + alpha2 must be below 1");
        }
        if !(self.beta2.abs() < T::one()) {
            return bad("|beta2| must be below 1");
        }
        if !(self.mu.abs() < T::one()) {
            return bad("|mu| must be below 1");
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn residual(&self, r: T, r_prev: T) -> T {
        r - self.mu * r_prev
    }

    #[inline]
    pub(crate) fn next_variance(&self, eps: T, h: T) -> T {
        self.alpha0 + self.alpha1 * eps * eps + self.alpha2 * h
    }

    #[inline]
    pub(crate) fn next_skew(&self, eta: T, s: T) -> T {
        self.beta0 + self.beta1 * eta * eta * eta + self.beta2 * s
    }
}

#[inline]
pub(crate) fn standardize<T: Scalar>(eps: T, h: T) -> T {
    eps / h.sqrt()
}

/// Starting values of the variance and skewness recursions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FilterInit<T = f64> {
    /// `h` starts at the sample variance of the residuals, `s` at zero.
    #[default]
    SampleVariance,
    Given { h: T, s: T },
}

/// Filtered paths, one entry per return from the second observation onwards.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState<T = f64> {
    pub eps: Vec<T>,
    pub h: Vec<T>,
    pub eta: Vec<T>,
    pub s: Vec<T>,
}

impl<T: Scalar> FilterState<T> {
    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }
}

pub(crate) const MIN_FILTER_LEN: usize = 10;

pub(crate) fn sample_variance<T: Scalar>(x: &[T]) -> T {
    let n = T::from_usize_lossy(x.len());
    let mean = x.iter().copied().sum::<T>() / n;
    x.iter().map(|v| (*v - mean) * (*v - mean)).sum::<T>() / (n - T::one())
}

pub(crate) fn is_constant<T: Scalar>(x: &[T]) -> bool {
    x.windows(2).all(|w| w[0] == w[1])
}

/// Runs the recursions over raw return values.
pub fn filter_values<T: Scalar>(
    params: &GarchSParams<T>,
    returns: &[T],
    init: FilterInit<T>,
) -> Result<FilterState<T>> {
    params.validate()?;
    if returns.len() < MIN_FILTER_LEN {
        return Err(Error::Size(format!(
            "filter needs at least {MIN_FILTER_LEN} returns, got {}",
            returns.len()
        )));
    }
    let m = returns.len() - 1;
    let eps: Vec<T> = returns
        .windows(2)
        .map(|w| params.residual(w[1], w[0]))
        .collect();
    let (h0, s0) = match init {
        FilterInit::SampleVariance => (sample_variance(&eps), T::zero()),
        FilterInit::Given { h, s } => (h, s),
    };
    let mut h = Vec::with_capacity(m);
    let mut eta = Vec::with_capacity(m);
    let mut s = Vec::with_capacity(m);
    let (mut h_t, mut s_t) = (h0, s0);
    for (i, &e) in eps.iter().enumerate() {
        if !(h_t > T::zero()) {
            return Err(Error::VarianceUnderflow { t: i + 1 });
        }
        let z = standardize(e, h_t);
        h.push(h_t);
        eta.push(z);
        s.push(s_t);
        h_t = params.next_variance(e, h_t);
        s_t = params.next_skew(z, s_t);
    }
    Ok(FilterState { eps, h, eta, s })
}

/// Filters a dated return series with the default initialization.
pub fn filter<T: Scalar>(params: &GarchSParams<T>, returns: &DatedSeries<T>) -> Result<FilterState<T>> {
    filter_values(params, returns.values(), FilterInit::SampleVariance)
}

/// `1 + s/6 * He3(eta)`.
#[inline]
pub fn gc_polynomial<T: Scalar>(eta: T, s: T) -> T {
    T::one() + s / T::lit(6.0) * (eta * eta * eta - T::lit(3.0) * eta)
}

/// Normalizer `1 + s^2/6` of the squared expansion.
#[inline]
pub fn gc_normalizer<T: Scalar>(s: T) -> T {
    T::one() + s * s / T::lit(6.0)
}

/// Density of the standardized innovation for skewness `s`.
pub fn gc_density<T: Scalar>(eta: T, s: T) -> T {
    let phi = (-T::lit(0.5) * eta * eta).exp() / T::TAU().sqrt();
    let psi = gc_polynomial(eta, s);
    phi * psi * psi / gc_normalizer(s)
}

/// Log-density contribution of one observation given `h`, `eta` and `s`.
#[inline]
pub fn gc_log_contribution<T: Scalar>(h: T, eta: T, s: T) -> T {
    let half = T::lit(0.5);
    let psi = gc_polynomial(eta, s);
    -half * T::TAU().ln() - half * h.ln() - half * eta * eta + (psi * psi).ln()
        - gc_normalizer(s).ln()
}

#[inline]
fn gaussian_log_contribution<T: Scalar>(h: T, eta: T) -> T {
    let half = T::lit(0.5);
    -half * T::TAU().ln() - half * h.ln() - half * eta * eta
}

/// Total and per-observation Gram-Charlier log-likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct Loglik<T = f64> {
    pub total: T,
    pub per_obs: DatedSeries<T>,
}

fn gc_sum<T: Scalar>(state: &FilterState<T>) -> Result<(T, Vec<T>)> {
    let mut total = T::zero();
    let mut per = Vec::with_capacity(state.len());
    for i in 0..state.len() {
        let l = gc_log_contribution(state.h[i], state.eta[i], state.s[i]);
        if !l.is_finite() {
            return Err(Error::Likelihood { t: i + 1 });
        }
        total += l;
        per.push(l);
    }
    Ok((total, per))
}

/// Log-likelihood over raw returns; also returns the filtered state.
pub fn gc_loglik_values<T: Scalar>(
    params: &GarchSParams<T>,
    returns: &[T],
) -> Result<(T, FilterState<T>)> {
    let state = filter_values(params, returns, FilterInit::SampleVariance)?;
    let (total, _) = gc_sum(&state)?;
    Ok((total, state))
}

pub fn gram_charlier_loglik<T: Scalar>(
    params: &GarchSParams<T>,
    returns: &DatedSeries<T>,
) -> Result<Loglik<T>> {
    let state = filter(params, returns)?;
    let (total, per) = gc_sum(&state)?;
    let per_obs = DatedSeries::new("loglik", returns.dates()[1..].to_vec(), per)?;
    Ok(Loglik { total, per_obs })
}

/// Gaussian GARCH(1,1) log-likelihood at `(mu, alpha)`; skewness terms are ignored.
pub fn gaussian_loglik_values<T: Scalar>(params: &GarchSParams<T>, returns: &[T]) -> Result<T> {
    let g = GarchSParams::garch11(params.mu, params.alpha0, params.alpha1, params.alpha2);
    let state = filter_values(&g, returns, FilterInit::SampleVariance)?;
    let mut total = T::zero();
    for i in 0..state.len() {
        let l = gaussian_log_contribution(state.h[i], state.eta[i]);
        if !l.is_finite() {
            return Err(Error::Likelihood { t: i + 1 });
        }
        total += l;
    }
    Ok(total)
}

/// Integral of the innovation density over `[-12, 12]`; 1 up to quadrature error.
pub fn density_integral_check(s: f64) -> Result<f64> {
    if !(s.abs() < 4.0) {
        return Err(Error::InvalidParams(format!(
            "skewness {s} outside the supported range |s| < 4"
        )));
    }
    quadrature::integrate(|x| gc_density(x, s), -12.0, 12.0, 1e-12)
}

/// `E[eta^k]` under the innovation density, by quadrature.
pub fn gc_moment(s: f64, k: i32) -> Result<f64> {
    quadrature::integrate(|x| x.powi(k) * gc_density(x, s), -14.0, 14.0, 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchLmTest {
    pub f_stat: f64,
    pub p_value: f64,
    pub lags: usize,
    pub n_obs: usize,
}

pub const DEFAULT_ARCH_LAGS: usize = 5;

/// Engle's ARCH-LM test in F form: `eps_t^2` on a constant and `lags` own lags.
pub fn arch_lm_test<T: Scalar>(residuals: &[T], lags: usize) -> Result<ArchLmTest> {
    if lags == 0 {
        return Err(Error::Size("ARCH-LM needs at least one lag".into()));
    }
    let n = residuals.len();
    if n <= 2 * lags + 1 {
        return Err(Error::InsufficientObservations {
            needed: 2 * lags + 1,
            have: n,
        });
    }
    let sq: Vec<f64> = residuals.iter().map(|e| e.as_f64() * e.as_f64()).collect();
    let m = n - lags;
    let y: Vec<f64> = sq[lags..].to_vec();
    let x: Vec<Vec<f64>> = (lags..n)
        .map(|t| {
            let mut row = Vec::with_capacity(lags + 1);
            row.push(1.0);
            row.extend((1..=lags).map(|j| sq[t - j]));
            row
        })
        .collect();
    let qr = Qr::new(&x);
    if let Some(c) = qr.first_dependent_column(1e-10) {
        let name = if c == 0 {
            "const".to_string()
        } else {
            format!("eps^2_(t-{c})")
        };
        return Err(Error::RankDeficient(name));
    }
    let b = qr.solve(&y);
    let ssr_u: f64 = x
        .iter()
        .zip(&y)
        .map(|(row, yi)| {
            let fit: f64 = row.iter().zip(&b).map(|(a, c)| a * c).sum();
            (yi - fit) * (yi - fit)
        })
        .sum();
    let ybar = y.iter().sum::<f64>() / m as f64;
    let ssr_r: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let df2 = (m - lags - 1) as f64;
    let f_stat = ((ssr_r - ssr_u) / lags as f64) / (ssr_u / df2);
    let dist = FisherSnedecor::new(lags as f64, df2)
        .map_err(|e| Error::Estimation(format!("F distribution: {e}")))?;
    Ok(ArchLmTest {
        f_stat,
        p_value: dist.sf(f_stat),
        lags,
        n_obs: m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Garch11,
    GarchS,
}

impl Model {
    pub fn n_params(self) -> usize {
        match self {
            Model::Garch11 => 4,
            Model::GarchS => 7,
        }
    }
}

/// A fitted model: estimates, filtered paths, likelihood and diagnostics.
#[derive(Debug, Clone)]
pub struct GarchSFit<T = f64> {
    pub model: Model,
    pub params: GarchSParams<T>,
    pub state: FilterState<T>,
    /// Dates of the filtered paths (the return dates from the second onwards).
    pub dates: Vec<NaiveDate>,
    pub loglik: T,
    /// Standard errors in the constrained parameter space; `None` when unavailable
    /// or the parameter is not estimated.
    pub stderr: [Option<T>; 7],
    pub zstats: [Option<T>; 7],
    pub criteria: InfoCriteria<T>,
    pub n_obs: usize,
    pub report: OptimReport<T>,
}

impl<T: Scalar> GarchSFit<T> {
    pub fn n_params(&self) -> usize {
        self.model.n_params()
    }

    pub fn converged(&self) -> bool {
        self.report.converged
    }

    /// Two-sided normal p-values of the z-statistics.
    pub fn p_values(&self) -> [Option<f64>; 7] {
        let norm = Normal::standard();
        self.zstats
            .map(|z| z.map(|z| 2.0 * (1.0 - norm.cdf(z.as_f64().abs()))))
    }
}

/// The filtered skewness path as a series named `Skew`.
pub fn conditional_skewness<T: Scalar>(fit: &GarchSFit<T>) -> Result<DatedSeries<T>> {
    DatedSeries::new("Skew", fit.dates.clone(), fit.state.s.clone())
}
