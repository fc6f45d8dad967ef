//! Regression and testing machinery behind the descriptive, correlation and
//! regression tables.

mod adf;
mod corr;
mod describe;
mod lag_search;
mod ols;

pub use adf::{adf_critical_values, adf_test, adf_test_values, schwert_max_lags, AdfResult};
pub use corr::{corr_matrix, CorrCell, CorrMatrix};
pub use describe::{describe, describe_values, Describe};
pub use lag_search::{lag_search, Criterion, LagChoice};
pub use ols::{ols, split_coefficient, Effect, RegressionResult, RegressionSpec, SplitEffect, Term};

use crate::scalar::Scalar;

/// Per-observation information criteria computed from a maximized log-likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoCriteria<T = f64> {
    pub aic: T,
    pub sc: T,
    pub hq: T,
}

impl<T: Scalar> InfoCriteria<T> {
    /// `AIC = (-2l + 2k)/n`, `SC = (-2l + k ln n)/n`, `HQ = (-2l + 2k ln ln n)/n`.
    pub fn from_loglik(loglik: T, k: usize, n: usize) -> Self {
        let two = T::lit(2.0);
        let nf = T::from_usize_lossy(n);
        let kf = T::from_usize_lossy(k);
        let base = -two * loglik;
        Self {
            aic: (base + two * kf) / nf,
            sc: (base + kf * nf.ln()) / nf,
            hq: (base + two * kf * nf.ln().ln()) / nf,
        }
    }

    pub fn get(&self, c: Criterion) -> T {
        match c {
            Criterion::Aic => self.aic,
            Criterion::Sc => self.sc,
        }
    }
}

/// Significance marker: `***` at 1%, `**` at 5%, `*` at 10%.
pub fn stars(p_value: f64) -> &'static str {
    if p_value < 0.01 {
        "***"
    } else if p_value < 0.05 {
        "**"
    } else if p_value < 0.10 {
        "*"
    } else {
        ""
    }
}
