use super::ols::least_squares;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::timeseries::DatedSeries;

/// Outcome of an augmented Dickey-Fuller test with a constant and no trend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfResult {
    /// t-statistic of the lagged level.
    pub statistic: f64,
    /// Augmentation lags chosen by AIC.
    pub lags: usize,
    pub n_obs: usize,
    /// Critical values at 1%, 5% and 10%.
    pub critical_values: [f64; 3],
}

impl AdfResult {
    /// `***`, `**`, `*` or empty, by comparison with the critical values.
    pub fn stars(&self) -> &'static str {
        let [c1, c5, c10] = self.critical_values;
        if self.statistic < c1 {
            "***"
        } else if self.statistic < c5 {
            "**"
        } else if self.statistic < c10 {
            "*"
        } else {
            ""
        }
    }

    pub fn rejects_at_5pct(&self) -> bool {
        self.statistic < self.critical_values[1]
    }
}

/// MacKinnon (2010) response-surface critical values, constant-only case.
pub fn adf_critical_values(n_obs: usize) -> [f64; 3] {
    const SURFACE: [[f64; 4]; 3] = [
        [-3.43035, -6.5393, -16.786, -79.433],
        [-2.86154, -2.8903, -4.234, -40.040],
        [-2.56677, -1.5384, -2.809, 0.0],
    ];
    let t = n_obs as f64;
    SURFACE.map(|c| c[0] + c[1] / t + c[2] / (t * t) + c[3] / (t * t * t))
}

/// Schwert's rule `floor(12 (n/100)^{1/4})`.
pub fn schwert_max_lags(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

const MIN_ADF_LEN: usize = 25;

fn adf_design<T: Scalar>(y: &[T], dy: &[T], lags: usize, first: usize) -> (Matrix<T>, Vec<T>) {
    // dy[i] = y[i + 1] - y[i]; regress dy[i] on 1, y[i], dy[i-1..i-lags]
    let rows: Vec<usize> = (first..dy.len()).collect();
    let x = rows
        .iter()
        .map(|&i| {
            let mut row = Vec::with_capacity(lags + 2);
            row.push(T::one());
            row.push(y[i]);
            row.extend((1..=lags).map(|j| dy[i - j]));
            row
        })
        .collect();
    let yv = rows.iter().map(|&i| dy[i]).collect();
    (x, yv)
}

pub fn adf_test_values<T: Scalar>(y: &[T], max_lags: usize) -> Result<AdfResult> {
    if y.len() < MIN_ADF_LEN {
        return Err(Error::InsufficientObservations {
            needed: MIN_ADF_LEN - 1,
            have: y.len(),
        });
    }
    let dy: Vec<T> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let max_lags = max_lags.min(dy.len().saturating_sub(MIN_ADF_LEN / 2));
    let rank_err = || Error::RankDeficient("ADF regressors (constant series?)".into());

    // lag order by AIC on the common sample
    let mut best = (f64::INFINITY, 0usize);
    for p in 0..=max_lags {
        let (x, yv) = adf_design(y, &dy, p, max_lags);
        let n = yv.len() as f64;
        let fit = least_squares(&x, &yv).map_err(|_| rank_err())?;
        let aic = n * (fit.ssr.as_f64() / n).ln() + 2.0 * (p + 2) as f64;
        if aic < best.0 {
            best = (aic, p);
        }
    }
    let lags = best.1;
    let (x, yv) = adf_design(y, &dy, lags, lags);
    let n = yv.len();
    let k = lags + 2;
    let fit = least_squares(&x, &yv).map_err(|_| rank_err())?;
    let sigma2 = fit.ssr / T::from_usize_lossy(n - k);
    let se = (fit.xtx_inv[1][1] * sigma2).sqrt();
    let statistic = (fit.coef[1] / se).as_f64();
    Ok(AdfResult {
        statistic,
        lags,
        n_obs: n,
        critical_values: adf_critical_values(n),
    })
}

pub fn adf_test<T: Scalar>(series: &DatedSeries<T>, max_lags: usize) -> Result<AdfResult> {
    adf_test_values(series.values(), max_lags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_sample_critical_values() {
        let c = adf_critical_values(100_000);
        assert!((c[0] + 3.43).abs() < 0.01);
        assert!((c[1] + 2.86).abs() < 0.01);
        assert!((c[2] + 2.57).abs() < 0.01);
    }

    #[test]
    fn short_series_rejected() {
        assert!(adf_test_values(&[1.0; 10], 2).is_err());
        assert!(adf_test_values(&[1.0; 40], 2).is_err());
    }

    #[test]
    fn alternating_series_is_stationary() {
        let y: Vec<f64> = (0..200)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } + 0.01 * ((i * 7919 % 101) as f64))
            .collect();
        let r = adf_test_values(&y, 4).unwrap();
        assert!(r.statistic < r.critical_values[0]);
        assert_eq!(r.stars(), "***");
    }
}
