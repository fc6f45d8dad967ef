use super::ols::{ols_from, RegressionResult, RegressionSpec, Term};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::timeseries::AlignedTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Aic,
    Sc,
}

impl std::str::FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Criterion::Aic),
            "sc" | "sic" | "bic" => Ok(Criterion::Sc),
            other => Err(format!("unknown criterion `{other}` (expected aic or sc)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LagChoice<T = f64> {
    pub p: usize,
    pub q: usize,
    /// The chosen specification refit on its own maximal sample.
    pub result: RegressionResult<T>,
}

/// `base` plus `p_var_{t-1..t-p}` and `q_var_{t..t-q}`.
pub(crate) fn with_lags(base: &RegressionSpec, p_var: &str, p: usize, q_var: &str, q: usize) -> RegressionSpec {
    base.clone()
        .with_terms((1..=p).map(|i| Term::var(p_var, i)))
        .with_terms((0..=q).map(|j| Term::var(q_var, j)))
}

/// Exhaustive `(p, q)` search over `[1, max_p] x [0, max_q]`.
///
/// Every candidate is scored on the common sample available at the largest
/// lag; the winner is refit on its own sample. Ties go to the smaller `p + q`,
/// then the smaller `p`.
pub fn lag_search<T: Scalar>(
    base: &RegressionSpec,
    p_var: &str,
    q_var: &str,
    max_p: usize,
    max_q: usize,
    criterion: super::Criterion,
    data: &AlignedTable<T>,
) -> Result<LagChoice<T>> {
    let p_range = if max_p == 0 { 0..=0 } else { 1..=max_p };
    let mut grid: Vec<(usize, usize)> = p_range
        .flat_map(|p| (0..=max_q).map(move |q| (p, q)))
        .collect();
    grid.sort_by_key(|&(p, q)| (p + q, p));

    let common_start = base.max_lag().max(max_p).max(max_q);
    let mut best: Option<(T, usize, usize)> = None;
    let mut last_err = None;
    for (p, q) in grid {
        let spec = with_lags(base, p_var, p, q_var, q);
        match ols_from(&spec, data, common_start) {
            Ok(r) => {
                let score = r.criteria.get(criterion);
                if best.is_none_or(|(b, _, _)| score < b) {
                    best = Some((score, p, q));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let Some((_, p, q)) = best else {
        return Err(Error::Estimation(format!(
            "every lag candidate failed{}",
            last_err.map(|e| format!(": {e}")).unwrap_or_default()
        )));
    };
    let result = ols_from(&with_lags(base, p_var, p, q_var, q), data, 0)?;
    Ok(LagChoice { p, q, result })
}
