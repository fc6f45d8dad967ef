use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::timeseries::DatedSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Describe<T = f64> {
    pub n: usize,
    pub mean: T,
    pub min: T,
    pub max: T,
    /// Sample standard deviation (n - 1 denominator).
    pub std: T,
}

pub fn describe_values<T: Scalar>(x: &[T]) -> Result<Describe<T>> {
    if x.len() < 2 {
        return Err(Error::InsufficientObservations {
            needed: 1,
            have: x.len(),
        });
    }
    let n = T::from_usize_lossy(x.len());
    let mean = x.iter().copied().sum::<T>() / n;
    let var = x.iter().map(|v| (*v - mean) * (*v - mean)).sum::<T>() / (n - T::one());
    let (min, max) = x
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
    Ok(Describe {
        n: x.len(),
        mean,
        min,
        max,
        std: var.sqrt(),
    })
}

pub fn describe<T: Scalar>(series: &DatedSeries<T>) -> Result<Describe<T>> {
    describe_values(series.values())
}
