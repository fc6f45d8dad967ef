//! Conditional-skewness GARCH estimation and crash-risk regressions.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below fix the scalar for everyday use.
//!
//! * [`timeseries`]: CSV ingestion, log-return/growth transforms, calendar alignment.
//! * [`garchs`]: variance and skewness recursions, Gram-Charlier likelihood, ARCH-LM test.
//! * [`optimizer`]: Nelder-Mead, parameter transforms, GARCH(1,1) and GARCH-S fits.
//! * [`inference`]: OLS, lag-order search, ADF test, correlations, descriptives.
//! * [`simulate`]: exact innovation sampling and synthetic return paths.

pub mod error;
pub mod garchs;
pub mod inference;
mod linalg;
pub mod optimizer;
mod quadrature;
mod scalar;
pub mod simulate;
pub mod timeseries;

pub use error::{Error, Result};
pub use garchs::{FilterState, GarchSFit, GarchSParams};
pub use inference::{RegressionResult, RegressionSpec, Term};
pub use scalar::Scalar;
pub use timeseries::{AlignedTable, DatedSeries};

pub type DatedSeries64 = DatedSeries<f64>;
pub type DatedSeries32 = DatedSeries<f32>;
pub type AlignedTable64 = AlignedTable<f64>;
pub type AlignedTable32 = AlignedTable<f32>;
pub type GarchSParams64 = GarchSParams<f64>;
pub type GarchSParams32 = GarchSParams<f32>;
pub type FilterState64 = FilterState<f64>;
pub type FilterState32 = FilterState<f32>;
pub type GarchSFit64 = GarchSFit<f64>;
pub type GarchSFit32 = GarchSFit<f32>;
pub type RegressionResult64 = RegressionResult<f64>;
pub type RegressionResult32 = RegressionResult<f32>;
