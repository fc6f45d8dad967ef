//! Likelihood maximization for the GARCH(1,1) and GARCH-S models.

mod fit;
mod hessian;
mod nelder_mead;
mod transform;

pub use fit::{fit_garch11, fit_garch11_with, fit_garchs, fit_garchs_with, FitOptions};
pub use hessian::{covariance_from_hessian, numerical_hessian, zstats, Covariance, ZStats};
pub use nelder_mead::{nelder_mead, nelder_mead_with, NelderMeadOptions, OptimReport, Termination};
pub use transform::ParamTransform;
