//! Toric MLE, likelihood-ratio statistics, the chi-square reference law,
//! Monte Carlo p-values and chain diagnostics.

pub mod diagnostics;
mod mle;
mod special;
mod stats;

pub use diagnostics::{autocorrelation, histogram, Diagnostics, Histogram};
pub use mle::{fit_toric_mle, FitOptions, FittedModel, ToricModel};
pub use special::{chi_square_cdf, chi_square_sf, ln_gamma, regularized_lower_gamma, regularized_upper_gamma};
pub use stats::{exact_pvalue, generate_null_table, lr_statistic, LikelihoodRatio, PValue};
