//! Gamma and beta functions, the Mittag-Leffler-type function `ML_alpha`,
//! its derivatives and matrix arguments, and the classical two-parameter
//! Mittag-Leffler function.

mod gamma;
mod matrix;
mod mittag_leffler;

pub use gamma::{beta_fn, gamma_fn, gamma_ratio, ln_gamma};
pub use matrix::{ml_matrix_eval, ml_matrix_eval_diagonal, ComplexMatrix};
pub use mittag_leffler::{
    classical_ml_eval, ml_coeffs, ml_deriv_eval, ml_eval, MLCoefficients, SeriesValue,
};

pub(crate) use mittag_leffler::ratios;
