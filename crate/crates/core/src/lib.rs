//! Numerical L-fractional calculus.
//!
//! The L-fractional derivative of order `alpha` in `(0, 1]` is the Caputo
//! derivative normalized so that the derivative of `t` is one. Its
//! eigenfunction is the Mittag-Leffler-type function
//!
//! ```text
//! ML_alpha(s) = sum_n s^n / (Gamma(2-alpha)^n * prod_{j=1..n} Gamma(j+1)/Gamma(j+1-alpha))
//! ```
//!
//! which reduces to `exp` when `alpha = 1`. This crate provides:
//!
//! * [`series`]: truncated complex power series and the termwise
//!   L-derivative / L-integral rules.
//! * [`special`]: gamma and beta functions, `ML_alpha`, its derivatives,
//!   matrix arguments and the classical two-parameter Mittag-Leffler function.
//! * [`operators`]: the L-integral and L-derivative of arbitrary functions by
//!   Gauss-Jacobi quadrature, closed forms for iterated integrals of powers,
//!   the Monte-Carlo beta representation and the Caputo-to-L conversion.
//! * [`linsolve`]: series solutions of `D x = A x + theta(t)`.
//! * [`sequential`]: constant-coefficient sequential equations via
//!   characteristic roots and the `t^k ML^(k)(lambda t)` basis.
//! * [`analytic2`]: order-two sequential equations with analytic coefficients.
//! * [`verify`]: independent oracles used by the test-suites and the CLI.
//!
//! ```
//! use lfrac::{special, FracOrder, Tolerance};
//! use num_complex::Complex64;
//!
//! let order = FracOrder::new(1.0).unwrap();
//! let e = special::ml_eval(order, Complex64::new(1.0, 0.0), &Tolerance::default()).unwrap();
//! assert!((e.value.re - std::f64::consts::E).abs() < 1e-14);
//! ```

pub mod analytic2;
mod error;
pub mod linsolve;
pub mod operators;
pub mod sequential;
pub mod series;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use series::{FracOrder, PowerSeries, Tolerance};
pub use special::ComplexMatrix;
