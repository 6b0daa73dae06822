//! The L-integral and L-derivative applied to general functions.
//!
//! `J y(t) = (Gamma(alpha) Gamma(2-alpha))^-1 int_0^t (t-s)^(alpha-1) s^(1-alpha) y(s) ds`
//! becomes, after `s = t u`, an integral against the Jacobi weight
//! `u^(1-alpha) (1-u)^(alpha-1)`, which Gauss-Jacobi handles exactly for
//! polynomial `y`.

mod caputo;
mod montecarlo;
mod quadrature;

pub use caputo::{caputo_to_l, VectorFn};
pub use montecarlo::{mc_lj_oracle, McConfig, McEstimate, MIN_SAMPLES};
pub use quadrature::{
    gauss_jacobi01, jacobi_rule, ld_apply, ld_rule, lj_apply, lj_iterated_power, lj_norm_bound,
    QuadratureRule,
};
