//! Rewriting a Caputo system `D^alpha x = A x + b(t)` as the L-system
//! `D_L x = Gamma(2-alpha) A x + Gamma(2-alpha) t^(alpha-1) b(t)`.

use num_complex::Complex64;

use crate::series::FracOrder;
use crate::special::{gamma_fn, ComplexMatrix};
use crate::Result;

/// Where `t^(alpha-1) b(t)` is sampled in place of its limit at `t = 0`.
const ORIGIN_PROBE: f64 = 1e-200;

pub type VectorFn = Box<dyn Fn(f64) -> Vec<Complex64> + Send + Sync>;

/// Returns `(Gamma(2-alpha) A, theta)`. The caller guarantees that
/// `b(t) / t^(1-alpha)` has a finite limit at zero.
pub fn caputo_to_l<B>(a: &ComplexMatrix, b: B, order: FracOrder) -> Result<(ComplexMatrix, VectorFn)>
where
    B: Fn(f64) -> Vec<Complex64> + Send + Sync + 'static,
{
    let alpha = order.alpha();
    let g = gamma_fn(2.0 - alpha)?;
    let acal = a.scale(Complex64::new(g, 0.0));
    let theta: VectorFn = Box::new(move |t: f64| {
        let t = if t == 0.0 && alpha < 1.0 { ORIGIN_PROBE } else { t };
        let factor = g * t.powf(alpha - 1.0);
        b(t).into_iter().map(|v| v * factor).collect()
    });
    Ok((acal, theta))
}
