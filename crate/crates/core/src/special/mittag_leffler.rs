//! The Mittag-Leffler-type function `ML_alpha(s) = sum c_n s^n`, its
//! derivatives, and the classical two-parameter function used for
//! comparisons.

use num_complex::Complex64;

use super::gamma::{gamma_fn, gamma_ratio};
use crate::series::{FracOrder, Tolerance};
use crate::{Error, Result};

/// Coefficient table `c[0..=n_max]` of `ML_alpha`.
///
/// `c[n+1] / c[n] = g_n = Gamma(n+2-alpha) / (Gamma(2-alpha) Gamma(n+2))`, so
/// `g_0 = 1` and `g_n = g_{n-1} (n+1-alpha) / (n+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MLCoefficients {
    order: FracOrder,
    c: Vec<f64>,
}

impl MLCoefficients {
    pub fn order(&self) -> FracOrder {
        self.order
    }

    pub fn values(&self) -> &[f64] {
        &self.c
    }

    pub fn n_max(&self) -> usize {
        self.c.len() - 1
    }

    /// `c[n]`, extending nothing: panics past `n_max`.
    pub fn get(&self, n: usize) -> f64 {
        self.c[n]
    }

    /// Grow the table to `n_max` in place.
    pub fn extend_to(&mut self, n_max: usize) {
        if n_max > self.n_max() {
            *self = ml_coeffs(self.order, n_max);
        }
    }
}

/// The ratios `g_0, g_1, ...` as an endless iterator.
pub(crate) fn ratios(alpha: f64) -> impl Iterator<Item = f64> {
    let mut g = 1.0;
    let mut n = 0usize;
    std::iter::from_fn(move || {
        if n > 0 {
            let m = n as f64 + 1.0;
            g *= (m - alpha) / m;
        }
        n += 1;
        Some(g)
    })
}

pub fn ml_coeffs(order: FracOrder, n_max: usize) -> MLCoefficients {
    let mut c = Vec::with_capacity(n_max + 1);
    let mut cn = 1.0;
    for g in ratios(order.alpha()).take(n_max + 1) {
        c.push(cn);
        cn *= g;
    }
    MLCoefficients { order, c }
}

/// A summed series value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Magnitude of the last significant term.
    pub err_est: f64,
    /// Index of the last significant term plus one.
    pub n_terms_used: usize,
}

/// Neumaier compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Neumaier {
    sum: Complex64,
    comp: Complex64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: Complex64) {
        let t = self.sum + x;
        self.comp.re += two_sum_err(self.sum.re, x.re, t.re);
        self.comp.im += two_sum_err(self.sum.im, x.im, t.im);
        self.sum = t;
    }

    pub(crate) fn total(&self) -> Complex64 {
        self.sum + self.comp
    }
}

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    if a.abs() >= b.abs() {
        (a - s) + b
    } else {
        (b - s) + a
    }
}

/// Sum terms produced by `next` (called with the running index and previous
/// term) until `stall_window` consecutive terms are negligible.
pub(crate) fn sum_with_stall(
    first: Complex64,
    tol: &Tolerance,
    mut next: impl FnMut(usize, Complex64) -> Complex64,
) -> Result<SeriesValue> {
    tol.validate()?;
    let mut acc = Neumaier::default();
    let mut term = first;
    let mut small = 0usize;
    let mut last_sig = 0usize;
    let mut err_est = 0.0;
    for n in 0..tol.max_terms {
        if n > 0 {
            term = next(n - 1, term);
        }
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(Error::NotConverged {
                terms: n,
                last_term: f64::INFINITY,
            });
        }
        acc.add(term);
        let mag = term.norm();
        if mag <= tol.abs_tol || tol.negligible(mag, acc.total().norm()) {
            small += 1;
            if small >= tol.stall_window {
                return Ok(SeriesValue {
                    value: acc.total(),
                    err_est,
                    n_terms_used: last_sig + 1,
                });
            }
        } else {
            small = 0;
            last_sig = n;
            err_est = mag;
        }
    }
    Err(Error::NotConverged {
        terms: tol.max_terms,
        last_term: term.norm(),
    })
}

/// `ML_alpha(s)`.
pub fn ml_eval(order: FracOrder, s: Complex64, tol: &Tolerance) -> Result<SeriesValue> {
    ml_deriv_eval(order, 0, s, tol)
}

/// `ML_alpha^(k)(s) = sum_{n>=k} n!/(n-k)! c_n s^(n-k)`.
pub fn ml_deriv_eval(order: FracOrder, k: usize, s: Complex64, tol: &Tolerance) -> Result<SeriesValue> {
    let alpha = order.alpha();
    // c_k and g_k.. by the same recurrence as the table.
    let mut g_iter = ratios(alpha);
    let mut ck = 1.0;
    let mut fact = 1.0;
    for i in 0..k {
        ck *= g_iter.next().unwrap();
        fact *= (i + 1) as f64;
    }
    let mut g = g_iter;
    sum_with_stall(Complex64::new(fact * ck, 0.0), tol, move |m, prev| {
        // term_{m+1} / term_m = (m+k+1)/(m+1) * g_{m+k} * s
        let gn = g.next().unwrap();
        prev * s * (gn * (m + k + 1) as f64 / (m + 1) as f64)
    })
}

/// Classical `E_{a,b}(s) = sum s^n / Gamma(n a + b)`.
pub fn classical_ml_eval(alpha: f64, beta: f64, s: Complex64, tol: &Tolerance) -> Result<SeriesValue> {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::domain("classical Mittag-Leffler needs alpha, beta > 0"));
    }
    let first = Complex64::new(1.0 / gamma_fn(beta)?, 0.0);
    let mut failure = None;
    let r = sum_with_stall(first, tol, |n, prev| {
        let a = n as f64 * alpha + beta;
        match gamma_ratio(a, a + alpha) {
            Ok(q) => prev * s * q,
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(f64::NAN, 0.0)
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => r,
    }
}
