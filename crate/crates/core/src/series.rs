//! Truncated complex power series in `t` and the termwise L-fractional
//! calculus rules.
//!
//! For a monomial, `D t^(n+1) = F(n) t^n` with
//! `F(n) = Gamma(n+2) Gamma(2-alpha) / Gamma(n+2-alpha)`, and the L-integral is
//! its inverse on series vanishing at zero. `F` is always generated by the
//! recurrence `F(n) = F(n-1) (n+1) / (n+1-alpha)`, never by gamma quotients,
//! because both gammas overflow long before their ratio does.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

/// Fractional index `alpha` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(FracOrder(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    #[inline]
    pub fn alpha(self) -> f64 {
        self.0
    }
}

/// `F(0), ..., F(len - 1)` where `F(n) = Gamma(n+2) Gamma(2-alpha) / Gamma(n+2-alpha)`.
pub fn ld_factors(order: FracOrder, len: usize) -> Vec<f64> {
    let alpha = order.alpha();
    let mut out = Vec::with_capacity(len);
    let mut f = 1.0;
    for n in 0..len {
        if n > 0 {
            let m = n as f64 + 1.0;
            f *= m / (m - alpha);
        }
        out.push(f);
    }
    out
}

/// Stopping and budget parameters shared by every summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_terms: usize,
    pub stall_window: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_terms: 4096,
            stall_window: 5,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.rel_tol) || !positive(self.abs_tol) {
            return Err(Error::domain("tolerances must be finite and positive"));
        }
        if self.stall_window == 0 || self.max_terms < self.stall_window {
            return Err(Error::domain("need 1 <= stall_window <= max_terms"));
        }
        Ok(())
    }

    /// A term is negligible once it falls below `rel_tol * (1 + |sum|)`.
    #[inline]
    pub(crate) fn negligible(&self, term: f64, sum: f64) -> bool {
        term < self.rel_tol * (1.0 + sum)
    }
}

/// Value of a truncated series together with the magnitude of its last
/// retained term, used as a truncation-error proxy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: Complex64,
    pub err_est: f64,
}

/// `sum_{n=0}^{N} coeffs[n] t^n`; always holds `N + 1 >= 1` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// An empty coefficient list is read as the zero constant.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            PowerSeries::zero(0)
        } else {
            PowerSeries { coeffs }
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        PowerSeries::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(truncation_order: usize) -> Self {
        PowerSeries {
            coeffs: vec![Complex64::new(0.0, 0.0); truncation_order + 1],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        PowerSeries { coeffs: vec![c] }
    }

    /// `c t^n`, truncated at order `n`.
    pub fn monomial(c: Complex64, n: usize) -> Self {
        let mut s = PowerSeries::zero(n);
        s.coeffs[n] = c;
        s
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `t^n`, zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Copy truncated (or zero-padded) to order `n`.
    pub fn truncated(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n + 1, Complex64::new(0.0, 0.0));
        PowerSeries { coeffs }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|&c| c * a).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation without any convergence check.
    pub fn eval_raw(&self, t: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    /// Evaluate at `t >= 0`; see [`eval`].
    pub fn eval(&self, t: f64, tol: &Tolerance) -> Result<Evaluated> {
        eval(self, t, tol)
    }
}

/// Coefficientwise sum, padded to the longer operand.
pub fn add(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    let n = a.len().max(b.len());
    PowerSeries {
        coeffs: (0..n).map(|i| a.coeff(i) + b.coeff(i)).collect(),
    }
}

/// `c_n = sum_{l=0}^{n} a_l b_{n-l}`, truncated at `min(N_a, N_b)`.
pub fn cauchy_product(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    let n = a.truncation_order().min(b.truncation_order());
    let coeffs = (0..=n)
        .map(|k| {
            (0..=k).fold(Complex64::new(0.0, 0.0), |acc, l| {
                acc + a.coeffs[l] * b.coeffs[k - l]
            })
        })
        .collect();
    PowerSeries { coeffs }
}

/// Termwise L-fractional derivative; the truncation order drops by one.
pub fn ld_termwise(x: &PowerSeries, order: FracOrder) -> PowerSeries {
    let n = x.truncation_order();
    if n == 0 {
        return PowerSeries::zero(0);
    }
    let f = ld_factors(order, n);
    PowerSeries {
        coeffs: (0..n).map(|k| x.coeffs[k + 1] * f[k]).collect(),
    }
}

/// Termwise L-fractional integral; the truncation order grows by one and
/// the result vanishes at zero.
pub fn lj_termwise(x: &PowerSeries, order: FracOrder) -> PowerSeries {
    let n = x.truncation_order();
    let f = ld_factors(order, n + 1);
    let mut coeffs = Vec::with_capacity(n + 2);
    coeffs.push(Complex64::new(0.0, 0.0));
    coeffs.extend((0..=n).map(|k| x.coeffs[k] / f[k]));
    PowerSeries { coeffs }
}

/// Horner evaluation at `t >= 0` with the last retained term magnitude as
/// error proxy. Fails with `NotConverged` when the final `stall_window`
/// terms are all still above `rel_tol * (1 + |partial sum|)`.
pub fn eval(x: &PowerSeries, t: f64, tol: &Tolerance) -> Result<Evaluated> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::domain(format!("series evaluated at t = {t}")));
    }
    if t == 0.0 {
        return Ok(Evaluated {
            value: x.coeffs[0],
            err_est: 0.0,
        });
    }
    let value = x.eval_raw(t);
    let n = x.truncation_order();
    let term = |k: usize| x.coeffs[k].norm() * t.powi(k as i32);
    let err_est = term(n);
    let window = tol.stall_window;
    if n + 1 >= window {
        let sum = value.norm();
        let stalled = (n + 1 - window..=n).all(|k| !tol.negligible(term(k), sum));
        if stalled {
            return Err(Error::NotConverged {
                terms: n + 1,
                last_term: err_est,
            });
        }
    }
    Ok(Evaluated { value, err_est })
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        add(self, rhs)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        add(self, &-rhs)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        cauchy_product(self, rhs)
    }
}
