//! Gauss-Jacobi rules on `[0, 1]` and the quadrature forms of the
//! L-integral and L-derivative.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::series::FracOrder;
use crate::special::{gamma_fn, gamma_ratio};
use crate::{Error, Result};

/// Gauss rule for the weight `u^b (1-u)^a` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `(a, b)`: exponents of `(1-u)` and `u`.
    pub exponents: (f64, f64),
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum w_i f(u_i)`.
    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| f(u) * w)
            .sum()
    }
}

/// Golub-Welsch for `u^b (1-u)^a`, `a, b > -1`.
pub fn gauss_jacobi01(n_nodes: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n_nodes == 0 {
        return Err(Error::domain("quadrature needs at least one node"));
    }
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::domain(format!("Jacobi exponents ({a}, {b}) must exceed -1")));
    }
    let n = n_nodes;
    let ab = a + b;
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let fi = i as f64;
        j[(i, i)] = if i == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * fi + ab) * (2.0 * fi + ab + 2.0))
        };
        if i + 1 < n {
            let k = fi + 1.0;
            let beta = if i == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * k + ab;
                4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = beta.sqrt();
            j[(i, i + 1)] = off;
            j[(i + 1, i)] = off;
        }
    }
    // Total mass on [0,1] is B(b+1, a+1).
    let mass = gamma_fn(a + 1.0)? * gamma_ratio(b + 1.0, ab + 2.0)?;
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            ((1.0 + eig.eigenvalues[k]) / 2.0, mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(QuadratureRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        exponents: (a, b),
    })
}

/// Rule for the L-integral kernel `u^(1-alpha) (1-u)^(alpha-1)`.
pub fn jacobi_rule(order: FracOrder, n_nodes: usize) -> Result<QuadratureRule> {
    let alpha = order.alpha();
    gauss_jacobi01(n_nodes, alpha - 1.0, 1.0 - alpha)
}

/// Rule for the L-derivative kernel `(1-u)^(-alpha)`; plain Gauss-Legendre
/// when `alpha = 1`, where the kernel is not used.
pub fn ld_rule(order: FracOrder, n_nodes: usize) -> Result<QuadratureRule> {
    let alpha = order.alpha();
    let a = if alpha < 1.0 { -alpha } else { 0.0 };
    gauss_jacobi01(n_nodes, a, 0.0)
}

fn check_rule(rule: &QuadratureRule, expected: (f64, f64)) -> Result<()> {
    if rule.exponents != expected {
        return Err(Error::domain(format!(
            "quadrature rule has exponents {:?}, expected {:?}",
            rule.exponents, expected
        )));
    }
    Ok(())
}

/// `t / (Gamma(alpha) Gamma(2-alpha)) * sum w_i y(t u_i)`.
pub fn lj_apply(
    y: impl Fn(f64) -> Complex64,
    order: FracOrder,
    t: f64,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    let alpha = order.alpha();
    check_rule(rule, (alpha - 1.0, 1.0 - alpha))?;
    if !(t >= 0.0) {
        return Err(Error::domain(format!("L-integral at t = {t}")));
    }
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let scale = t / (gamma_fn(alpha)? * gamma_fn(2.0 - alpha)?);
    Ok(rule.integrate(|u| y(t * u)) * scale)
}

/// `(1-alpha) int_0^1 (1-w)^(-alpha) x'(t w) dw`, with `x'` supplied.
pub fn ld_apply(
    dx: impl Fn(f64) -> Complex64,
    order: FracOrder,
    t: f64,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    let alpha = order.alpha();
    if !(t >= 0.0) {
        return Err(Error::domain(format!("L-derivative at t = {t}")));
    }
    if t == 0.0 || alpha == 1.0 {
        return Ok(dx(t));
    }
    check_rule(rule, (-alpha, 0.0))?;
    Ok(rule.integrate(|w| dx(t * w)) * (1.0 - alpha))
}

/// Closed form of the `m`-fold L-integral of `t^delta`: returns
/// `(coefficient, m + delta)`.
pub fn lj_iterated_power(order: FracOrder, m: usize, delta: f64) -> Result<(f64, f64)> {
    let alpha = order.alpha();
    if m == 0 {
        return Err(Error::domain("iteration count must be at least one"));
    }
    if !(delta > alpha - 2.0) || !delta.is_finite() {
        return Err(Error::domain(format!("power {delta} must exceed alpha - 2")));
    }
    let g2 = gamma_fn(2.0 - alpha)?;
    let mut coef = 1.0;
    for i in 2..=m + 1 {
        let i = i as f64;
        coef *= gamma_ratio(i - alpha + delta, i + delta)? / g2;
    }
    Ok((coef, m as f64 + delta))
}

/// Operator-norm bound of the `m`-fold L-integral on `C[0, T]`.
pub fn lj_norm_bound(order: FracOrder, m: usize, horizon: f64) -> Result<f64> {
    if !(horizon > 0.0) {
        return Err(Error::domain("horizon must be positive"));
    }
    let (coef, _) = lj_iterated_power(order, m, 0.0)?;
    Ok(coef * horizon.powi(m as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::beta_fn;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn order(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn rule_examples() {
        let leg = jacobi_rule(order(1.0), 12).unwrap();
        assert!((leg.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        for a in [0.1, 0.4, 0.5, 0.9] {
            let r = jacobi_rule(order(a), 25).unwrap();
            let mass = beta_fn(2.0 - a, a).unwrap();
            assert!((r.weights.iter().sum::<f64>() - mass).abs() < 1e-12 * mass);
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.nodes[0] > 0.0 && *r.nodes.last().unwrap() < 1.0);
            assert!(r.weights.iter().all(|&w| w > 0.0));
        }
        let r = jacobi_rule(order(0.5), 10).unwrap();
        let first = r.integrate(|u| c(u)).re;
        let expected = gamma_fn(2.5).unwrap() * gamma_fn(0.5).unwrap() / gamma_fn(3.0).unwrap();
        assert!((first - expected).abs() < 1e-13 * expected);
        assert!(gauss_jacobi01(0, 0.0, 0.0).is_err());
    }

    #[test]
    fn rule_is_exact_to_degree_2n_minus_1() {
        let a = 0.3;
        let n = 6;
        let r = jacobi_rule(order(a), n).unwrap();
        for k in 0..2 * n {
            let q = r.integrate(|u| c(u.powi(k as i32))).re;
            let exact = beta_fn(2.0 - a + k as f64, a).unwrap();
            assert!((q - exact).abs() < 1e-13 * exact, "k={k}");
        }
    }

    #[test]
    fn lj_apply_examples() {
        for a in [0.3, 0.5, 1.0] {
            let rule = jacobi_rule(order(a), 20).unwrap();
            for t in [0.2, 1.0, 3.0] {
                let v = lj_apply(|_| c(1.0), order(a), t, &rule).unwrap();
                assert!((v.re - t).abs() < 1e-13 * t);
                let v = lj_apply(c, order(a), t, &rule).unwrap();
                let expected = t * t * gamma_fn(3.0 - a).unwrap()
                    / (gamma_fn(2.0 - a).unwrap() * gamma_fn(3.0).unwrap());
                assert!((v.re - expected).abs() < 1e-13 * expected);
            }
            assert_eq!(lj_apply(|s| c(s.exp()), order(a), 0.0, &rule).unwrap(), c(0.0));
        }
        let wrong = jacobi_rule(order(0.3), 5).unwrap();
        assert!(lj_apply(c, order(0.6), 1.0, &wrong).is_err());
    }

    #[test]
    fn ld_apply_examples() {
        for a in [0.2, 0.5, 0.8, 1.0] {
            let rule = ld_rule(order(a), 20).unwrap();
            for t in [0.0, 0.5, 2.0] {
                let v = ld_apply(|_| c(1.0), order(a), t, &rule).unwrap();
                assert!((v.re - 1.0).abs() < 1e-13);
                let v = ld_apply(|_| c(0.0), order(a), t, &rule).unwrap();
                assert_eq!(v, c(0.0));
            }
        }
        let rule = ld_rule(order(0.5), 20).unwrap();
        let v = ld_apply(|s| c(2.0 * s), order(0.5), 1.0, &rule).unwrap();
        assert!((v.re - 4.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn ld_apply_tends_to_derivative_at_zero() {
        let a = order(0.6);
        let rule = ld_rule(a, 30).unwrap();
        let dx = |s: f64| c(s.cos() + 2.0 * s);
        let mut prev = f64::INFINITY;
        for k in 2..=6 {
            let t = 10f64.powi(-k);
            let err = (ld_apply(dx, a, t, &rule).unwrap() - dx(0.0)).norm();
            assert!(err < prev);
            assert!(err < 10.0 * t);
            prev = err;
        }
    }

    #[test]
    fn iterated_power_examples() {
        let a = 0.45;
        let (coef, p) = lj_iterated_power(order(a), 1, 0.0).unwrap();
        assert!((coef - 1.0).abs() < 1e-15 && p == 1.0);
        let (coef, p) = lj_iterated_power(order(a), 2, 0.0).unwrap();
        let expected = gamma_fn(3.0 - a).unwrap() / (gamma_fn(2.0 - a).unwrap() * 2.0);
        assert!((coef - expected).abs() < 1e-14 * expected && p == 2.0);
        let (coef, p) = lj_iterated_power(order(1.0), 1, 1.0).unwrap();
        assert!((coef - 0.5).abs() < 1e-15 && p == 2.0);
        assert!(lj_iterated_power(order(a), 1, a - 2.0).is_err());
        assert!(lj_iterated_power(order(a), 0, 1.0).is_err());
    }

    #[test]
    fn norm_bound_examples() {
        let a = order(0.35);
        assert!((lj_norm_bound(a, 1, 2.5).unwrap() - 2.5).abs() < 1e-14);
        let mut fact = 1.0;
        for m in 1..8 {
            fact *= m as f64;
            let b = lj_norm_bound(order(1.0), m, 1.7).unwrap();
            let exact = 1.7f64.powi(m as i32) / fact;
            assert!((b - exact).abs() < 1e-14 * exact);
        }
        let horizon = 3.0;
        let mut prev_ratio = f64::INFINITY;
        for m in 1..60 {
            let r = lj_norm_bound(a, m + 1, horizon).unwrap() / lj_norm_bound(a, m, horizon).unwrap();
            let alpha = a.alpha();
            let mf = m as f64;
            let expected = horizon * gamma_ratio(mf + 2.0 - alpha, mf + 2.0).unwrap()
                / gamma_fn(2.0 - alpha).unwrap();
            assert!((r - expected).abs() < 1e-12 * expected);
            assert!(r < prev_ratio);
            prev_ratio = r;
        }
        // the ratio decays like m^-alpha
        let far = 1e6;
        let limit = horizon * gamma_ratio(far + 2.0 - a.alpha(), far + 2.0).unwrap() / gamma_fn(2.0 - a.alpha()).unwrap();
        assert!(limit < 0.05 && limit < prev_ratio);
    }
}
