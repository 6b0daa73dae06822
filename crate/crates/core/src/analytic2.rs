//! Order-2 sequential equations with analytic coefficients,
//! `D^2 x + p(t) D x + q(t) x = c(t)`, solved by power-series recurrence.

use num_complex::Complex64;

use crate::series::{ld_factors, ld_termwise, FracOrder, PowerSeries};
use crate::special::{gamma_fn, gamma_ratio};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Analytic2Problem {
    pub order: FracOrder,
    pub p: PowerSeries,
    pub q: PowerSeries,
    pub c: PowerSeries,
    /// `(x(0), (D x)(0))`.
    pub init: (Complex64, Complex64),
    pub horizon: f64,
}

impl Analytic2Problem {
    pub fn homogeneous(order: FracOrder, p: PowerSeries, q: PowerSeries, init: (Complex64, Complex64)) -> Self {
        Analytic2Problem {
            order,
            p,
            q,
            c: PowerSeries::zero(0),
            init,
            horizon: f64::INFINITY,
        }
    }

    /// Fractional Airy equation `D^2 x + a t x = 0`.
    pub fn airy(order: FracOrder, a: Complex64, init: (Complex64, Complex64)) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::homogeneous(order, PowerSeries::zero(0), PowerSeries::new(vec![zero, a]), init)
    }

    /// Fractional Hermite equation `D^2 x - 2 t D x + a x = 0`.
    pub fn hermite(order: FracOrder, a: Complex64, init: (Complex64, Complex64)) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::homogeneous(
            order,
            PowerSeries::new(vec![zero, Complex64::new(-2.0, 0.0)]),
            PowerSeries::constant(a),
            init,
        )
    }
}

/// Coefficients `x_0..x_{n_terms-1}`. Input coefficients past their
/// truncation order count as zero.
pub fn solve_analytic2(problem: &Analytic2Problem, n_terms: usize) -> Result<PowerSeries> {
    if n_terms < 2 {
        return Err(Error::domain("analytic solution needs at least two terms"));
    }
    let f = ld_factors(problem.order, n_terms);
    let mut x = Vec::with_capacity(n_terms);
    x.push(problem.init.0);
    x.push(problem.init.1);
    for n in 0..n_terms - 2 {
        let mut acc = problem.c.coeff(n);
        for l in 0..=n {
            acc -= problem.p.coeff(n - l) * x[l + 1] * f[l] + problem.q.coeff(n - l) * x[l];
        }
        x.push(acc / (f[n + 1] * f[n]));
    }
    Ok(PowerSeries::new(x))
}

/// Largest retained coefficient of `D^2 x + p D x + q x - c`, relative to
/// `max(1, max |x_n|)`.
pub fn residual(problem: &Analytic2Problem, x: &PowerSeries) -> f64 {
    let order = problem.order;
    let n = x.truncation_order();
    if n < 2 {
        return 0.0;
    }
    let d1 = ld_termwise(x, order);
    let d2 = ld_termwise(&d1, order);
    let keep = n - 2;
    let lhs = &(&d2 + &(&problem.p.truncated(keep) * &d1.truncated(keep)))
        + &(&problem.q.truncated(keep) * &x.truncated(keep));
    let r = &lhs - &problem.c.truncated(keep);
    r.max_abs() / x.max_abs().max(1.0)
}

/// Coefficient of `t^(n-1)` in `D t^n`; zero for the constant.
fn ld_power_factor(alpha: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let n = n as f64;
    Ok(gamma_fn(2.0 - alpha)? * gamma_ratio(n + 1.0, n + 1.0 - alpha)?)
}

/// `a` for which the Hermite equation has a polynomial solution of degree
/// `i - 1`.
pub fn hermite_eigenvalue(order: FracOrder, i: usize) -> Result<f64> {
    if i == 0 {
        return Err(Error::domain("eigenvalue index starts at 1"));
    }
    Ok(2.0 * ld_power_factor(order.alpha(), i - 1)?)
}

// prod_{i=lo}^{hi} Gamma(i - alpha) / (Gamma(2 - alpha) Gamma(i)), one gamma
// factor per index.
fn gamma_block(alpha: f64, lo: usize, hi: usize) -> Result<f64> {
    let g2 = gamma_fn(2.0 - alpha)?;
    let mut r = 1.0;
    for i in lo..=hi {
        let i = i as f64;
        r *= gamma_ratio(i - alpha, i)? / g2;
    }
    Ok(r)
}

/// Basis `(y, z)` of the Airy equation with `y(0) = 1` and `z = t + ...`,
/// from the explicit gamma products.
pub fn airy_basis(order: FracOrder, a: Complex64, n_terms: usize) -> Result<(PowerSeries, PowerSeries)> {
    let alpha = order.alpha();
    let n_terms = n_terms.max(2);
    let zero = Complex64::new(0.0, 0.0);
    let mut y = vec![zero; n_terms];
    let mut z = vec![zero; n_terms];
    let mut n = 0usize;
    while 3 * n < n_terms {
        let sign_pow = (-a).powu(n as u32);
        y[3 * n] = sign_pow * gamma_pairs(alpha, n, 0)?;
        if 3 * n + 1 < n_terms {
            z[3 * n + 1] = sign_pow * gamma_pairs(alpha, n, 1)?;
        }
        n += 1;
    }
    Ok((PowerSeries::new(y), PowerSeries::new(z)))
}

// prod_{j=1}^{n} Gamma(3j+s-alpha) Gamma(3j+s+1-alpha) / (Gamma(2-alpha)^2 Gamma(3j+s) Gamma(3j+s+1))
fn gamma_pairs(alpha: f64, n: usize, s: usize) -> Result<f64> {
    let mut r = 1.0;
    for j in 1..=n {
        let b = 3 * j + s;
        r *= gamma_block(alpha, b, b + 1)?;
    }
    Ok(r)
}

/// Basis `(y, z)` of the Hermite equation: `y` odd with `y_1 = 1`, `z` even
/// with `z_0 = 1`, from the explicit gamma products.
pub fn hermite_basis(order: FracOrder, a: Complex64, n_terms: usize) -> Result<(PowerSeries, PowerSeries)> {
    let alpha = order.alpha();
    let n_terms = n_terms.max(2);
    let zero = Complex64::new(0.0, 0.0);
    let mut y = vec![zero; n_terms];
    let mut z = vec![zero; n_terms];
    let mut n = 0usize;
    while 2 * n < n_terms {
        let mut odd = Complex64::new(1.0, 0.0);
        let mut even = Complex64::new(1.0, 0.0);
        for i in 1..=n {
            odd *= 2.0 * ld_power_factor(alpha, 2 * i - 1)? - a;
            even *= 2.0 * ld_power_factor(alpha, 2 * i - 2)? - a;
        }
        if n > 0 {
            odd *= gamma_block(alpha, 3, 2 * n + 2)?;
            even *= gamma_block(alpha, 2, 2 * n + 1)?;
        }
        z[2 * n] = even;
        if 2 * n + 1 < n_terms {
            y[2 * n + 1] = odd;
        }
        n += 1;
    }
    Ok((PowerSeries::new(y), PowerSeries::new(z)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn order(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    fn close(a: &PowerSeries, b: &PowerSeries, tol: f64) -> bool {
        let n = a.len().max(b.len());
        (0..n).all(|i| (a.coeff(i) - b.coeff(i)).norm() <= tol * (1.0 + b.coeff(i).norm()))
    }

    #[test]
    fn zero_coefficients_give_a_line() {
        let p = Analytic2Problem::homogeneous(order(0.4), PowerSeries::zero(0), PowerSeries::zero(0), (c(2.0, 0.0), c(-1.0, 1.0)));
        let x = solve_analytic2(&p, 10).unwrap();
        assert_eq!(x.coeff(0), c(2.0, 0.0));
        assert_eq!(x.coeff(1), c(-1.0, 1.0));
        assert!((2..10).all(|n| x.coeff(n) == c(0.0, 0.0)));
        assert!(solve_analytic2(&p, 1).is_err());
    }

    #[test]
    fn basis_pair_has_identity_wronskian() {
        let a = order(0.6);
        let q = PowerSeries::new(vec![c(1.0, 0.0), c(0.5, 0.0)]);
        let pp = PowerSeries::new(vec![c(0.3, 0.0)]);
        let y = solve_analytic2(&Analytic2Problem::homogeneous(a, pp.clone(), q.clone(), (c(1.0, 0.0), c(0.0, 0.0))), 8).unwrap();
        let z = solve_analytic2(&Analytic2Problem::homogeneous(a, pp, q, (c(0.0, 0.0), c(1.0, 0.0))), 8).unwrap();
        let dy = ld_termwise(&y, a);
        let dz = ld_termwise(&z, a);
        let det = y.coeff(0) * dz.coeff(0) - z.coeff(0) * dy.coeff(0);
        assert_eq!(det, c(1.0, 0.0));
    }

    #[test]
    fn classical_hermite_recurrence() {
        let a_val = 3.0;
        let p = Analytic2Problem::hermite(order(1.0), c(a_val, 0.0), (c(1.0, 0.0), c(0.5, 0.0)));
        let x = solve_analytic2(&p, 30).unwrap();
        for n in 0..28 {
            let nf = n as f64;
            let expected = x.coeff(n) * ((2.0 * nf - a_val) / ((nf + 2.0) * (nf + 1.0)));
            assert!((x.coeff(n + 2) - expected).norm() <= 1e-15 * (1.0 + expected.norm()));
        }
    }

    #[test]
    fn airy_closed_form_matches_recurrence() {
        for alpha in [0.4, 0.8, 1.0] {
            let a = c(1.3, -0.4);
            let (y, z) = airy_basis(order(alpha), a, 61).unwrap();
            let ry = solve_analytic2(&Analytic2Problem::airy(order(alpha), a, (c(1.0, 0.0), c(0.0, 0.0))), 61).unwrap();
            let rz = solve_analytic2(&Analytic2Problem::airy(order(alpha), a, (c(0.0, 0.0), c(1.0, 0.0))), 61).unwrap();
            assert!(close(&y, &ry, 1e-12));
            assert!(close(&z, &rz, 1e-12));
            assert!((0..20).all(|n| y.coeff(3 * n + 2) == c(0.0, 0.0)));
        }
        let (y, z) = airy_basis(order(0.5), c(0.0, 0.0), 10).unwrap();
        assert_eq!(y, PowerSeries::constant(c(1.0, 0.0)).truncated(9));
        assert_eq!(z, PowerSeries::monomial(c(1.0, 0.0), 1).truncated(9));
    }

    #[test]
    fn classical_airy() {
        // x_{3n} = (-1)^n / prod 3j (3j - 1)
        let (y, _) = airy_basis(order(1.0), c(1.0, 0.0), 31).unwrap();
        let mut expected = 1.0;
        for n in 1..=10 {
            let j = 3.0 * n as f64;
            expected *= -1.0 / (j * (j - 1.0));
            assert!((y.coeff(3 * n).re - expected).abs() <= 1e-14 * expected.abs());
        }
    }

    #[test]
    fn hermite_closed_form_matches_recurrence() {
        for alpha in [0.4, 0.8, 1.0] {
            for a in [c(0.7, 0.0), c(-1.5, 2.0), c(5.0, 0.0)] {
                let (y, z) = hermite_basis(order(alpha), a, 61).unwrap();
                let ry = solve_analytic2(&Analytic2Problem::hermite(order(alpha), a, (c(0.0, 0.0), c(1.0, 0.0))), 61).unwrap();
                let rz = solve_analytic2(&Analytic2Problem::hermite(order(alpha), a, (c(1.0, 0.0), c(0.0, 0.0))), 61).unwrap();
                assert!(close(&y, &ry, 1e-12), "alpha={alpha} a={a}");
                assert!(close(&z, &rz, 1e-12), "alpha={alpha} a={a}");
            }
        }
    }

    #[test]
    fn hermite_polynomials_terminate() {
        for alpha in [0.4, 0.8, 1.0] {
            for i in 1..=5usize {
                let a = c(hermite_eigenvalue(order(alpha), i).unwrap(), 0.0);
                let (y, z) = hermite_basis(order(alpha), a, 40).unwrap();
                let poly = if i % 2 == 0 { &y } else { &z };
                let degree = i - 1;
                assert!(poly.coeff(degree).norm() > 0.0);
                assert!((degree + 1..40).all(|n| poly.coeff(n) == c(0.0, 0.0)), "alpha={alpha} i={i}");
                let init = if i % 2 == 0 { (c(0.0, 0.0), c(1.0, 0.0)) } else { (c(1.0, 0.0), c(0.0, 0.0)) };
                let r = solve_analytic2(&Analytic2Problem::hermite(order(alpha), a, init), 40).unwrap();
                assert!((degree + 1..40).all(|n| r.coeff(n).norm() <= 1e-12));
            }
        }
        // classical: a = 2n
        assert_eq!(hermite_eigenvalue(order(1.0), 3).unwrap(), 4.0);
        assert_eq!(hermite_eigenvalue(order(0.3), 1).unwrap(), 0.0);
    }

    #[test]
    fn forced_residual_is_small() {
        let a = order(0.55);
        let p = Analytic2Problem {
            order: a,
            p: PowerSeries::new((0..30).map(|n| c(0.5f64.powi(n), 0.1)).collect()),
            q: PowerSeries::new(vec![c(1.0, 0.0), c(0.0, -1.0), c(0.25, 0.0)]),
            c: PowerSeries::new((0..30).map(|n| c(1.0 / (n as f64 + 1.0), 0.0)).collect()),
            init: (c(1.0, 0.0), c(0.0, 2.0)),
            horizon: 2.0,
        };
        let x = solve_analytic2(&p, 60).unwrap();
        assert!(residual(&p, &x) <= 1e-10);
        let mut bad = x.clone().into_coeffs();
        bad[7] += c(1e-6, 0.0);
        assert!(residual(&p, &PowerSeries::new(bad)) > 1e-8);
    }

    #[test]
    fn coefficients_respect_the_majorant() {
        let a = order(0.7);
        let horizon: f64 = 2.0;
        let p = Analytic2Problem {
            order: a,
            p: PowerSeries::new((0..201).map(|n| c(horizon.powi(-n), 0.0)).collect()),
            q: PowerSeries::new((0..201).map(|n| c(-horizon.powi(-n), 0.5 * horizon.powi(-n))).collect()),
            c: PowerSeries::zero(0),
            init: (c(1.0, 0.0), c(1.0, 0.0)),
            horizon,
        };
        let x = solve_analytic2(&p, 201).unwrap();
        let w = 0.9 * horizon;
        let scaled: Vec<f64> = (0..201).map(|n| x.coeff(n).norm() * w.powi(n as i32)).collect();
        assert!(scaled.iter().all(|v| v.is_finite()));
        assert!(scaled[150..].iter().all(|&v| v <= scaled[..150].iter().cloned().fold(1.0, f64::max)));
    }
}
