//! Reference computations that share no code path with what they check:
//! double-double series sums with per-term gamma values, brute-force
//! convolution, Picard iteration by quadrature, and an exact integer
//! identity.

mod dd;

use num_complex::Complex64;

use crate::linsolve::{LinearSystemProblem, SourceTerm};
use crate::operators::{jacobi_rule, lj_iterated_power, QuadratureRule};
use crate::special::{gamma_fn, gamma_ratio};
use crate::{Error, Result};

pub use dd::{CDD, DD};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub precision_terms: usize,
    pub picard_iters: usize,
    pub mc_samples: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            precision_terms: 200,
            picard_iters: 30,
            mc_samples: 1_000_000,
        }
    }
}

const MAX_ORACLE_TERMS: usize = 200_000;

/// `ML_alpha(s)` from `precision_terms` terms, each factor
/// `Gamma(n+1-alpha) / (Gamma(2-alpha) Gamma(n+1))` evaluated directly and
/// the sum carried in double-double.
pub fn oracle_ml(alpha: f64, s: Complex64, cfg: &OracleConfig) -> Complex64 {
    let g2 = DD::new(gamma_fn(2.0 - alpha).expect("alpha in (0,1]"));
    let s = CDD::new(s);
    let mut term = CDD::new(Complex64::new(1.0, 0.0));
    let mut sum = term;
    // At least `precision_terms` terms, then on until they vanish.
    for n in 1..MAX_ORACLE_TERMS {
        let n = n as f64;
        let f = DD::new(gamma_ratio(n + 1.0 - alpha, n + 1.0).expect("positive arguments")) / g2;
        term = (term * s).scale(f);
        sum = sum + term;
        let mag = term.to_c64().norm();
        if n as usize + 1 >= cfg.precision_terms && mag <= 1e-34 * (1.0 + sum.to_c64().norm()) {
            break;
        }
    }
    sum.to_c64()
}

/// `ML_{1/2}(s) = sum_n s^n prod_{j<=n} C(2j,j) / 2^(n^2)`, with the
/// ratio `C(2j,j)/2^(2j-1) = 2 prod_{i<=j} (2i-1)/(2i)` in double-double.
pub fn oracle_ml_half_binomial(s: Complex64, n_terms: usize) -> Complex64 {
    let s = CDD::new(s);
    let mut central = DD::ONE;
    let mut term = CDD::new(Complex64::new(1.0, 0.0));
    let mut sum = term;
    for j in 1..n_terms {
        let j = j as f64;
        central = central * DD::new(2.0 * j - 1.0) / DD::new(2.0 * j);
        term = (term * s).scale(central * DD::new(2.0));
        sum = sum + term;
    }
    sum.to_c64()
}

/// `E_{a,b}(s) = sum s^n / Gamma(n a + b)` over `n_terms` terms, stopping
/// early once the gamma argument leaves double range.
pub fn oracle_classical_ml(alpha: f64, beta: f64, s: Complex64, n_terms: usize) -> Complex64 {
    let s = CDD::new(s);
    let mut power = CDD::new(Complex64::new(1.0, 0.0));
    let mut sum = CDD::default();
    for n in 0..n_terms {
        let arg = n as f64 * alpha + beta;
        if arg > 171.0 {
            break;
        }
        let g = DD::new(gamma_fn(arg).expect("positive argument"));
        sum = sum + CDD { re: power.re / g, im: power.im / g };
        power = power * s;
    }
    sum.to_c64()
}

/// Plain double loop `c_n = sum_{l<=n} a_l b_{n-l}` up to the shorter length.
pub fn brute_force_convolution(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().min(b.len());
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, ai) in a.iter().enumerate().take(n) {
        for (j, bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Both sides of `(l+1) sum_{k=0}^{n-1-l} (n-k-1)...(n-k-l) = n(n-1)...(n-l)`.
pub fn oracle_identity_jeiloo(n: u32, l: u32) -> Result<(u128, u128)> {
    if !(l < n && n <= 30) {
        return Err(Error::domain("need 0 <= l < n <= 30"));
    }
    let falling = |top: u32, len: u32| -> u128 { (0..len).map(|i| (top - i) as u128).product() };
    let sum: u128 = (0..n - l).map(|k| falling(n - k - 1, l)).sum();
    Ok(((l as u128 + 1) * sum, falling(n, l + 1)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardResult {
    /// Final iterate at the requested points.
    pub values: Vec<Vec<Complex64>>,
    /// Max-norm distance between successive iterates on the grid.
    pub increments: Vec<f64>,
}

const PICARD_GRID: usize = 200;
const PICARD_NODES: usize = 60;

/// Chebyshev-Lobatto nodes on `[0, T]` with barycentric interpolation.
struct Grid {
    t: Vec<f64>,
    w: Vec<f64>,
}

impl Grid {
    fn new(horizon: f64, n: usize) -> Self {
        let t = (0..=n)
            .map(|k| horizon * (1.0 - (std::f64::consts::PI * k as f64 / n as f64).cos()) / 2.0)
            .collect();
        let w = (0..=n)
            .map(|k| {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                if k == 0 || k == n {
                    s / 2.0
                } else {
                    s
                }
            })
            .collect();
        Grid { t, w }
    }

    fn len(&self) -> usize {
        self.t.len()
    }

    /// Lagrange basis values at `x`, accumulated into `row` with factor `scale`.
    fn add_basis(&self, x: f64, scale: f64, row: &mut [f64]) {
        if let Some(k) = self.t.iter().position(|&tk| tk == x) {
            row[k] += scale;
            return;
        }
        let mut denom = 0.0;
        for (tk, wk) in self.t.iter().zip(&self.w) {
            denom += wk / (x - tk);
        }
        for (k, (tk, wk)) in self.t.iter().zip(&self.w).enumerate() {
            row[k] += scale * (wk / (x - tk)) / denom;
        }
    }
}

/// Row of the discretized L-integral at `t`: `J y(t) ~ sum_k row[k] y(t_k)`.
fn integral_row(grid: &Grid, rule: &QuadratureRule, norm: f64, t: f64) -> Vec<f64> {
    let mut row = vec![0.0; grid.len()];
    if t > 0.0 {
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            grid.add_basis(t * u, t * w / norm, &mut row);
        }
    }
    row
}

/// Picard iteration for `x = x0 + J(A x + theta)` on a Chebyshev grid.
///
/// A fractional-power source is split off analytically: its first and
/// second L-integrals use the closed form, and only the smoother remainder
/// is interpolated. The iteration starts from `x0 + J theta`.
pub fn oracle_picard(
    problem: &LinearSystemProblem,
    cfg: &OracleConfig,
    t_points: &[f64],
) -> Result<PicardResult> {
    problem.validate()?;
    let order = problem.order;
    let alpha = order.alpha();
    let d = problem.dim();
    let horizon = problem.horizon;
    let grid = Grid::new(horizon, PICARD_GRID);
    let rule = jacobi_rule(order, PICARD_NODES)?;
    let norm = gamma_fn(alpha)? * gamma_fn(2.0 - alpha)?;
    let a = &problem.acal;
    let zero = Complex64::new(0.0, 0.0);

    // J theta (added to every iterate) and the iteration-independent part
    // of J(A x): base(t) = J(A x0)(t) + J(A J theta or theta).
    let frac = match &problem.source {
        SourceTerm::FracPower(terms) => {
            let mut out = Vec::with_capacity(d);
            for &(ell, delta) in terms {
                let (c1, p1) = lj_iterated_power(order, 1, delta)?;
                let (c2, p2) = lj_iterated_power(order, 2, delta)?;
                out.push((ell, c1, p1, c2, p2));
            }
            Some(out)
        }
        _ => None,
    };
    let j_theta = |t: f64| -> Vec<Complex64> {
        match &frac {
            Some(f) if t > 0.0 => f.iter().map(|&(ell, c1, p1, ..)| ell * c1 * t.powf(p1)).collect(),
            _ => vec![zero; d],
        }
    };
    let ax0 = a.mul_vec(&problem.x0);
    let base = |t: f64| -> Vec<Complex64> {
        let mut v: Vec<Complex64> = ax0.iter().map(|z| z * t).collect();
        match (&problem.source, &frac) {
            (SourceTerm::FracPower(_), Some(f)) if t > 0.0 => {
                let jj: Vec<Complex64> = f.iter().map(|&(ell, _, _, c2, p2)| ell * c2 * t.powf(p2)).collect();
                for (vi, z) in v.iter_mut().zip(a.mul_vec(&jj)) {
                    *vi += z;
                }
            }
            (SourceTerm::Series(s), _) if t > 0.0 => {
                for (r, series) in s.iter().enumerate() {
                    let acc: Complex64 = rule
                        .nodes
                        .iter()
                        .zip(&rule.weights)
                        .map(|(&u, &w)| series.eval_raw(t * u) * w)
                        .sum();
                    v[r] += acc * (t / norm);
                }
            }
            _ => {}
        }
        v
    };

    let n = grid.len();
    let k_matrix: Vec<Vec<f64>> = grid.t.iter().map(|&t| integral_row(&grid, &rule, norm, t)).collect();
    let base_grid: Vec<Vec<Complex64>> = grid.t.iter().map(|&t| base(t)).collect();

    // s holds x - x0 - J theta on the grid.
    let mut s = vec![vec![zero; d]; n];
    let mut increments = Vec::with_capacity(cfg.picard_iters);
    let apply_k = |row: &[f64], a_s: &[Vec<Complex64>]| -> Vec<Complex64> {
        let mut acc = vec![zero; d];
        for (k, &w) in row.iter().enumerate() {
            if w != 0.0 {
                for r in 0..d {
                    acc[r] += a_s[k][r] * w;
                }
            }
        }
        acc
    };
    let mut prev_as: Vec<Vec<Complex64>> = vec![vec![zero; d]; n];
    for _ in 0..cfg.picard_iters {
        prev_as = s.iter().map(|v| a.mul_vec(v)).collect();
        let next: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                let kv = apply_k(&k_matrix[i], &prev_as);
                base_grid[i].iter().zip(kv).map(|(b, k)| b + k).collect()
            })
            .collect();
        let inc = next
            .iter()
            .zip(&s)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
            .fold(0.0, f64::max);
        increments.push(inc);
        s = next;
    }

    // Final iterate off the grid: x0 + J theta + base + K(A s_{last-1}).
    let values = t_points
        .iter()
        .map(|&t| {
            let row = integral_row(&grid, &rule, norm, t);
            let kv = apply_k(&row, &prev_as);
            let b = base(t);
            let jt = j_theta(t);
            (0..d).map(|r| problem.x0[r] + jt[r] + b[r] + kv[r]).collect()
        })
        .collect();
    Ok(PicardResult { values, increments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{FracOrder, PowerSeries, Tolerance};
    use crate::special::{ml_eval, ComplexMatrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ml_oracle_examples() {
        let cfg = OracleConfig::default();
        let e = oracle_ml(1.0, c(1.0, 0.0), &cfg);
        assert!((e.re - std::f64::consts::E).abs() < 1e-14);
        let h = oracle_ml(0.5, c(1.0, 0.0), &cfg);
        let b = oracle_ml_half_binomial(c(1.0, 0.0), 200);
        assert!((h - b).norm() < 1e-14 * b.norm());
        let alt = oracle_ml(0.5, c(-2.0, 0.0), &cfg);
        let b = oracle_ml_half_binomial(c(-2.0, 0.0), 200);
        assert!((alt - b).norm() < 1e-14);
    }

    #[test]
    fn classical_oracle_is_exp_at_one() {
        let v = oracle_classical_ml(1.0, 1.0, c(0.5, -1.0), 200);
        assert!((v - c(0.5, -1.0).exp()).norm() < 1e-15);
    }

    #[test]
    fn convolution_small_case() {
        let a = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let b = [c(0.0, 1.0), c(1.0, 0.0)];
        assert_eq!(brute_force_convolution(&a, &b), vec![c(0.0, 1.0), c(1.0, 2.0)]);
    }

    #[test]
    fn jeiloo_examples() {
        assert_eq!(oracle_identity_jeiloo(3, 1).unwrap(), (6, 6));
        for n in 1..=30 {
            assert_eq!(oracle_identity_jeiloo(n, 0).unwrap(), (n as u128, n as u128));
        }
        let (l, r) = oracle_identity_jeiloo(10, 4).unwrap();
        assert_eq!(l, r);
        assert_eq!(r, 10 * 9 * 8 * 7 * 6);
        assert!(oracle_identity_jeiloo(3, 3).is_err());
    }

    #[test]
    fn picard_scalar_homogeneous() {
        let order = FracOrder::new(0.6).unwrap();
        let p = LinearSystemProblem::new(order, ComplexMatrix::scalar(c(1.0, 0.0)), SourceTerm::Zero, vec![c(1.0, 0.0)], 0.5).unwrap();
        let r = oracle_picard(&p, &OracleConfig::default(), &[0.5]).unwrap();
        let e = ml_eval(order, c(0.5, 0.0), &Tolerance::default()).unwrap().value;
        assert!((r.values[0][0] - e).norm() < 1e-8);
        for w in r.increments[3..].windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn picard_constant_source_is_exact() {
        let order = FracOrder::new(0.3).unwrap();
        let src = SourceTerm::Series(vec![PowerSeries::constant(c(1.0, 0.0))]);
        let p = LinearSystemProblem::new(order, ComplexMatrix::zeros(1), src, vec![c(2.0, 0.0)], 1.0).unwrap();
        let cfg = OracleConfig { picard_iters: 1, ..OracleConfig::default() };
        let r = oracle_picard(&p, &cfg, &[0.0, 0.4, 1.0]).unwrap();
        for (v, t) in r.values.iter().zip([0.0, 0.4, 1.0]) {
            assert!((v[0] - c(2.0 + t, 0.0)).norm() < 1e-14);
        }
    }
}
