//! Property suites behind `lfrac verify`.

use std::f64::consts::TAU;

use lfrac::linsolve::{self, LinearSystemProblem, SourceTerm};
use lfrac::operators::{jacobi_rule, ld_apply, ld_rule, lj_apply, lj_iterated_power, mc_lj_oracle, McConfig};
use lfrac::sequential::{solve_first_order_chain, solve_sequential, ForcingAtom, SequentialProblem};
use lfrac::series::{ld_termwise, lj_termwise};
use lfrac::verify::{oracle_picard, OracleConfig};
use lfrac::{Complex64, ComplexMatrix, FracOrder, PowerSeries, Result, Tolerance};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SUITES: [&str; 5] = [
    "fundamental-theorem",
    "quadrature-vs-closed-form",
    "mc-oracle",
    "solver-equivalence",
    "paper-examples",
];

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, bound }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.bound
    }

    pub fn line(&self) -> String {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        format!("{tag}  {:<48} {:>10.3e}  (bound {:.1e})", self.name, self.value, self.bound)
    }
}

pub fn run(suite: &str, seed: u64) -> Option<Result<Vec<Check>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Some(match suite {
        "fundamental-theorem" => fundamental_theorem(&mut rng),
        "quadrature-vs-closed-form" => quadrature_vs_closed_form(&mut rng),
        "mc-oracle" => mc_oracle(seed),
        "solver-equivalence" => solver_equivalence(&mut rng),
        "paper-examples" => paper_examples(),
        _ => return None,
    })
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rand_c(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    c(rng.random_range(-r..r), rng.random_range(-r..r))
}

fn rand_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> PowerSeries {
    let n = rng.random_range(1..=max_deg + 1);
    PowerSeries::new((0..n).map(|_| rand_c(rng, 1.0)).collect())
}

fn derivative(x: &PowerSeries) -> PowerSeries {
    if x.len() < 2 {
        return PowerSeries::zero(0);
    }
    PowerSeries::new((1..x.len()).map(|n| x.coeff(n) * n as f64).collect())
}

fn fundamental_theorem(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut termwise_left = 0.0f64;
    let mut termwise_right = 0.0f64;
    let mut quad_left = 0.0f64;
    let mut quad_right = 0.0f64;
    for _ in 0..20 {
        let order = FracOrder::new(rng.random_range(0.05..=1.0))?;
        let x = rand_poly(rng, 12);
        let jx = lj_termwise(&x, order);
        let dx = ld_termwise(&x, order);
        let back = ld_termwise(&jx, order);
        let round = lj_termwise(&dx, order);
        for n in 0..x.len() {
            termwise_left = termwise_left.max((back.coeff(n) - x.coeff(n)).norm());
            let want = if n == 0 { c(0.0, 0.0) } else { x.coeff(n) };
            termwise_right = termwise_right.max((round.coeff(n) - want).norm());
        }

        let dj = derivative(&jx);
        let lrule = ld_rule(order, 40)?;
        let jrule = jacobi_rule(order, 40)?;
        for t in [0.3, 1.0] {
            let scale = 1.0 + x.eval_raw(t).norm();
            let d = ld_apply(|s| dj.eval_raw(s), order, t, &lrule)?;
            quad_left = quad_left.max((d - x.eval_raw(t)).norm() / scale);
            let j = lj_apply(|s| dx.eval_raw(s), order, t, &jrule)?;
            quad_right = quad_right.max((j - (x.eval_raw(t) - x.coeff(0))).norm() / scale);
        }
    }
    Ok(vec![
        Check::new("ld(lj x) = x, termwise coefficients", termwise_left, 1e-12),
        Check::new("lj(ld x) = x - x(0), termwise coefficients", termwise_right, 1e-12),
        Check::new("ld(lj x) = x, quadrature (relative)", quad_left, 1e-11),
        Check::new("lj(ld x) = x - x(0), quadrature (relative)", quad_right, 1e-11),
    ])
}

fn quadrature_vs_closed_form(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut powers = 0.0f64;
    let mut derivs = 0.0f64;
    for alpha in [0.25, 0.5, 0.9] {
        let order = FracOrder::new(alpha)?;
        let jrule = jacobi_rule(order, 40)?;
        let lrule = ld_rule(order, 40)?;
        for delta in [0.0, 1.0, 2.0, 3.0, 3.7] {
            let (coef, power) = lj_iterated_power(order, 1, delta)?;
            for t in [0.1, 1.0, 2.0] {
                let q = lj_apply(|s| c(s.powf(delta), 0.0), order, t, &jrule)?;
                let exact = coef * t.powf(power);
                powers = powers.max((q - c(exact, 0.0)).norm() / exact);
            }
        }
        for n in 1..=6usize {
            let nf = n as f64;
            let g = lfrac::special::gamma_fn(2.0 - alpha)? * lfrac::special::gamma_ratio(nf + 1.0, nf + 1.0 - alpha)?;
            for t in [0.1, 1.0, 2.0] {
                let q = ld_apply(|s| c(nf * s.powi(n as i32 - 1), 0.0), order, t, &lrule)?;
                let exact = g * t.powi(n as i32 - 1);
                derivs = derivs.max((q - c(exact, 0.0)).norm() / exact);
            }
        }
    }
    let mut polys = 0.0f64;
    for _ in 0..20 {
        let order = FracOrder::new(rng.random_range(0.05..=1.0))?;
        let rule = jacobi_rule(order, 20)?;
        let x = rand_poly(rng, 10);
        let closed = lj_termwise(&x, order);
        let t = rng.random_range(0.0..2.0);
        let q = lj_apply(|s| x.eval_raw(s), order, t, &rule)?;
        polys = polys.max((q - closed.eval_raw(t)).norm() / (1.0 + closed.eval_raw(t).norm()));
    }
    Ok(vec![
        Check::new("lj t^delta, delta in {0,1,2,3,3.7} (relative)", powers, 1e-12),
        Check::new("ld t^n, n = 1..6 (relative)", derivs, 1e-12),
        Check::new("lj of random polynomials vs termwise", polys, 1e-12),
    ])
}

fn mc_oracle(seed: u64) -> Result<Vec<Check>> {
    let t = 0.8;
    let mut cells = 0u32;
    let mut outside = 0u32;
    let mut worst_z = 0.0f64;
    for depth in 1..=3usize {
        for (d, delta) in [0.0, 0.5, 1.0, 2.0].into_iter().enumerate() {
            for (a, alpha) in [0.3, 0.7].into_iter().enumerate() {
                let order = FracOrder::new(alpha)?;
                let cell_seed = seed.wrapping_mul(1000).wrapping_add((100 * depth + 10 * d + a) as u64);
                let cfg = McConfig { samples: 200_000, seed: cell_seed, depth };
                let est = mc_lj_oracle(|s| c(s.powf(delta), 0.0), order, t, &cfg)?;
                let (coef, power) = lj_iterated_power(order, depth, delta)?;
                let z = (est.estimate - c(coef * t.powf(power), 0.0)).norm() / est.std_error;
                worst_z = worst_z.max(z);
                cells += 1;
                if z > 3.0 {
                    outside += 1;
                }
            }
        }
    }
    Ok(vec![
        Check::new(format!("cells outside 3 sigma (of {cells})"), outside as f64, (0.05 * cells as f64).floor()),
        Check::new("largest |z| across cells", worst_z, 5.0),
    ])
}

fn random_sequential(rng: &mut ChaCha8Rng) -> Result<SequentialProblem> {
    let order = FracOrder::new(rng.random_range(0.3..=1.0))?;
    let m = rng.random_range(1..=4usize);
    let coeffs = (0..m)
        .map(|_| Complex64::from_polar(rng.random_range(0.0..2.0), rng.random_range(0.0..TAU)))
        .collect();
    let init = (0..m).map(|_| rand_c(rng, 1.0)).collect();
    let n_forcing = rng.random_range(0..=2usize);
    let forcing = (0..n_forcing)
        .map(|_| ForcingAtom { beta: rand_c(rng, 1.0), mu: rand_c(rng, 1.5), j: rng.random_range(0..=2usize) })
        .collect();
    SequentialProblem::new(order, coeffs, init, forcing)
}

fn solver_equivalence(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let tol = Tolerance::default();
    let cfg = OracleConfig { picard_iters: 200, ..OracleConfig::default() };
    let points = [0.25, 0.5, 1.0];

    let mut sequential = 0.0f64;
    for _ in 0..10 {
        let p = random_sequential(rng)?;
        let sym = solve_sequential(&p)?;
        let chain = solve_first_order_chain(&p)?;
        let picard = oracle_picard(&p.to_linear_system()?, &cfg, &points)?;
        for (i, &t) in points.iter().enumerate() {
            let a = sym.eval(t, &tol)?;
            let b = chain.eval(t, &tol)?.value;
            let o = picard.values[i][0];
            sequential = sequential.max((a - b).norm()).max((a - o).norm()).max((b - o).norm());
        }
    }

    let mut systems = 0.0f64;
    for _ in 0..6 {
        let order = FracOrder::new(rng.random_range(0.3..=1.0))?;
        let entries: Vec<Complex64> = (0..4).map(|_| rand_c(rng, 1.0)).collect();
        let source = SourceTerm::FracPower((0..2).map(|_| (rand_c(rng, 1.0), rng.random_range(0.0..3.0))).collect());
        let x0 = (0..2).map(|_| rand_c(rng, 1.0)).collect();
        let p = LinearSystemProblem::new(order, ComplexMatrix::new(2, &entries)?, source, x0, 1.0)?;
        let sol = linsolve::solve(&p)?;
        let picard = oracle_picard(&p, &cfg, &points)?;
        for (i, &t) in points.iter().enumerate() {
            let (v, _) = sol.eval(t, &tol)?;
            for (a, b) in v.iter().zip(&picard.values[i]) {
                systems = systems.max((a - b).norm());
            }
        }
    }
    Ok(vec![
        Check::new("sequential: symbolic / chain / Picard", sequential, 1e-8),
        Check::new("linear systems: series / Picard", systems, 1e-8),
    ])
}

fn worked(order: FracOrder, coeffs: [Complex64; 2], mu: Complex64) -> Result<SequentialProblem> {
    SequentialProblem::new(
        order,
        coeffs.to_vec(),
        vec![c(3.0, 0.0), c(-1.0, 0.0)],
        vec![ForcingAtom { beta: c(3.0, 0.0), mu, j: 0 }],
    )
}

fn paper_examples() -> Result<Vec<Check>> {
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let mut worst = [0.0f64; 3];
    for alpha in [0.3, 0.5, 0.7, 0.9, 1.0] {
        let order = FracOrder::new(alpha)?;
        let cases = [
            (worked(order, [one, c(-2.0, 0.0)], c(2.0, 0.0))?, vec![((c(2.0, 0.0), 0), c(3.0, 0.0)), ((one, 0), c(0.0, 0.0)), ((one, 1), c(-7.0, 0.0))]),
            (worked(order, [one, c(-2.0, 0.0)], one)?, vec![((one, 2), c(1.5, 0.0)), ((one, 0), c(3.0, 0.0)), ((one, 1), c(-4.0, 0.0))]),
            (worked(order, [c(-1.0, 0.0), c(0.0, -2.0)], one)?, vec![((one, 0), c(0.0, 1.5)), ((i, 0), c(3.0, -1.5)), ((i, 1), c(-2.5, -4.5))]),
        ];
        for (e, (p, want)) in cases.iter().enumerate() {
            let s = solve_sequential(p)?;
            for &((lambda, k), w) in want {
                worst[e] = worst[e].max((s.coefficient_of(lambda, k) - w).norm());
            }
        }
    }
    Ok(vec![
        Check::new("example 1: distinct roots, forcing at a new root", worst[0], 1e-10),
        Check::new("example 2: double root, resonant forcing", worst[1], 1e-10),
        Check::new("example 3: complex double root", worst[2], 1e-10),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(run("nope", 1).is_none());
    }

    #[test]
    fn checks_compare_against_bound() {
        assert!(Check::new("a", 1e-13, 1e-12).passed());
        assert!(!Check::new("a", f64::NAN, 1e-12).passed());
        assert!(Check::new("a", 2.0, 1.0).line().starts_with("FAIL"));
    }
}
