//! Series solutions of the linear system `D_L x = A x + theta(t)`,
//! `x(0) = x0`, for zero, fractional-power and power-series sources.
//!
//! With `F(n)` the termwise derivative factor, the integer-power part obeys
//! `F(n) x_{n+1} = A x_n + theta_n`. A source `l t^delta` in component `c`
//! contributes `sum_j A^j e_c l P_j t^(j+1+delta)`, where `P_j` solves the
//! same recurrence with `F` shifted by `delta`. The two parts are kept apart.

use num_complex::Complex64;

use crate::series::{ld_factors, FracOrder, PowerSeries, Tolerance};
use crate::special::{gamma_fn, gamma_ratio, ComplexMatrix};
use crate::{Error, Result};

const AUTO_START: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum SourceTerm {
    Zero,
    /// `(l_c, delta_c)` per component: `theta_c(t) = l_c t^delta_c`.
    FracPower(Vec<(Complex64, f64)>),
    /// One series per component; coefficients past the end count as zero.
    Series(Vec<PowerSeries>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystemProblem {
    pub order: FracOrder,
    pub acal: ComplexMatrix,
    pub source: SourceTerm,
    pub x0: Vec<Complex64>,
    pub horizon: f64,
    pub tol: Tolerance,
}

impl LinearSystemProblem {
    pub fn new(
        order: FracOrder,
        acal: ComplexMatrix,
        source: SourceTerm,
        x0: Vec<Complex64>,
        horizon: f64,
    ) -> Result<Self> {
        let p = LinearSystemProblem {
            order,
            acal,
            source,
            x0,
            horizon,
            tol: Tolerance::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_tol(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.acal.dim()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if self.x0.len() != d {
            return Err(Error::Dimension(format!("x0 has {} entries, matrix is {d}x{d}", self.x0.len())));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::domain("horizon must be positive and finite"));
        }
        match &self.source {
            SourceTerm::Zero => {}
            SourceTerm::FracPower(terms) => {
                if terms.len() != d {
                    return Err(Error::Dimension(format!("{} source terms for dimension {d}", terms.len())));
                }
                if terms.iter().any(|&(_, delta)| !(delta > 0.0 && delta.is_finite())) {
                    return Err(Error::domain("source powers must be positive"));
                }
            }
            SourceTerm::Series(s) => {
                if s.len() != d {
                    return Err(Error::Dimension(format!("{} source series for dimension {d}", s.len())));
                }
            }
        }
        self.tol.validate()
    }

    fn source_coeff(&self, n: usize) -> Vec<Complex64> {
        match &self.source {
            SourceTerm::Series(s) => s.iter().map(|c| c.coeff(n)).collect(),
            _ => vec![Complex64::new(0.0, 0.0); self.dim()],
        }
    }
}

/// `coeff * t^power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracTerm {
    pub coeff: Complex64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    /// Integer-power part, one series per component.
    pub components: Vec<PowerSeries>,
    /// Fractional-power part, per component.
    pub frac_terms: Vec<Vec<FracTerm>>,
}

impl SeriesSolution {
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Value of every component at `t` plus the largest error proxy.
    pub fn eval(&self, t: f64, tol: &Tolerance) -> Result<(Vec<Complex64>, f64)> {
        let mut err = 0.0f64;
        let mut out = Vec::with_capacity(self.dim());
        for (series, fracs) in self.components.iter().zip(&self.frac_terms) {
            let e = series.eval(t, tol)?;
            err = err.max(e.err_est);
            let mut v = e.value;
            let mut last = 0.0f64;
            for f in fracs {
                let term = if t == 0.0 { Complex64::new(0.0, 0.0) } else { f.coeff * t.powf(f.power) };
                last = term.norm();
                v += term;
            }
            err = err.max(last);
            out.push(v);
        }
        Ok((out, err))
    }
}

fn norm_inf(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest of the last `window` values `||x_n|| T^n` against the size of
/// the sum.
fn tail_ok(norms_times_pow: &[f64], total: f64, tol: &Tolerance) -> Result<()> {
    let w = tol.stall_window.min(norms_times_pow.len());
    let last = norms_times_pow[norms_times_pow.len() - w..]
        .iter()
        .copied()
        .fold(0.0, f64::max);
    if last.is_finite() && (last <= tol.abs_tol || last <= tol.rel_tol * (1.0 + total)) {
        Ok(())
    } else {
        Err(Error::NotConverged {
            terms: norms_times_pow.len(),
            last_term: last,
        })
    }
}

// Integer-power recurrence F(n) x_{n+1} = A x_n + theta_n.
fn integer_part(p: &LinearSystemProblem, n_terms: usize) -> Result<Vec<PowerSeries>> {
    if n_terms == 0 {
        return Err(Error::domain("n_terms must be at least one"));
    }
    let d = p.dim();
    let f = ld_factors(p.order, n_terms);
    let mut coeffs: Vec<Vec<Complex64>> = Vec::with_capacity(n_terms);
    coeffs.push(p.x0.clone());
    for n in 0..n_terms - 1 {
        let ax = p.acal.mul_vec(&coeffs[n]);
        let th = p.source_coeff(n);
        let next: Vec<Complex64> = ax.iter().zip(&th).map(|(a, b)| (a + b) / f[n]).collect();
        coeffs.push(next);
    }
    let t = p.horizon;
    let weighted: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(n, x)| norm_inf(x) * t.powi(n as i32))
        .collect();
    let components: Vec<PowerSeries> = (0..d)
        .map(|r| PowerSeries::new(coeffs.iter().map(|x| x[r]).collect()))
        .collect();
    let total = components
        .iter()
        .map(|s| s.eval_raw(t).norm())
        .fold(0.0, f64::max);
    tail_ok(&weighted, total, &p.tol)?;
    Ok(components)
}

/// `x_n = c_n A^n x0`.
pub fn solve_homogeneous(problem: &LinearSystemProblem, n_terms: usize) -> Result<SeriesSolution> {
    problem.validate()?;
    if problem.source != SourceTerm::Zero {
        return Err(Error::domain("solve_homogeneous needs a zero source"));
    }
    let components = integer_part(problem, n_terms)?;
    Ok(SeriesSolution {
        frac_terms: vec![Vec::new(); components.len()],
        components,
    })
}

/// Homogeneous part plus the closed-form fractional-power terms.
pub fn solve_fracpower(problem: &LinearSystemProblem, n_terms: usize) -> Result<SeriesSolution> {
    problem.validate()?;
    let SourceTerm::FracPower(terms) = &problem.source else {
        return Err(Error::domain("solve_fracpower needs a fractional-power source"));
    };
    let components = integer_part(problem, n_terms)?;
    let d = problem.dim();
    let alpha = problem.order.alpha();
    let g2 = gamma_fn(2.0 - alpha)?;
    let t = problem.horizon;

    let mut frac_terms = vec![Vec::<FracTerm>::new(); d];
    let mut total = 0.0f64;
    let mut worst_tail = Vec::new();
    for (c, &(ell, delta)) in terms.iter().enumerate() {
        // v_j = A^j e_c l P_j, P_j = P_{j-1} / F_delta(j)
        let mut fd = g2 * gamma_ratio(2.0 + delta, 2.0 + delta - alpha)?;
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[c] = ell / fd;
        let mut weighted = Vec::with_capacity(n_terms);
        for j in 0..n_terms {
            if j > 0 {
                let k = j as f64 + 1.0 + delta;
                fd *= k / (k - alpha);
                v = problem.acal.mul_vec(&v);
                for z in v.iter_mut() {
                    *z /= fd;
                }
            }
            let power = j as f64 + 1.0 + delta;
            weighted.push(norm_inf(&v) * t.powf(power));
            for r in 0..d {
                frac_terms[r].push(FracTerm { coeff: v[r], power });
            }
        }
        total = total.max(weighted.iter().sum::<f64>());
        worst_tail.push(weighted);
    }
    for w in &worst_tail {
        tail_ok(w, total, &problem.tol)?;
    }
    Ok(SeriesSolution {
        components,
        frac_terms,
    })
}

/// Power-series source via `F(n) x_{n+1} = A x_n + theta_n`.
pub fn solve_series_source(problem: &LinearSystemProblem, n_terms: usize) -> Result<SeriesSolution> {
    problem.validate()?;
    if matches!(problem.source, SourceTerm::FracPower(_)) {
        return Err(Error::domain("solve_series_source needs a series or zero source"));
    }
    let components = integer_part(problem, n_terms)?;
    Ok(SeriesSolution {
        frac_terms: vec![Vec::new(); components.len()],
        components,
    })
}

/// Dispatch on the source and grow the truncation from 32 terms by
/// doubling until the tail at the horizon is negligible.
pub fn solve(problem: &LinearSystemProblem) -> Result<SeriesSolution> {
    let solver = match problem.source {
        SourceTerm::Zero => solve_homogeneous,
        SourceTerm::FracPower(_) => solve_fracpower,
        SourceTerm::Series(_) => solve_series_source,
    };
    let cap = problem.tol.max_terms;
    let mut n = AUTO_START.min(cap);
    loop {
        match solver(problem, n) {
            Err(Error::NotConverged { .. }) if n < cap => n = (2 * n).min(cap),
            other => return other,
        }
    }
}

/// Largest coefficient of `D_L x - A x - theta` over the orders where the
/// truncated solution determines it.
pub fn residual(problem: &LinearSystemProblem, sol: &SeriesSolution) -> Result<f64> {
    problem.validate()?;
    let d = problem.dim();
    if sol.dim() != d || sol.frac_terms.len() != d {
        return Err(Error::Dimension("solution and problem dimensions differ".into()));
    }
    let alpha = problem.order.alpha();
    let g2 = gamma_fn(2.0 - alpha)?;

    // Integer orders 0..N-1.
    let n_int = sol.components.iter().map(|s| s.truncation_order()).min().unwrap_or(0);
    let f = ld_factors(problem.order, n_int.max(1));
    let mut worst = 0.0f64;
    for n in 0..n_int {
        let xn: Vec<Complex64> = sol.components.iter().map(|s| s.coeff(n)).collect();
        let ax = problem.acal.mul_vec(&xn);
        let th = problem.source_coeff(n);
        for r in 0..d {
            let lhs = sol.components[r].coeff(n + 1) * f[n];
            worst = worst.max((lhs - ax[r] - th[r]).norm());
        }
    }

    // Fractional powers: (power, residual vector) merged by power.
    let mut parts: Vec<(f64, Vec<Complex64>)> = Vec::new();
    let mut add = |power: f64, r: usize, v: Complex64| {
        match parts.iter_mut().find(|(p, _)| (p - power).abs() < 1e-9) {
            Some((_, vec)) => vec[r] += v,
            None => {
                let mut vec = vec![Complex64::new(0.0, 0.0); d];
                vec[r] = v;
                parts.push((power, vec));
            }
        }
    };
    let mut powers: Vec<f64> = Vec::new();
    for (r, fracs) in sol.frac_terms.iter().enumerate() {
        for ft in fracs {
            // D_L t^p = Gamma(2-a) Gamma(p+1) / Gamma(p+1-a) t^(p-1)
            let k = g2 * gamma_ratio(ft.power + 1.0, ft.power + 1.0 - alpha)?;
            add(ft.power - 1.0, r, ft.coeff * k);
            powers.push(ft.power);
        }
    }
    for r in 0..d {
        for ft in &sol.frac_terms[r] {
            for (i, slot) in (0..d).map(|i| (i, problem.acal.get(i, r))) {
                add(ft.power, i, -slot * ft.coeff);
            }
        }
    }
    if let SourceTerm::FracPower(terms) = &problem.source {
        for (r, &(ell, delta)) in terms.iter().enumerate() {
            add(delta, r, -ell);
        }
    }
    if !powers.is_empty() {
        // The top term of each chain has no partner at the next power.
        let per_chain = sol.frac_terms[0].len() / d.max(1);
        let min_delta = match &problem.source {
            SourceTerm::FracPower(t) => t.iter().map(|x| x.1).fold(f64::INFINITY, f64::min),
            _ => powers.iter().copied().fold(f64::INFINITY, f64::min) - 1.0,
        };
        let cutoff = min_delta + per_chain as f64 - 1e-9;
        for (p, v) in &parts {
            if *p < cutoff {
                worst = worst.max(norm_inf(v));
            }
        }
    }
    Ok(worst)
}
