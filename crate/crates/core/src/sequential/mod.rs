//! Constant-coefficient sequential equations
//! `D^m x + a_{m-1} D^{m-1} x + ... + a_0 x = sum beta t^j ML^(j)(mu t)`,
//! with `D` the L-derivative and powers meaning composition.
//!
//! The homogeneous solutions are spanned by `t^k ML^(k)(lambda t)` over the
//! characteristic roots `lambda` and `k` below each multiplicity.

mod atoms;
mod roots;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::linsolve::{self, LinearSystemProblem, SourceTerm};
use crate::series::{FracOrder, PowerSeries, Tolerance};
use crate::special::{ml_deriv_eval, ComplexMatrix};
use crate::{Error, Result};

pub use atoms::{atom_ld, atom_series, basis_atoms, lwronskian0, BasisAtom, ForcingAtom};
pub use roots::{char_roots, RootSet};

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
const EXTRA_MATCH_ROWS: usize = 8;
const ANSATZ_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialProblem {
    pub order: FracOrder,
    /// `a_0..a_{m-1}`.
    pub coeffs: Vec<Complex64>,
    /// `x(0), (D x)(0), ..., (D^{m-1} x)(0)`.
    pub init: Vec<Complex64>,
    pub forcing: Vec<ForcingAtom>,
    /// Horizon used when a series representation is needed.
    pub horizon: f64,
    pub tol: Tolerance,
}

impl SequentialProblem {
    pub fn new(
        order: FracOrder,
        coeffs: Vec<Complex64>,
        init: Vec<Complex64>,
        forcing: Vec<ForcingAtom>,
    ) -> Result<Self> {
        let p = SequentialProblem {
            order,
            coeffs,
            init,
            forcing,
            horizon: 1.0,
            tol: Tolerance::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.coeffs.is_empty() {
            return Err(Error::domain("sequential equation needs order m >= 1"));
        }
        if self.init.len() != self.coeffs.len() {
            return Err(Error::Dimension(format!(
                "{} initial values for order {}",
                self.init.len(),
                self.coeffs.len()
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::domain("horizon must be positive"));
        }
        self.tol.validate()
    }

    /// Forcing as a series converged at the horizon.
    pub fn forcing_series(&self) -> Result<PowerSeries> {
        forcing_series(self.order, &self.forcing, self.horizon, &self.tol)
    }

    /// Companion system for `(x, D x, ..., D^{m-1} x)`.
    pub fn to_linear_system(&self) -> Result<LinearSystemProblem> {
        let m = self.m();
        let mut a = DMatrix::<Complex64>::zeros(m, m);
        for i in 0..m - 1 {
            a[(i, i + 1)] = Complex64::new(1.0, 0.0);
        }
        for q in 0..m {
            a[(m - 1, q)] = -self.coeffs[q];
        }
        let mut src = vec![PowerSeries::zero(0); m];
        src[m - 1] = self.forcing_series()?;
        let source = if self.forcing.is_empty() {
            SourceTerm::Zero
        } else {
            SourceTerm::Series(src)
        };
        Ok(LinearSystemProblem::new(
            self.order,
            ComplexMatrix::from_dmatrix(a)?,
            source,
            self.init.clone(),
            self.horizon,
        )?
        .with_tol(self.tol))
    }
}

/// `sum beta t^j ML^(j)(mu t)` with enough terms that the tail at `horizon`
/// is below tolerance.
pub fn forcing_series(order: FracOrder, forcing: &[ForcingAtom], horizon: f64, tol: &Tolerance) -> Result<PowerSeries> {
    let mut n = 32usize;
    loop {
        let mut acc = PowerSeries::zero(n - 1);
        for f in forcing {
            acc = &acc + &atom_series(order, f.atom(), n).scale(f.beta);
        }
        let w = tol.stall_window.min(n);
        let total: f64 = acc.coeffs().iter().enumerate().map(|(i, c)| c.norm() * horizon.powi(i as i32)).sum();
        let tail = (n - w..n)
            .map(|i| acc.coeff(i).norm() * horizon.powi(i as i32))
            .fold(0.0, f64::max);
        if tail <= tol.abs_tol || tail <= tol.rel_tol * (1.0 + total) {
            return Ok(acc);
        }
        if n >= tol.max_terms {
            return Err(Error::NotConverged { terms: n, last_term: tail });
        }
        n = (2 * n).min(tol.max_terms);
    }
}

/// One term `coeff * t^k ML^(k)(lambda t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionTerm {
    pub coeff: Complex64,
    pub atom: BasisAtom,
}

/// Finite combination of atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicSolution {
    pub order: FracOrder,
    pub terms: Vec<SolutionTerm>,
}

impl SymbolicSolution {
    /// Sum of the coefficients on atoms equal to `(lambda, k)`.
    pub fn coefficient_of(&self, lambda: Complex64, k: usize) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.atom.k == k && (t.atom.lambda - lambda).norm() <= 1e-12 * (1.0 + lambda.norm()))
            .map(|t| t.coeff)
            .sum()
    }

    pub fn series(&self, n_terms: usize) -> PowerSeries {
        self.terms.iter().fold(PowerSeries::zero(n_terms.max(1) - 1), |acc, t| {
            &acc + &atom_series(self.order, t.atom, n_terms).scale(t.coeff)
        })
    }

    /// `D_L^q` of the solution as a series.
    pub fn ld_series(&self, q: usize, n_terms: usize) -> PowerSeries {
        self.terms.iter().fold(PowerSeries::zero(n_terms.max(1) - 1), |acc, t| {
            &acc + &atom_ld(self.order, t.atom, q, n_terms).scale(t.coeff)
        })
    }

    /// Pointwise value through `ML^(k)` evaluations.
    pub fn eval(&self, t: f64, tol: &Tolerance) -> Result<Complex64> {
        let mut v = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let k = term.atom.k;
            if t == 0.0 && k > 0 {
                continue;
            }
            let d = ml_deriv_eval(self.order, k, term.atom.lambda * t, tol)?.value;
            v += term.coeff * d * t.powi(k as i32);
        }
        Ok(v)
    }

    /// `coeff · t^k · ML^(k)(λ t)` lines.
    pub fn describe(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|t| {
                format!(
                    "({}{:+}i) · t^{} · ML^({})({}{:+}i t)",
                    t.coeff.re, t.coeff.im, t.atom.k, t.atom.k, t.atom.lambda.re, t.atom.lambda.im
                )
            })
            .collect()
    }
}

/// Undetermined coefficients for the forcing atoms sharing one `mu`.
fn particular_group(
    problem: &SequentialProblem,
    roots: &RootSet,
    mu: Complex64,
    group: &[ForcingAtom],
) -> Result<Vec<SolutionTerm>> {
    let order = problem.order;
    let m = problem.m();
    let big_j = group.iter().map(|f| f.j).max().unwrap_or(0);
    let scale = roots.roots.iter().map(|r| r.0.norm()).fold(mu.norm(), f64::max).max(1.0);
    let (lambda, ks): (Complex64, Vec<usize>) = match roots.multiplicity_near(mu, DEFAULT_CLUSTER_TOL * scale) {
        Some((root, mult)) => (root, (mult..=big_j + mult).collect()),
        None => (mu, (0..=big_j).collect()),
    };
    let rows = big_j + m + EXTRA_MATCH_ROWS;
    let len = rows + m;
    // Rows are divided by c_n so that every coefficient is O(1).
    let row_scale: Vec<f64> = atom_series(order, BasisAtom { lambda: Complex64::new(1.0, 0.0), k: 0 }, rows)
        .coeffs()
        .iter()
        .map(|c| 1.0 / c.re)
        .collect();
    let apply_op = |atom: BasisAtom| -> PowerSeries {
        let mut acc = PowerSeries::zero(rows - 1);
        for q in 0..=m {
            let a_q = if q == m { Complex64::new(1.0, 0.0) } else { problem.coeffs[q] };
            if a_q.norm() == 0.0 {
                continue;
            }
            let d = atom_ld(order, atom, q, len - q).truncated(rows - 1);
            acc = &acc + &d.scale(a_q);
        }
        acc
    };
    let mut mat = DMatrix::<Complex64>::zeros(rows, ks.len());
    for (col, &k) in ks.iter().enumerate() {
        let s = apply_op(BasisAtom { lambda, k });
        for r in 0..rows {
            mat[(r, col)] = s.coeff(r) * row_scale[r];
        }
    }
    let mut rhs = DVector::<Complex64>::zeros(rows);
    for f in group {
        let s = atom_series(order, f.atom(), rows);
        for r in 0..rows {
            rhs[r] += f.beta * s.coeff(r) * row_scale[r];
        }
    }
    let svd = mat.clone().svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-13 * svd.singular_values.max())
        .map_err(|e| Error::domain(e.to_string()))?;
    let resid = (&mat * &sol - &rhs).norm();
    if !(resid <= ANSATZ_TOL * (1.0 + rhs.norm())) {
        return Err(Error::AnsatzMismatch(resid));
    }
    Ok(ks
        .iter()
        .zip(sol.iter())
        .map(|(&k, &coeff)| SolutionTerm {
            coeff,
            atom: BasisAtom { lambda, k },
        })
        .collect())
}

/// Roots, particular part by undetermined coefficients, then homogeneous
/// coefficients from the wronskian at zero.
pub fn solve_sequential(problem: &SequentialProblem) -> Result<SymbolicSolution> {
    problem.validate()?;
    let order = problem.order;
    let m = problem.m();
    let roots = char_roots(&problem.coeffs, DEFAULT_CLUSTER_TOL)?;
    let atoms = basis_atoms(&roots);
    let w = lwronskian0(order, &atoms)?;

    let mut groups: Vec<(Complex64, Vec<ForcingAtom>)> = Vec::new();
    for f in &problem.forcing {
        if f.beta.norm() == 0.0 {
            continue;
        }
        let tol = DEFAULT_CLUSTER_TOL * f.mu.norm().max(1.0);
        match groups.iter_mut().find(|g| (g.0 - f.mu).norm() <= tol) {
            Some(g) => g.1.push(*f),
            None => groups.push((f.mu, vec![*f])),
        }
    }
    let mut particular = Vec::new();
    for (mu, group) in &groups {
        particular.extend(particular_group(problem, &roots, *mu, group)?);
    }

    let part = SymbolicSolution {
        order,
        terms: particular.clone(),
    };
    let rhs = DVector::from_iterator(
        m,
        (0..m).map(|q| problem.init[q] - part.ld_series(q, 1).coeff(0)),
    );
    let c = w
        .as_dmatrix()
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularWronskian { det: 0.0 })?;
    let mut terms: Vec<SolutionTerm> = atoms
        .iter()
        .zip(c.iter())
        .map(|(&atom, &coeff)| SolutionTerm { coeff, atom })
        .collect();
    terms.extend(particular);
    Ok(SymbolicSolution { order, terms })
}

/// Closed form for `D^2 x + a1 D x + a0 x = 0`.
pub fn order2_closed_form(
    order: FracOrder,
    a1: Complex64,
    a0: Complex64,
    x0: Complex64,
    x01: Complex64,
) -> Result<SymbolicSolution> {
    let roots = char_roots(&[a0, a1], DEFAULT_CLUSTER_TOL)?;
    let terms = match roots.roots.as_slice() {
        &[(l1, 1), (l2, 1)] => vec![
            SolutionTerm {
                coeff: (x01 - l2 * x0) / (l1 - l2),
                atom: BasisAtom { lambda: l1, k: 0 },
            },
            SolutionTerm {
                coeff: (l1 * x0 - x01) / (l1 - l2),
                atom: BasisAtom { lambda: l2, k: 0 },
            },
        ],
        &[(l, 2)] => vec![
            SolutionTerm {
                coeff: x0,
                atom: BasisAtom { lambda: l, k: 0 },
            },
            SolutionTerm {
                coeff: x01 - l * x0,
                atom: BasisAtom { lambda: l, k: 1 },
            },
        ],
        _ => unreachable!("a quadratic has two roots counted with multiplicity"),
    };
    Ok(SymbolicSolution { order, terms })
}

/// Factor the operator as `prod (D - lambda_i)` and solve the scalar chain
/// `(D - lambda_1) y_1 = f`, `(D - lambda_i) y_i = y_{i-1}`, `x = y_m`.
pub fn solve_first_order_chain(problem: &SequentialProblem) -> Result<PowerSeries> {
    problem.validate()?;
    let order = problem.order;
    let roots = char_roots(&problem.coeffs, DEFAULT_CLUSTER_TOL)?;
    let lambdas: Vec<Complex64> = roots
        .roots
        .iter()
        .flat_map(|&(l, k)| std::iter::repeat_n(l, k))
        .collect();

    // y_i(0) from prod_{j>i} (z - lambda_j) applied to the initial data.
    let init_of = |i: usize| -> Complex64 {
        let mut p = vec![Complex64::new(1.0, 0.0)];
        for &l in &lambdas[i + 1..] {
            p = roots::mul_linear(&p, l);
        }
        p.iter().zip(&problem.init).map(|(b, x)| b * x).sum()
    };

    let forcing = problem.forcing_series()?;
    let mut n = 32usize.max(forcing.len());
    loop {
        match chain_with(problem, order, &lambdas, &init_of, &forcing, n) {
            Err(Error::NotConverged { .. }) if n < problem.tol.max_terms => {
                n = (2 * n).min(problem.tol.max_terms);
            }
            other => return other,
        }
    }
}

fn chain_with(
    problem: &SequentialProblem,
    order: FracOrder,
    lambdas: &[Complex64],
    init_of: &dyn Fn(usize) -> Complex64,
    forcing: &PowerSeries,
    n_terms: usize,
) -> Result<PowerSeries> {
    let mut source = forcing.clone();
    let mut y = PowerSeries::zero(0);
    for (i, &l) in lambdas.iter().enumerate() {
        let p = LinearSystemProblem::new(
            order,
            ComplexMatrix::scalar(l),
            SourceTerm::Series(vec![source]),
            vec![init_of(i)],
            problem.horizon,
        )?
        .with_tol(problem.tol);
        y = linsolve::solve_series_source(&p, n_terms)?.components.remove(0);
        source = y.clone();
    }
    Ok(y)
}
