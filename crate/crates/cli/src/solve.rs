//! Trajectories over a problem's grid.

use std::fmt::Write as _;

use lfrac::analytic2::{residual as analytic_residual, solve_analytic2};
use lfrac::linsolve::{self, SeriesSolution};
use lfrac::operators::lj_iterated_power;
use lfrac::sequential::solve_sequential;
use lfrac::series::{ld_termwise, lj_termwise};
use lfrac::special::{gamma_ratio, ml_deriv_eval};
use lfrac::{Complex64, Error, FracOrder, Result, Tolerance};

use crate::problem::{Kind, OperatorKind, OperatorPayload, ProblemFile, TolFlags};

pub struct Row {
    pub t: f64,
    pub values: Vec<Complex64>,
    pub err_est: f64,
}

pub struct Trajectory {
    pub n_components: usize,
    pub rows: Vec<Row>,
    pub summary: Vec<String>,
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for i in 0..self.n_components {
            write!(out, ",comp{i}_re,comp{i}_im").unwrap();
        }
        out.push_str(",err_est\n");
        for row in &self.rows {
            write!(out, "{:.16e}", row.t).unwrap();
            for v in &row.values {
                write!(out, ",{:.16e},{:.16e}", v.re, v.im).unwrap();
            }
            writeln!(out, ",{:.16e}", row.err_est).unwrap();
        }
        out
    }

    pub fn max_err_est(&self) -> f64 {
        self.rows.iter().map(|r| r.err_est).fold(0.0, f64::max)
    }
}

pub fn solve(problem: &ProblemFile, flags: &TolFlags) -> Result<Trajectory> {
    problem.validate()?;
    let tol = flags.resolve(problem.tol.as_ref())?;
    let order = problem.order()?;
    let grid = problem.grid.points();
    let horizon = problem.horizon();
    let mut summary = vec![format!("alpha: {}", problem.alpha), format!("grid points: {}", grid.len())];

    let (n_components, rows) = match &problem.kind {
        Kind::MlEval(p) => {
            summary.insert(0, "kind: ml_eval".into());
            let rows = grid
                .iter()
                .map(|&t| {
                    let v = ml_deriv_eval(order, p.k, p.lambda * t, &tol)?;
                    Ok(Row { t, values: vec![v.value], err_est: v.err_est })
                })
                .collect::<Result<Vec<_>>>()?;
            (1, rows)
        }
        Kind::Operator(p) => {
            summary.insert(0, "kind: operator".into());
            (1, operator_rows(p, order, &grid, &tol)?)
        }
        Kind::LinearSystem(p) => {
            summary.insert(0, "kind: linear_system".into());
            let lp = p.build(order, horizon, tol)?;
            let sol = linsolve::solve(&lp)?;
            summary.push(format!("max residual: {:e}", linsolve::residual(&lp, &sol)?));
            (lp.dim(), series_rows(&sol, &grid, &tol)?)
        }
        Kind::Sequential(p) => {
            summary.insert(0, "kind: sequential".into());
            let sp = p.build(order, horizon, tol)?;
            let symbolic = solve_sequential(&sp)?;
            let lp = sp.to_linear_system()?;
            let sol = linsolve::solve(&lp)?;
            let rows = series_rows(&sol, &grid, &tol)?;
            let mut gap = 0.0f64;
            for row in &rows {
                gap = gap.max((symbolic.eval(row.t, &tol)? - row.values[0]).norm());
            }
            summary.push(format!("max residual: {:e}", linsolve::residual(&lp, &sol)?));
            summary.push(format!("max |symbolic - series|: {gap:e}"));
            summary.push("symbolic solution:".into());
            summary.extend(symbolic.describe().into_iter().map(|s| format!("  {s}")));
            (sp.m(), rows)
        }
        Kind::Analytic2(p) => {
            summary.insert(0, "kind: analytic2".into());
            let ap = p.build(order);
            let x = solve_analytic2(&ap, p.n_terms)?;
            let dx = ld_termwise(&x, order);
            let rows = grid
                .iter()
                .map(|&t| {
                    let a = x.eval(t, &tol)?;
                    let b = dx.eval(t, &tol)?;
                    Ok(Row { t, values: vec![a.value, b.value], err_est: a.err_est.max(b.err_est) })
                })
                .collect::<Result<Vec<_>>>()?;
            summary.push(format!("max residual: {:e}", analytic_residual(&ap, &x)));
            (2, rows)
        }
    };
    let mut traj = Trajectory { n_components, rows, summary };
    traj.summary.push(format!("max err_est: {:e}", traj.max_err_est()));
    Ok(traj)
}

fn series_rows(sol: &SeriesSolution, grid: &[f64], tol: &Tolerance) -> Result<Vec<Row>> {
    grid.iter()
        .map(|&t| {
            let (values, err_est) = sol.eval(t, tol)?;
            Ok(Row { t, values, err_est })
        })
        .collect()
}

/// Closed forms: termwise on the polynomial part, gamma ratios on powers.
fn operator_rows(p: &OperatorPayload, order: FracOrder, grid: &[f64], tol: &Tolerance) -> Result<Vec<Row>> {
    let mut poly = crate::problem::series(&p.series);
    let mut powers = Vec::with_capacity(p.powers.len());
    for _ in 0..p.depth {
        poly = match p.op {
            OperatorKind::Lj => lj_termwise(&poly, order),
            OperatorKind::Ld => ld_termwise(&poly, order),
        };
    }
    for term in &p.powers {
        let (coef, power) = match p.op {
            OperatorKind::Lj => lj_iterated_power(order, p.depth, term.delta)?,
            OperatorKind::Ld => ld_power(order, p.depth, term.delta)?,
        };
        powers.push((term.coeff * coef, power));
    }
    grid.iter()
        .map(|&t| {
            let e = poly.eval(t, tol)?;
            let mut v = e.value;
            for &(c, power) in &powers {
                if c != Complex64::new(0.0, 0.0) {
                    v += c * t.powf(power);
                }
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Domain(format!("operator value is singular at t = {t}")));
            }
            Ok(Row { t, values: vec![v], err_est: e.err_est })
        })
        .collect()
}

/// `D^depth t^delta = coef t^power`; constants map to zero.
fn ld_power(order: FracOrder, depth: usize, delta: f64) -> Result<(f64, f64)> {
    let alpha = order.alpha();
    let g = lfrac::special::gamma_fn(2.0 - alpha)?;
    let (mut coef, mut power) = (1.0, delta);
    for _ in 0..depth {
        if power == 0.0 {
            return Ok((0.0, 0.0));
        }
        if power < 0.0 {
            return Err(Error::Domain(format!("L-derivative of t^{power} is not defined")));
        }
        coef *= g * gamma_ratio(power + 1.0, power + 1.0 - alpha)?;
        power -= 1.0;
    }
    Ok((coef, power))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Grid, MlEvalPayload, PowerTerm};

    fn file(kind: Kind, n_points: usize) -> ProblemFile {
        ProblemFile { alpha: 0.6, kind, grid: Grid { t_start: 0.0, t_end: 1.0, n_points }, tol: None }
    }

    #[test]
    fn csv_layout() {
        let c = Complex64::new;
        let p = file(Kind::MlEval(MlEvalPayload { lambda: c(1.0, 0.0), k: 0 }), 4);
        let csv = solve(&p, &TolFlags::default()).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "t,comp0_re,comp0_im,err_est");
        assert!(lines[1].starts_with("0.0000000000000000e0,1.0000000000000000e0,"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn ld_of_powers_matches_termwise() {
        let order = FracOrder::new(0.4).unwrap();
        let (coef, power) = ld_power(order, 2, 3.0).unwrap();
        let z = Complex64::new(0.0, 0.0);
        let x = crate::problem::series(&[z, z, z, Complex64::new(1.0, 0.0)]);
        let d2 = ld_termwise(&ld_termwise(&x, order), order);
        assert_eq!(power, 1.0);
        assert!((d2.coeff(1).re - coef).abs() < 1e-14 * coef);
        assert_eq!(ld_power(order, 1, 0.0).unwrap().0, 0.0);
    }

    #[test]
    fn operator_inverse_pair() {
        let c = Complex64::new;
        let powers = vec![PowerTerm { coeff: c(2.0, 0.0), delta: 1.5 }];
        let lj = OperatorPayload { op: OperatorKind::Lj, depth: 1, series: vec![c(1.0, 1.0)], powers: powers.clone() };
        let ld = OperatorPayload { op: OperatorKind::Ld, depth: 1, series: vec![], powers: vec![] };
        let order = FracOrder::new(0.5).unwrap();
        let tol = Tolerance::default();
        let rows = operator_rows(&lj, order, &[0.5], &tol).unwrap();
        let (coef, power) = lj_iterated_power(order, 1, 1.5).unwrap();
        let (dc, dp) = ld_power(order, 1, power).unwrap();
        assert!((dc * coef - 1.0).abs() < 1e-13 && (dp - 1.5).abs() < 1e-15);
        assert!(rows[0].values[0].norm() > 0.0);
        assert!(operator_rows(&ld, order, &[0.0], &tol).is_ok());
    }
}
