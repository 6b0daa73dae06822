use std::path::{Path, PathBuf};
use std::process::Command;

use lfrac::analytic2::{hermite_basis, hermite_eigenvalue};
use lfrac::operators::lj_iterated_power;
use lfrac::verify::{oracle_ml, OracleConfig};
use lfrac::{Complex64, FracOrder};
use tempfile::TempDir;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn lfrac(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_lfrac")).args(args).output().unwrap();
    Output {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn solve_to(problem: &Path, csv: &Path) -> Output {
    lfrac(&["solve", problem.to_str().unwrap(), "--out", csv.to_str().unwrap()])
}

/// Rows of `(t, values)`; checks the header along the way.
fn read_csv(path: &Path, n_components: usize) -> Vec<(f64, Vec<Complex64>)> {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let mut header = vec!["t".to_string()];
    for i in 0..n_components {
        header.push(format!("comp{i}_re"));
        header.push(format!("comp{i}_im"));
    }
    header.push("err_est".into());
    assert_eq!(lines.next().unwrap(), header.join(","));
    lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            assert_eq!(f.len(), 2 + 2 * n_components);
            let vals = (0..n_components).map(|i| Complex64::new(f[1 + 2 * i], f[2 + 2 * i])).collect();
            (f[0], vals)
        })
        .collect()
}

fn ml_line(args: &[&str]) -> (f64, f64, usize) {
    let out = lfrac(&[&["ml-eval"], args].concat());
    assert_eq!(out.code, 0, "{}", out.stderr);
    let f: Vec<&str> = out.stdout.split_whitespace().collect();
    assert_eq!(f.len(), 3);
    (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
}

const EXAMPLE_ONE: &str = r#"{
  "alpha": 0.5,
  "kind": "sequential",
  "payload": {
    "coeffs": [[1, 0], [-2, 0]],
    "init": [[3, 0], [-1, 0]],
    "forcing": [{"beta": [3, 0], "mu": [2, 0], "j": 0}]
  },
  "grid": {"t_start": 0, "t_end": 1, "n_points": 11}
}"#;

#[test]
fn ml_eval_trivial_points() {
    let (re, im, _) = ml_line(&["1", "1", "0"]);
    assert!((re - std::f64::consts::E).abs() <= 1e-15 * re && im == 0.0);
    let out = lfrac(&["ml-eval", "0.5", "0", "0", "0"]);
    assert_eq!(out.stdout, "1 0 1\n");
}

#[test]
fn ml_eval_matches_oracle() {
    for (alpha, s) in [(0.5, Complex64::new(1.0, 0.0)), (0.3, Complex64::new(-1.0, 0.5)), (0.8, Complex64::new(0.0, -2.0))] {
        let (re, im, n) = ml_line(&[&alpha.to_string(), &s.re.to_string(), &s.im.to_string()]);
        let o = oracle_ml(alpha, s, &OracleConfig::default());
        assert!((Complex64::new(re, im) - o).norm() <= 1e-12 * (1.0 + o.norm()), "alpha {alpha}");
        assert!(n > 1);
    }
}

#[test]
fn ml_eval_derivative_at_one_is_exp() {
    let (re, _, _) = ml_line(&["1", "0.5", "0", "3"]);
    assert!((re - 0.5f64.exp()).abs() <= 1e-14);
}

#[test]
fn exit_codes() {
    assert_eq!(lfrac(&["ml-eval", "half", "1", "0"]).code, 2);
    assert_eq!(lfrac(&["ml-eval", "1.5", "1", "0"]).code, 2);
    assert_eq!(lfrac(&["ml-eval", "0.5", "1", "0", "--tol-rel", "-1"]).code, 2);
    assert_eq!(lfrac(&["frobnicate"]).code, 2);
    assert_eq!(lfrac(&["verify", "no-such-suite"]).code, 2);
    let slow = lfrac(&["ml-eval", "0.05", "0", "1.45"]);
    assert_eq!(slow.code, 3);
    assert!(slow.stderr.contains("not converged"));
    assert_eq!(lfrac(&["ml-eval", "0.5", "3", "0", "--max-terms", "5"]).code, 3);

    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(solve_to(&missing, &dir.path().join("o.csv")).code, 2);
    let bad = write(&dir, "bad.json", &EXAMPLE_ONE.replace("\"alpha\": 0.5", "\"alpha\": 0"));
    assert_eq!(solve_to(&bad, &dir.path().join("o.csv")).code, 2);
    let malformed = write(&dir, "m.json", &EXAMPLE_ONE.replace("[-2, 0]", "\"-2\""));
    assert_eq!(solve_to(&malformed, &dir.path().join("o.csv")).code, 2);
    let short = write(&dir, "s.json", EXAMPLE_ONE);
    let out = lfrac(&["solve", short.to_str().unwrap(), "--out", dir.path().join("o.csv").to_str().unwrap(), "--max-terms", "8"]);
    assert_eq!(out.code, 3, "{}", out.stderr);
}

/// `(coeff, k, lambda)` from a summary line `(c) · t^k · ML^(k)(l t)`.
fn parse_term(line: &str) -> (Complex64, usize, Complex64) {
    let complex = |s: &str| {
        let s = s.trim().trim_end_matches('i');
        let split = s[1..].rfind(['+', '-']).unwrap() + 1;
        Complex64::new(s[..split].parse().unwrap(), s[split..].parse().unwrap())
    };
    let line = line.trim();
    let close = line.find(") · t^").unwrap();
    let coeff = complex(&line[1..close]);
    let rest = &line[close + ") · t^".len()..];
    let k: usize = rest[..rest.find(' ').unwrap()].parse().unwrap();
    let open = rest.find(")(").unwrap() + 2;
    let lambda = complex(rest[open..].trim_end_matches(" t)"));
    (coeff, k, lambda)
}

#[test]
fn solve_reports_worked_example_coefficients() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "ex1.json", EXAMPLE_ONE);
    let csv = dir.path().join("ex1.csv");
    let out = solve_to(&p, &csv);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let terms: Vec<_> = out.stdout.lines().filter(|l| l.contains("ML^(")).map(parse_term).collect();
    assert_eq!(terms.len(), 3);
    let coef = |k: usize, lambda: f64| {
        terms
            .iter()
            .find(|(_, tk, tl)| *tk == k && (tl - Complex64::new(lambda, 0.0)).norm() < 1e-9)
            .map(|(c, _, _)| *c)
            .unwrap()
    };
    assert!((coef(0, 2.0) - 3.0).norm() <= 1e-10);
    assert!(coef(0, 1.0).norm() <= 1e-10);
    assert!((coef(1, 1.0) + 7.0).norm() <= 1e-10);

    let resid: f64 = out
        .stdout
        .lines()
        .find_map(|l| l.strip_prefix("max residual: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(resid < 1e-10);

    let rows = read_csv(&csv, 2);
    assert_eq!(rows.len(), 11);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
    assert_eq!(rows[0].1, vec![Complex64::new(3.0, 0.0), Complex64::new(-1.0, 0.0)]);
}

#[test]
fn csv_uses_full_precision() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "ex1.json", EXAMPLE_ONE);
    let csv = dir.path().join("ex1.csv");
    assert_eq!(solve_to(&p, &csv).code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    for field in text.lines().skip(1).flat_map(|l| l.split(',')) {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{field}");
    }
}

#[test]
fn solve_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "ex1.json", EXAMPLE_ONE);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(solve_to(&p, &a).code, 0);
    assert_eq!(solve_to(&p, &b).code, 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let stdout_csv = lfrac(&["solve", p.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(stdout_csv.stdout.as_bytes(), std::fs::read(&a).unwrap().as_slice());
    assert!(stdout_csv.stderr.contains("symbolic solution"));
}

#[test]
fn scalar_system_column_matches_ml_eval() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "scalar.json",
        r#"{"alpha": 0.7, "kind": "linear_system",
            "payload": {"matrix": [[[1, 0]]], "x0": [[1, 0]]},
            "grid": {"t_start": 0, "t_end": 1, "n_points": 6}}"#,
    );
    let csv = dir.path().join("scalar.csv");
    let out = solve_to(&p, &csv);
    assert_eq!(out.code, 0, "{}", out.stderr);
    for (t, v) in read_csv(&csv, 1) {
        let (re, im, _) = ml_line(&["0.7", &t.to_string(), "0"]);
        assert!((v[0] - Complex64::new(re, im)).norm() <= 1e-13 * (1.0 + re.abs()), "t = {t}");
    }
}

#[test]
fn hermite_preset_is_a_polynomial() {
    let alpha = 0.6;
    let order = FracOrder::new(alpha).unwrap();
    let a = hermite_eigenvalue(order, 4).unwrap();
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "hermite.json",
        &format!(
            r#"{{"alpha": {alpha}, "kind": "analytic2",
                "payload": {{"preset": "hermite", "a": [{a:?}, 0], "init": [[0, 0], [1, 0]]}},
                "grid": {{"t_start": 0, "t_end": 2, "n_points": 9}}}}"#
        ),
    );
    let csv = dir.path().join("hermite.csv");
    let out = solve_to(&p, &csv);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let resid: f64 = out.stdout.lines().find_map(|l| l.strip_prefix("max residual: ")).unwrap().parse().unwrap();
    assert!(resid < 1e-10);

    let (y, _) = hermite_basis(order, Complex64::new(a, 0.0), 64).unwrap();
    assert!((4..64).all(|n| y.coeff(n).norm() <= 1e-14));
    let cubic = |t: f64| y.coeff(1) * t + y.coeff(3) * t.powi(3);
    for (t, v) in read_csv(&csv, 2) {
        assert!((v[0] - cubic(t)).norm() <= 1e-13 * (1.0 + cubic(t).norm()), "t = {t}");
    }
}

#[test]
fn operator_problem_matches_closed_form() {
    let alpha = 0.4;
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "op.json",
        r#"{"alpha": 0.4, "kind": "operator",
            "payload": {"op": "lj", "depth": 2, "powers": [{"coeff": [2, 0], "delta": 0.5}]},
            "grid": {"t_start": 0, "t_end": 1.5, "n_points": 4}}"#,
    );
    let csv = dir.path().join("op.csv");
    assert_eq!(solve_to(&p, &csv).code, 0);
    let (coef, power) = lj_iterated_power(FracOrder::new(alpha).unwrap(), 2, 0.5).unwrap();
    for (t, v) in read_csv(&csv, 1) {
        let exact = 2.0 * coef * t.powf(power);
        assert!((v[0].re - exact).abs() <= 1e-14 * (1.0 + exact) && v[0].im == 0.0);
    }
}

#[test]
fn verify_suites_pass() {
    for suite in ["fundamental-theorem", "quadrature-vs-closed-form", "mc-oracle", "solver-equivalence", "paper-examples"] {
        let out = lfrac(&["verify", suite]);
        assert_eq!(out.code, 0, "{suite}:\n{}", out.stdout);
        assert!(!out.stdout.contains("FAIL"));
        assert!(out.stdout.lines().count() >= 3);
    }
}

#[test]
fn verify_is_deterministic_under_seed() {
    let a = lfrac(&["verify", "mc-oracle", "--seed", "9"]);
    let b = lfrac(&["verify", "mc-oracle", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.contains("seed 9"));
}
