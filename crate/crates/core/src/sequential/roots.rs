//! Roots of the monic characteristic polynomial by Aberth iteration, with
//! clustering of numerically repeated roots.

use num_complex::Complex64;

use crate::{Error, Result};

const MAX_SWEEPS: usize = 1000;
const CLUSTER_FLOOR: f64 = 1e-10;

/// Distinct roots with multiplicities; the multiplicities sum to the degree.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<(Complex64, usize)>,
}

impl RootSet {
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.1).sum()
    }

    /// `a_0..a_{m-1}` of `prod (z - lambda)^mult`.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let mut p = vec![Complex64::new(1.0, 0.0)];
        for &(lambda, mult) in &self.roots {
            for _ in 0..mult {
                p = mul_linear(&p, lambda);
            }
        }
        p.pop();
        p
    }

    /// Multiplicity of the root within `tol` of `z`, or zero.
    pub fn multiplicity_near(&self, z: Complex64, tol: f64) -> Option<(Complex64, usize)> {
        self.roots.iter().copied().find(|(l, _)| (l - z).norm() <= tol)
    }
}

/// Multiply a coefficient list (lowest degree first) by `z - lambda`.
pub(crate) fn mul_linear(p: &[Complex64], lambda: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); p.len() + 1];
    for (i, &c) in p.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= c * lambda;
    }
    out
}

// p(z), p'(z) and the Horner rounding bound for the monic polynomial with
// lower coefficients `a`.
fn horner(a: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let m = a.len();
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut bound = 1.0;
    let az = z.norm();
    for i in (0..m).rev() {
        dp = dp * z + p;
        p = p * z + a[i];
        bound = bound * az + a[i].norm();
    }
    (p, dp, 4.0 * (m as f64 + 1.0) * f64::EPSILON * bound)
}

/// `q`-th derivative coefficients of the monic polynomial.
fn derivative(a: &[Complex64], q: usize) -> Vec<Complex64> {
    let mut full: Vec<Complex64> = a.to_vec();
    full.push(Complex64::new(1.0, 0.0));
    for _ in 0..q {
        full = full
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i as f64)
            .collect();
    }
    full
}

fn eval_full(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

fn aberth(a: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = a.len();
    if m == 1 {
        return Ok(vec![-a[0]]);
    }
    let radius = a
        .iter()
        .enumerate()
        .map(|(i, c)| c.norm().powf(1.0 / (m - i) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / m as f64 + 0.4))
        .collect();
    for _ in 0..MAX_SWEEPS {
        let mut done = true;
        for i in 0..m {
            let (p, dp, bound) = horner(a, z[i]);
            if p.norm() <= bound {
                continue;
            }
            done = false;
            let ratio = p / dp;
            let repulsion: Complex64 = (0..m)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
            } else {
                z[i] += Complex64::new(radius * 1e-3, radius * 1e-3);
            }
        }
        if done {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence(MAX_SWEEPS))
}

/// All roots of `z^m + a_{m-1} z^{m-1} + ... + a_0`; roots closer than
/// `tol_cluster` times the largest root magnitude (at least `1e-10`), or
/// whose inclusion discs overlap, are merged at their mean and polished by
/// Newton on the matching derivative of the polynomial.
pub fn char_roots(coeffs: &[Complex64], tol_cluster: f64) -> Result<RootSet> {
    let m = coeffs.len();
    if m == 0 {
        return Err(Error::domain("characteristic polynomial needs degree at least one"));
    }
    if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::domain("non-finite polynomial coefficient"));
    }
    // Exact zero roots come off first.
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let rest = &coeffs[zeros..];
    let mut found = if rest.is_empty() { Vec::new() } else { aberth(rest)? };
    found.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zeros));

    let n = found.len();
    let radii: Vec<f64> = found
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let (p, _, _) = horner(coeffs, z);
            let prod: f64 = (0..n).filter(|&j| j != i).map(|j| (z - found[j]).norm()).product();
            if p.norm() == 0.0 {
                0.0
            } else {
                n as f64 * p.norm() / prod
            }
        })
        .collect();
    let scale = found.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let close = (tol_cluster * scale).max(CLUSTER_FLOOR);

    // Union-find over the merge relation.
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = (found[i] - found[j]).norm();
            if d < close || d <= radii[i] + radii[j] {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(found[i]),
            None => groups.push((r, vec![found[i]])),
        }
    }

    let mut roots: Vec<(Complex64, usize)> = groups
        .into_iter()
        .map(|(_, members)| {
            let mult = members.len();
            let mean = members.iter().sum::<Complex64>() / mult as f64;
            (polish(coeffs, mean, mult), mult)
        })
        .collect();
    roots.sort_by(|x, y| x.0.re.total_cmp(&y.0.re).then(x.0.im.total_cmp(&y.0.im)));
    Ok(RootSet { roots })
}

/// A root of multiplicity `k` is simple for the `(k-1)`-th derivative.
fn polish(coeffs: &[Complex64], start: Complex64, k: usize) -> Complex64 {
    let d = derivative(coeffs, k - 1);
    let mut z = start;
    let mut best = eval_full(&d, z).0.norm();
    for _ in 0..8 {
        let (v, dv) = eval_full(&d, z);
        if dv.norm() == 0.0 {
            break;
        }
        let cand = z - v / dv;
        let val = eval_full(&d, cand).0.norm();
        if !(val < best) {
            break;
        }
        z = cand;
        best = val;
    }
    z
}
