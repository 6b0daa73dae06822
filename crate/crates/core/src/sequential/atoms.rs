//! The atoms `t^k ML^(k)(lambda t)` and their iterated L-derivatives.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::roots::RootSet;
use crate::series::{ld_termwise, FracOrder, PowerSeries};
use crate::special::{ratios, ComplexMatrix};
use crate::{Error, Result};

/// `t^k ML^(k)(lambda t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisAtom {
    pub lambda: Complex64,
    pub k: usize,
}

/// `beta t^j ML^(j)(mu t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingAtom {
    pub beta: Complex64,
    pub mu: Complex64,
    pub j: usize,
}

impl ForcingAtom {
    pub fn atom(&self) -> BasisAtom {
        BasisAtom {
            lambda: self.mu,
            k: self.j,
        }
    }
}

/// `(lambda_l, k)` for `k` below each multiplicity.
pub fn basis_atoms(roots: &RootSet) -> Vec<BasisAtom> {
    roots
        .roots
        .iter()
        .flat_map(|&(lambda, mult)| (0..mult).map(move |k| BasisAtom { lambda, k }))
        .collect()
}

/// First `n_terms` coefficients of the atom: `n!/(n-k)! c_n lambda^(n-k)` at `t^n`.
pub fn atom_series(order: FracOrder, atom: BasisAtom, n_terms: usize) -> PowerSeries {
    let k = atom.k;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n_terms.max(1)];
    if n_terms <= k {
        return PowerSeries::new(coeffs);
    }
    let mut g = ratios(order.alpha());
    let mut lead = 1.0;
    for i in 0..k {
        lead *= g.next().unwrap() * (i + 1) as f64;
    }
    let mut term = Complex64::new(lead, 0.0);
    coeffs[k] = term;
    for n in k..n_terms - 1 {
        let gn = g.next().unwrap();
        term *= atom.lambda * (gn * (n + 1) as f64 / (n + 1 - k) as f64);
        coeffs[n + 1] = term;
    }
    PowerSeries::new(coeffs)
}

/// `D_L^q` of the atom, `n_terms` coefficients.
pub fn atom_ld(order: FracOrder, atom: BasisAtom, q: usize, n_terms: usize) -> PowerSeries {
    let mut s = atom_series(order, atom, n_terms + q);
    for _ in 0..q {
        s = ld_termwise(&s, order);
    }
    s
}

/// `W[q][i] = D_L^q(atom_i)(0)`, `q = 0..m-1`.
pub fn lwronskian0(order: FracOrder, atoms: &[BasisAtom]) -> Result<ComplexMatrix> {
    let m = atoms.len();
    if m == 0 {
        return Err(Error::domain("wronskian of an empty family"));
    }
    let mut w = DMatrix::<Complex64>::zeros(m, m);
    for (i, &atom) in atoms.iter().enumerate() {
        let s = atom_series(order, atom, m);
        let mut cur = s;
        for q in 0..m {
            if q > 0 {
                cur = ld_termwise(&cur, order);
            }
            w[(q, i)] = cur.coeff(0);
        }
    }
    let w = ComplexMatrix::from_dmatrix(w)?;
    let det = w.as_dmatrix().clone().determinant().norm();
    let norm = w.inf_norm();
    if !(det >= 1e-12 * norm.powi(m as i32)) {
        return Err(Error::SingularWronskian { det });
    }
    Ok(w)
}
