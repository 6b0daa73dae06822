//! `ML_alpha` at square complex matrix arguments.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::mittag_leffler::{ml_eval, ratios};
use crate::series::{FracOrder, Tolerance};
use crate::{Error, Result};

/// Square matrix with finite complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Build from row-major entries.
    pub fn new(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension("matrix rows must form a square".into()));
        }
        let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Self::new(d, &flat)
    }

    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!("{}x{} is not square", m.nrows(), m.ncols())));
        }
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::domain("matrix has non-finite entries"));
        }
        Ok(ComplexMatrix(m))
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        ComplexMatrix(DMatrix::from_diagonal(&DVector::from_column_slice(values)))
    }

    pub fn scalar(z: Complex64) -> Self {
        ComplexMatrix(DMatrix::from_element(1, 1, z))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[(r, c)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Rows as nested vectors.
    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.0[(r, c)]).collect())
            .collect()
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        max_norm(&self.0)
    }

    /// Induced infinity norm (max row sum).
    pub fn inf_norm(&self) -> f64 {
        self.0
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim();
        (0..d)
            .map(|r| (0..d).map(|c| self.0[(r, c)] * v[c]).sum())
            .collect()
    }

    pub fn scale(&self, a: Complex64) -> Self {
        ComplexMatrix(self.0.map(|z| z * a))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        ComplexMatrix(&self.0 * &other.0)
    }
}

fn max_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `sum c_n M^n` by repeated multiplication.
pub fn ml_matrix_eval(order: FracOrder, m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    tol.validate()?;
    let d = m.dim();
    let mut term = DMatrix::<Complex64>::identity(d, d);
    let mut sum = term.clone();
    let mut small = 0usize;
    let mut g = ratios(order.alpha());
    for n in 1..tol.max_terms {
        let gn = g.next().unwrap();
        term = (&term * &m.0) * Complex64::new(gn, 0.0);
        sum += &term;
        let tn = max_norm(&term);
        if !tn.is_finite() {
            return Err(Error::NotConverged {
                terms: n,
                last_term: tn,
            });
        }
        if tn <= tol.abs_tol || tol.negligible(tn, max_norm(&sum)) {
            small += 1;
            if small >= tol.stall_window {
                return Ok(ComplexMatrix(sum));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NotConverged {
        terms: tol.max_terms,
        last_term: max_norm(&term),
    })
}

/// Cross-check path `P diag(ML(lambda_i)) P^-1` for diagonalizable matrices
/// whose eigenvector matrix has condition number below `1e6`.
pub fn ml_matrix_eval_diagonal(order: FracOrder, m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let d = m.dim();
    let eig = nalgebra::Schur::new(m.0.clone())
        .eigenvalues()
        .ok_or_else(|| Error::domain("Schur form has no diagonal eigenvalues"))?;
    let scale = m.max_norm().max(1.0);
    let cluster = 1e-8 * scale;

    let mut distinct: Vec<(Complex64, usize)> = Vec::new();
    for &z in eig.iter() {
        match distinct.iter_mut().find(|(w, _)| (*w - z).norm() < cluster) {
            Some(entry) => entry.1 += 1,
            None => distinct.push((z, 1)),
        }
    }

    let mut p = DMatrix::<Complex64>::zeros(d, d);
    let mut diag = Vec::with_capacity(d);
    let mut col = 0;
    for &(lambda, mult) in &distinct {
        let shifted = &m.0 - DMatrix::identity(d, d) * lambda;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("requested");
        let mut idx: Vec<usize> = (0..d).collect();
        idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        let null_dim = idx
            .iter()
            .filter(|&&i| svd.singular_values[i] <= 1e-7 * scale)
            .count();
        if null_dim < mult {
            return Err(Error::domain("matrix is not diagonalizable"));
        }
        let value = ml_eval(order, lambda, tol)?.value;
        for &i in idx.iter().take(mult) {
            for r in 0..d {
                p[(r, col)] = v_t[(i, r)].conj();
            }
            diag.push(value);
            col += 1;
        }
    }

    let sv = p.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if !(smin > 0.0) || smax / smin >= 1e6 {
        return Err(Error::domain("eigenvector matrix is ill-conditioned"));
    }
    let p_inv = p
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::domain("eigenvector matrix is singular"))?;
    let dmat = DMatrix::from_diagonal(&DVector::from_vec(diag));
    Ok(ComplexMatrix(p * dmat * p_inv))
}
