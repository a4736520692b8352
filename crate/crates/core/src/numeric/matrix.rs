use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use nalgebra::DMatrix;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};

/// Dense real matrix stored in row-major order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::domain("matrix entry count does not match its shape"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::domain("matrix product with incompatible shapes"));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = rhs.row(k);
                for (o, b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.cols != x.len() {
            return Err(Error::domain("matrix-vector product with incompatible shapes"));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `x' A x` for square `A`.
    pub fn quad_form(&self, x: &[f64]) -> Result<f64> {
        let ax = self.mul_vec(x)?;
        Ok(ax.iter().zip(x).map(|(a, b)| a * b).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let (a, b) = (self[(i, j)], self[(j, i)]);
                if (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                    return false;
                }
            }
        }
        true
    }

    /// Replaces the matrix by `(A + A') / 2`.
    pub fn symmetrize(&mut self) {
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }

    pub fn add_diagonal(&mut self, lambda: f64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += lambda;
        }
    }

    pub fn scale(&mut self, c: f64) {
        self.data.iter_mut().for_each(|v| *v *= c);
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::domain("matrix difference with incompatible shapes"));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<f64>) -> Matrix {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Solution of a symmetric linear system.
#[derive(Debug, Clone, PartialEq)]
pub struct SymSolve {
    pub solution: Matrix,
    /// Set when the system was numerically singular and a ridge was added.
    pub regularized: bool,
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    if !a.is_symmetric() {
        return Err(Error::domain("eigenvalues requested for a non-symmetric matrix"));
    }
    let eig = a.to_nalgebra().symmetric_eigenvalues();
    let mut vals: Vec<f64> = eig.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Eigen-decomposition of a symmetric matrix: eigenvalues ascending and the
/// matching unit eigenvectors as columns.
pub fn sym_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if !a.is_symmetric() {
        return Err(Error::domain("eigen-decomposition requested for a non-symmetric matrix"));
    }
    let se = a.to_nalgebra().symmetric_eigen();
    let dim = a.rows();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vectors = Matrix::from_fn(dim, dim, |i, j| se.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Replaces eigenvalues of a symmetric matrix that fall below `floor` by
/// `floor`. Returns the rebuilt matrix and whether anything changed.
pub fn floor_eigenvalues(a: &Matrix, floor: f64) -> Result<(Matrix, bool)> {
    if !a.is_symmetric() {
        return Err(Error::domain("eigenvalue floor requested for a non-symmetric matrix"));
    }
    let se = a.to_nalgebra().symmetric_eigen();
    if se.eigenvalues.iter().all(|v| *v >= floor) {
        return Ok((a.clone(), false));
    }
    let dim = a.rows();
    let mut out = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        let lam = se.eigenvalues[k].max(floor);
        let v = se.eigenvectors.column(k);
        out += (v * v.transpose()) * lam;
    }
    let mut m = Matrix::from_nalgebra(&out);
    m.symmetrize();
    Ok((m, true))
}

/// Solves `A X = B` for symmetric `A`.
///
/// With a positive diagonal, `A` is first equilibrated to `D⁻¹AD⁻¹` with
/// `D = diag(√a_ii)`, so the outcome does not depend on the units of the
/// unknowns. When the smallest eigenvalue of the (equilibrated) matrix falls
/// below `1e-10` times the largest, `λ = 1e-8 · trace / dim` is added to its
/// diagonal and the result is flagged.
pub fn sym_solve(a: &Matrix, b: &Matrix) -> Result<SymSolve> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::domain("sym_solve: size mismatch"));
    }
    if !a.is_symmetric() {
        return Err(Error::domain("sym_solve: matrix is not symmetric"));
    }
    let dim = a.rows();
    if dim == 0 {
        return Ok(SymSolve { solution: b.clone(), regularized: false });
    }
    let mut na = a.to_nalgebra();
    let mut nb = b.to_nalgebra();
    let scale: Option<Vec<f64>> =
        (0..dim).map(|i| a[(i, i)]).all(|d| d > 0.0 && d.is_finite()).then(|| (0..dim).map(|i| a[(i, i)].sqrt()).collect());
    if let Some(d) = &scale {
        for i in 0..dim {
            for j in 0..dim {
                na[(i, j)] /= d[i] * d[j];
            }
            for j in 0..nb.ncols() {
                nb[(i, j)] /= d[i];
            }
        }
    }
    let eig = na.clone().symmetric_eigenvalues();
    let largest = eig.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    let smallest = eig.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let mut regularized = false;
    if !(smallest >= 1e-10 * largest) || largest <= 0.0 {
        let mut lambda = 1e-8 * na.trace() / dim as f64;
        if !(lambda > 0.0) {
            lambda = 1e-8 * largest.abs().max(1.0);
        }
        for i in 0..dim {
            na[(i, i)] += lambda;
        }
        regularized = true;
    }
    let mut x = match na.clone().cholesky() {
        Some(chol) => chol.solve(&nb),
        None => {
            // Indefinite even after the ridge; fall back to a spectral solve.
            let se = na.symmetric_eigen();
            let mut inv = DMatrix::<f64>::zeros(dim, dim);
            let cutoff = 1e-14 * se.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for k in 0..dim {
                let lam = se.eigenvalues[k];
                if lam.abs() <= cutoff {
                    continue;
                }
                let v = se.eigenvectors.column(k);
                inv += (v * v.transpose()) / lam;
            }
            inv * nb
        }
    };
    if let Some(d) = &scale {
        for i in 0..dim {
            for j in 0..x.ncols() {
                x[(i, j)] /= d[i];
            }
        }
    }
    Ok(SymSolve { solution: Matrix::from_nalgebra(&x), regularized })
}

/// Inverse of a symmetric matrix via [`sym_solve`].
pub fn sym_inverse(a: &Matrix) -> Result<SymSolve> {
    let mut out = sym_solve(a, &Matrix::identity(a.rows()))?;
    out.solution.symmetrize();
    Ok(out)
}
