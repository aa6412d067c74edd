//! Dense real matrix kernel: arithmetic, a symmetric eigensolver, linear
//! solves, kernel bases, and rank-revealing orthonormalization.
//!
//! Everything is sized for small dense problems. The eigensolver is a cyclic
//! Jacobi sweep and the solver is Gaussian elimination with partial pivoting;
//! both favor robustness and accuracy over speed, which is the right trade at
//! n ≤ 64.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Default relative tolerance for rank decisions (relative to the largest
/// singular value).
pub const RANK_TOL: f64 = 1e-10;

/// Relative pivot threshold below which [`Matrix::solve`] reports a singular
/// matrix. Measured against the row's initial scale.
pub const PIVOT_TOL: f64 = 1e-12;

/// Dense real matrix, row-major storage.
///
/// Entries are finite reals; the JSON form is
/// `{"rows": r, "cols": c, "data": [row-major entries]}` and deserialization
/// rejects non-finite entries and shape/data length disagreements.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<RawMatrix> for Matrix {
    type Error = String;

    fn try_from(raw: RawMatrix) -> Result<Self, String> {
        if raw.rows == 0 || raw.cols == 0 {
            return Err(format!(
                "matrix shape {}x{} must be positive",
                raw.rows, raw.cols
            ));
        }
        if raw.data.len() != raw.rows * raw.cols {
            return Err(format!(
                "matrix data length {} does not match shape {}x{}",
                raw.data.len(),
                raw.rows,
                raw.cols
            ));
        }
        if raw.data.iter().any(|x| !x.is_finite()) {
            return Err("matrix entries must be finite".to_string());
        }
        Ok(Matrix {
            rows: raw.rows,
            cols: raw.cols,
            data: raw.data,
        })
    }
}

impl From<Matrix> for RawMatrix {
    fn from(m: Matrix) -> RawMatrix {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:+.6e}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    /// All-zero matrix. Zero row/column counts are permitted internally
    /// (empty bases); the JSON boundary insists on positive shapes.
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Matrix {
        let mut m = Matrix::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// Builds a matrix from rows. Panics if the rows are ragged or empty.
    pub fn from_rows(rows: &[Vec<f64>]) -> Matrix {
        assert!(!rows.is_empty(), "from_rows: no rows");
        let cols = rows[0].len();
        assert!(cols > 0, "from_rows: empty rows");
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "from_rows: ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Matrix {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "add: shape mismatch"
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "sub: shape mismatch"
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: f64) -> Matrix {
        let data = self.data.iter().map(|a| c * a).collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul: inner dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "matvec: dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Horizontal concatenation. All blocks must share the row count.
    pub fn hstack(blocks: &[&Matrix]) -> Matrix {
        assert!(!blocks.is_empty());
        let rows = blocks[0].rows;
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack: row mismatch");
            for i in 0..rows {
                for j in 0..b.cols {
                    out.set(i, offset + j, b.get(i, j));
                }
            }
            offset += b.cols;
        }
        out
    }

    /// Vertical concatenation. All blocks must share the column count.
    pub fn vstack(blocks: &[&Matrix]) -> Matrix {
        assert!(!blocks.is_empty());
        let cols = blocks[0].cols;
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack: column mismatch");
            for i in 0..b.rows {
                for j in 0..cols {
                    out.set(offset + i, j, b.get(i, j));
                }
            }
            offset += b.rows;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Largest entrywise absolute difference; shapes must agree.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Operator 2-norm: the largest singular value, computed as the square
    /// root of the largest eigenvalue of `MᵀM`.
    pub fn spectral_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let gram = self.gram();
        let (vals, _) = jacobi_eigen(&gram);
        vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    /// `MᵀM`, accumulated so the result is exactly symmetric in floating
    /// point.
    fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in 0..self.rows {
                    s += self.get(k, i) * self.get(k, j);
                }
                g.set(i, j, s);
                g.set(j, i, s);
            }
        }
        g
    }

    /// Eigenvalues of the symmetrized matrix, ascending.
    ///
    /// Fails with [`Error::NotSymmetric`] when
    /// `‖M − Mᵀ‖_F > 1e-10 · ‖M‖_F`.
    pub fn symmetric_eigenvalues(&self) -> Result<Vec<f64>, Error> {
        Ok(self.symmetric_eigen()?.0)
    }

    /// Eigen-decomposition of the symmetrized matrix: eigenvalues ascending
    /// plus the matching orthonormal eigenvector columns.
    pub fn symmetric_eigen(&self) -> Result<(Vec<f64>, Matrix), Error> {
        assert!(self.is_square(), "symmetric_eigen: matrix must be square");
        let norm = self.frobenius_norm();
        let skew = self.sub(&self.transpose()).frobenius_norm();
        if skew > 1e-10 * norm {
            return Err(Error::NotSymmetric {
                asymmetry: skew / norm,
            });
        }
        // Symmetrize to kill rounding-level asymmetry before rotating.
        let sym = self.add(&self.transpose()).scale(0.5);
        Ok(jacobi_eigen(&sym))
    }

    /// Solves `M X = rhs` by Gaussian elimination with partial pivoting.
    ///
    /// A pivot of magnitude at most [`PIVOT_TOL`] times its row's initial
    /// scale is treated as singular.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix, Error> {
        assert!(self.is_square(), "solve: matrix must be square");
        assert_eq!(self.rows, rhs.rows, "solve: rhs row mismatch");
        let n = self.rows;
        let m = rhs.cols;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        let mut scale: Vec<f64> = (0..n)
            .map(|i| (0..n).fold(0.0f64, |s, j| s.max(a[i * n + j].abs())))
            .collect();

        for k in 0..n {
            let mut piv = k;
            for i in k + 1..n {
                if a[i * n + k].abs() > a[piv * n + k].abs() {
                    piv = i;
                }
            }
            if a[piv * n + k].abs() <= PIVOT_TOL * scale[piv] {
                return Err(Error::SingularMatrix { pivot_col: k });
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                for j in 0..m {
                    b.swap(k * m + j, piv * m + j);
                }
                scale.swap(k, piv);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == 0.0 {
                    continue;
                }
                a[i * n + k] = 0.0;
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                for j in 0..m {
                    b[i * m + j] -= f * b[k * m + j];
                }
            }
        }

        // Back substitution.
        let mut x = vec![0.0; n * m];
        for j in 0..m {
            for i in (0..n).rev() {
                let mut s = b[i * m + j];
                for k in i + 1..n {
                    s -= a[i * n + k] * x[k * m + j];
                }
                x[i * m + j] = s / a[i * n + i];
            }
        }
        Ok(Matrix {
            rows: n,
            cols: m,
            data: x,
        })
    }

    /// Inverse via [`Matrix::solve`] on the identity.
    pub fn inverse(&self) -> Result<Matrix, Error> {
        self.solve(&Matrix::identity(self.rows))
    }

    /// Determinant via LU with partial pivoting; numerically singular
    /// matrices report 0.
    pub fn det(&self) -> f64 {
        assert!(self.is_square(), "det: matrix must be square");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut sign = 1.0;
        for k in 0..n {
            let mut piv = k;
            for i in k + 1..n {
                if a[i * n + k].abs() > a[piv * n + k].abs() {
                    piv = i;
                }
            }
            if a[piv * n + k] == 0.0 {
                return 0.0;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                sign = -sign;
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        (0..n).map(|i| a[i * n + i]).product::<f64>() * sign
    }

    /// Orthonormal basis of the null space at relative tolerance `tol`:
    /// the returned columns K are orthonormal and satisfy
    /// `‖M·k‖ ≤ tol·‖M‖` each.
    ///
    /// Candidate directions come from the eigen-decomposition of `MᵀM`; the
    /// Gram route alone cannot certify singular values below about
    /// `√ε·‖M‖`, so each candidate is kept only if its directly computed
    /// residual `‖M·v‖` passes the tolerance.
    pub fn kernel_basis(&self, tol: f64) -> Matrix {
        assert!(tol > 0.0, "kernel_basis: tol must be positive");
        let n = self.cols;
        if n == 0 {
            return Matrix::zeros(0, 0);
        }
        let gram = self.gram();
        let (vals, vecs) = jacobi_eigen(&gram);
        let sigma_max = vals.last().copied().unwrap_or(0.0).max(0.0).sqrt();
        let loose = tol.max(1e-7);
        let keep: Vec<usize> = (0..n)
            .filter(|&i| vals[i].max(0.0).sqrt() <= loose * sigma_max)
            .filter(|&i| vec_norm(&self.matvec(&vecs.column(i))) <= tol * sigma_max)
            .collect();
        let mut out = Matrix::zeros(n, keep.len());
        for (jj, &i) in keep.iter().enumerate() {
            for r in 0..n {
                out.set(r, jj, vecs.get(r, i));
            }
        }
        out
    }

    /// Rank-revealing orthonormal basis of the column space.
    ///
    /// Modified Gram–Schmidt with column pivoting and one reorthogonalization
    /// pass; columns whose residual drops to at most `tol` times the largest
    /// initial column norm are dropped.
    pub fn orthonormalize(&self, tol: f64) -> Matrix {
        assert!(tol > 0.0, "orthonormalize: tol must be positive");
        let m = self.rows;
        let mut residuals: Vec<Vec<f64>> = (0..self.cols).map(|j| self.column(j)).collect();
        let mut alive: Vec<bool> = vec![true; self.cols];
        let scale = residuals.iter().map(|c| vec_norm(c)).fold(0.0f64, f64::max);
        let mut basis: Vec<Vec<f64>> = Vec::new();
        if scale == 0.0 {
            return Matrix::zeros(m, 0);
        }
        loop {
            // Largest remaining residual is the next pivot column.
            let mut best: Option<(usize, f64)> = None;
            for (j, r) in residuals.iter().enumerate() {
                if !alive[j] {
                    continue;
                }
                let nrm = vec_norm(r);
                if best.is_none_or(|(_, b)| nrm > b) {
                    best = Some((j, nrm));
                }
            }
            let (j, nrm) = match best {
                Some(x) => x,
                None => break,
            };
            if nrm <= tol * scale {
                break;
            }
            alive[j] = false;
            let mut q: Vec<f64> = residuals[j].iter().map(|x| x / nrm).collect();
            // One reorthogonalization pass for numerical orthogonality.
            for prev in &basis {
                let d = dot(prev, &q);
                for (qi, pi) in q.iter_mut().zip(prev) {
                    *qi -= d * pi;
                }
            }
            let n2 = vec_norm(&q);
            if n2 <= tol {
                continue;
            }
            for qi in q.iter_mut() {
                *qi /= n2;
            }
            for (jj, r) in residuals.iter_mut().enumerate() {
                if alive[jj] {
                    let d = dot(&q, r);
                    for (ri, qi) in r.iter_mut().zip(&q) {
                        *ri -= d * qi;
                    }
                }
            }
            basis.push(q);
        }
        let mut out = Matrix::zeros(m, basis.len());
        for (j, q) in basis.iter().enumerate() {
            for (i, &v) in q.iter().enumerate() {
                out.set(i, j, v);
            }
        }
        out
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn vec_norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn vec_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi on a symmetric matrix. Returns eigenvalues ascending and
/// the matching orthonormal eigenvector columns.
fn jacobi_eigen(sym: &Matrix) -> (Vec<f64>, Matrix) {
    let n = sym.rows();
    let mut a = sym.data.clone();
    let mut v = Matrix::identity(n).data;
    let idx = |i: usize, j: usize| i * n + j;

    for sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[idx(p, q)].abs();
            }
        }
        if off == 0.0 {
            break;
        }
        // Early sweeps only rotate the clearly large entries.
        let thresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                let g = 100.0 * apq.abs();
                if sweep > 3 && negligible(a[idx(p, p)], g) && negligible(a[idx(q, q)], g) {
                    a[idx(p, q)] = 0.0;
                    a[idx(q, p)] = 0.0;
                } else if apq.abs() > thresh {
                    let h = a[idx(q, q)] - a[idx(p, p)];
                    let t = if negligible(h, g) {
                        apq / h
                    } else {
                        let theta = 0.5 * h / apq;
                        let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                        if theta < 0.0 {
                            -t
                        } else {
                            t
                        }
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    let h = t * apq;
                    a[idx(p, p)] -= h;
                    a[idx(q, q)] += h;
                    a[idx(p, q)] = 0.0;
                    a[idx(q, p)] = 0.0;
                    for j in 0..n {
                        if j == p || j == q {
                            continue;
                        }
                        let ajp = a[idx(j, p)];
                        let ajq = a[idx(j, q)];
                        a[idx(j, p)] = ajp - s * (ajq + tau * ajp);
                        a[idx(j, q)] = ajq + s * (ajp - tau * ajq);
                        a[idx(p, j)] = a[idx(j, p)];
                        a[idx(q, j)] = a[idx(j, q)];
                    }
                    for j in 0..n {
                        let vjp = v[idx(j, p)];
                        let vjq = v[idx(j, q)];
                        v[idx(j, p)] = vjp - s * (vjq + tau * vjp);
                        v[idx(j, q)] = vjq + s * (vjp - tau * vjq);
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[idx(i, i)].partial_cmp(&a[idx(j, j)]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| a[idx(i, i)]).collect();
    let mut vecs = Matrix::zeros(n, n);
    for (jj, &col) in order.iter().enumerate() {
        for i in 0..n {
            vecs.set(i, jj, v[idx(i, col)]);
        }
    }
    (vals, vecs)
}

#[inline]
fn negligible(x: f64, g: f64) -> bool {
    x.abs() + g == x.abs()
}
