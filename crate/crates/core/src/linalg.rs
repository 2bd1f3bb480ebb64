//! Sparse kernels and solvers for the normal-equation system
//! `(A D^2 A^T) u = v` that every interior-point iteration has to solve.
//!
//! The operator is never formed explicitly by the iterative solver: one
//! application costs two sparse products and a diagonal scaling. The dense
//! Cholesky path materialises it and is used as an oracle and as a
//! fallback for small instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `k` for [`cholesky_solve_dense`].
pub const MAX_DENSE_DIMENSION: usize = 2000;

/// Real sparse matrix in compressed row form with a mirrored column index.
///
/// Both orientations are kept so that `A y` and `A^T w` are gathers with a
/// fixed summation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseRealMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    row_val: Vec<f64>,
    col_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    col_val: Vec<f64>,
}

impl SparseRealMatrix {
    /// Builds the matrix from `(row, col, value)` triplets. Duplicate
    /// positions and non-finite values are errors; explicit zeros are kept.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut sorted = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        for w in sorted.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::InvalidMatrix(format!(
                    "duplicate entry at ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        for &(r, c, v) in &sorted {
            if r >= rows || c >= cols {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("sparse matrix entry"));
            }
        }

        let mut row_ptr = vec![0; rows + 1];
        for &(r, _, _) in &sorted {
            row_ptr[r + 1] += 1;
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let row_idx = sorted.iter().map(|t| t.1).collect();
        let row_val = sorted.iter().map(|t| t.2).collect();

        let mut by_col = sorted;
        by_col.sort_by_key(|&(r, c, _)| (c, r));
        let mut col_ptr = vec![0; cols + 1];
        for &(_, c, _) in &by_col {
            col_ptr[c + 1] += 1;
        }
        for c in 0..cols {
            col_ptr[c + 1] += col_ptr[c];
        }
        let col_idx = by_col.iter().map(|t| t.0).collect();
        let col_val = by_col.iter().map(|t| t.2).collect();

        Ok(Self {
            rows,
            cols,
            row_ptr,
            row_idx,
            row_val,
            col_ptr,
            col_idx,
            col_val,
        })
    }

    pub fn from_dense(rows: usize, cols: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "SparseRealMatrix::from_dense",
                expected: rows * cols,
                got: dense.len(),
            });
        }
        let triplets: Vec<_> = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .filter_map(|(r, c)| {
                let v = dense[r * cols + c];
                (v != 0.0).then_some((r, c, v))
            })
            .collect();
        Self::from_triplets(rows, cols, &triplets)
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &t).expect("identity is valid")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// `(col, value)` pairs of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.row_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.row_val[span].iter().copied())
    }

    /// `(row, value)` pairs of column `c`.
    pub fn col(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.col_ptr[c]..self.col_ptr[c + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.col_val[span].iter().copied())
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.rows)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.rows * self.cols];
        for (r, c, v) in self.triplets() {
            d[r * self.cols + c] = v;
        }
        d
    }

    /// `out = A y`.
    pub fn mul_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.cols);
        for (r, o) in out.iter_mut().enumerate().take(self.rows) {
            *o = self.row(r).fold(0.0, |acc, (c, v)| acc + v * y[c]);
        }
    }

    pub fn mul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_into(y, &mut out);
        out
    }

    /// `out = A^T w`.
    pub fn mul_t_into(&self, w: &[f64], out: &mut [f64]) {
        debug_assert_eq!(w.len(), self.rows);
        for (c, o) in out.iter_mut().enumerate().take(self.cols) {
            *o = self.col(c).fold(0.0, |acc, (r, v)| acc + v * w[r]);
        }
    }

    pub fn mul_t(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.mul_t_into(w, &mut out);
        out
    }

    /// Triplet text dump, one `row col value` line per entry.
    pub fn to_triplet_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.nnz());
        for (r, c, v) in self.triplets() {
            s.push_str(&format!("{r} {c} {v:e}\n"));
        }
        s
    }
}

/// The operator `N = A diag(d2) A^T` together with a right-hand side.
#[derive(Debug, Clone, Copy)]
pub struct InnerSystem<'a> {
    pub a: &'a SparseRealMatrix,
    pub d2: &'a [f64],
    pub v: &'a [f64],
}

impl<'a> InnerSystem<'a> {
    pub fn new(a: &'a SparseRealMatrix, d2: &'a [f64], v: &'a [f64]) -> Result<Self> {
        if d2.len() != a.cols() {
            return Err(Error::DimensionMismatch {
                context: "InnerSystem scaling",
                expected: a.cols(),
                got: d2.len(),
            });
        }
        if v.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                context: "InnerSystem right-hand side",
                expected: a.rows(),
                got: v.len(),
            });
        }
        if let Some(i) = d2.iter().position(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(Error::OutOfRange(format!(
                "scaling weight d2[{i}] = {} is not positive",
                d2[i]
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("inner right-hand side"));
        }
        Ok(Self { a, d2, v })
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// Diagonal of the operator, `sum_i A_ji^2 d2_i`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.a.rows())
            .map(|j| {
                self.a
                    .row(j)
                    .fold(0.0, |acc, (i, v)| acc + v * v * self.d2[i])
            })
            .collect()
    }

    fn apply_with(&self, w: &[f64], scratch: &mut [f64], out: &mut [f64]) {
        self.a.mul_t_into(w, scratch);
        for (s, d) in scratch.iter_mut().zip(self.d2) {
            *s *= d;
        }
        self.a.mul_into(scratch, out);
    }

    /// Dense row-major copy of the operator.
    pub fn materialize(&self) -> Vec<f64> {
        let k = self.dim();
        let mut n = vec![0.0; k * k];
        // Column-by-column outer products in fixed order.
        for c in 0..self.a.cols() {
            let d = self.d2[c];
            let entries: Vec<_> = self.a.col(c).collect();
            for &(r1, v1) in &entries {
                for &(r2, v2) in &entries {
                    n[r1 * k + r2] += v1 * v2 * d;
                }
            }
        }
        n
    }

    pub fn residual_norm(&self, u: &[f64]) -> f64 {
        let nu = apply_inner(self, u).expect("dimension checked by caller");
        norm2_diff(self.v, &nu)
    }
}

/// Diagnostics of an iterative solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual_norm: f64,
    pub converged: bool,
}

pub fn apply_inner(sys: &InnerSystem<'_>, w: &[f64]) -> Result<Vec<f64>> {
    if w.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            context: "apply_inner",
            expected: sys.dim(),
            got: w.len(),
        });
    }
    let mut scratch = vec![0.0; sys.a.cols()];
    let mut out = vec![0.0; sys.dim()];
    sys.apply_with(w, &mut scratch, &mut out);
    Ok(out)
}

/// A symmetric positive-definite approximation `M` applied as `z = M^{-1} r`.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// Diagonal (Jacobi) preconditioner.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiPreconditioner {
    diag: Vec<f64>,
}

impl JacobiPreconditioner {
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }
}

impl Preconditioner for JacobiPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.diag) {
            *zi = ri / di;
        }
    }
}

pub fn jacobi_precond(sys: &InnerSystem<'_>) -> Result<JacobiPreconditioner> {
    let diag = sys.diagonal();
    if let Some(j) = diag.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDiagonal(j));
    }
    Ok(JacobiPreconditioner { diag })
}

/// Preconditioned conjugate gradients from `u = 0`.
///
/// Stops once the true residual satisfies `||v - N u|| <= tol ||v||`, or
/// after `max_iter` iterations with `converged = false`.
pub fn cg_solve(
    sys: &InnerSystem<'_>,
    precond: &dyn Preconditioner,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    cg_solve_from(sys, precond, None, tol, max_iter)
}

/// [`cg_solve`] started from `initial` when that beats the zero vector.
/// The tolerance stays relative to `||v||`.
pub fn cg_solve_from(
    sys: &InnerSystem<'_>,
    precond: &dyn Preconditioner,
    initial: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cg tolerance {tol} must be positive"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidParameter("cg needs max_iter >= 1".into()));
    }
    let k = sys.dim();
    let mut scratch = vec![0.0; sys.a.cols()];
    let mut u = vec![0.0; k];
    let mut r = sys.v.to_vec();
    let v_norm = norm2(sys.v);
    let target = tol * v_norm;
    if v_norm == 0.0 {
        return Ok((
            u,
            SolveReport {
                iterations: 0,
                residual_norm: 0.0,
                converged: true,
            },
        ));
    }

    let mut np = vec![0.0; k];
    if let Some(u0) = initial {
        if u0.len() != k {
            return Err(Error::DimensionMismatch {
                context: "cg_solve_from",
                expected: k,
                got: u0.len(),
            });
        }
        let mut r0 = vec![0.0; k];
        let res0 = true_residual(sys, u0, &mut scratch, &mut np, &mut r0);
        if res0 < v_norm {
            u.copy_from_slice(u0);
            r = r0;
            if res0 <= target {
                return Ok((
                    u,
                    SolveReport {
                        iterations: 0,
                        residual_norm: res0,
                        converged: true,
                    },
                ));
            }
        }
    }

    let mut z = vec![0.0; k];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);

    for it in 1..=max_iter {
        sys.apply_with(&p, &mut scratch, &mut np);
        let curvature = dot(&p, &np);
        if !curvature.is_finite() || !rz.is_finite() {
            return Err(Error::NonFinite("conjugate gradient"));
        }
        if curvature <= 0.0 {
            // Exhausted directions or lost definiteness; report where we are.
            let res_norm = true_residual(sys, &u, &mut scratch, &mut np, &mut r);
            return Ok((
                u,
                SolveReport {
                    iterations: it,
                    residual_norm: res_norm,
                    converged: res_norm <= target,
                },
            ));
        }
        let alpha = rz / curvature;
        for i in 0..k {
            u[i] += alpha * p[i];
            r[i] -= alpha * np[i];
        }
        let recursive = norm2(&r);
        if recursive <= target {
            let res_norm = true_residual(sys, &u, &mut scratch, &mut np, &mut r);
            if res_norm <= target {
                return Ok((
                    u,
                    SolveReport {
                        iterations: it,
                        residual_norm: res_norm,
                        converged: true,
                    },
                ));
            }
        }
        precond.apply(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..k {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res_norm = true_residual(sys, &u, &mut scratch, &mut np, &mut r);
    Ok((
        u,
        SolveReport {
            iterations: max_iter,
            residual_norm: res_norm,
            converged: res_norm <= target,
        },
    ))
}

/// Recomputes `r = v - N u` in place and returns its norm.
fn true_residual(
    sys: &InnerSystem<'_>,
    u: &[f64],
    scratch: &mut [f64],
    nu: &mut [f64],
    r: &mut [f64],
) -> f64 {
    sys.apply_with(u, scratch, nu);
    for i in 0..r.len() {
        r[i] = sys.v[i] - nu[i];
    }
    norm2(r)
}

/// Lower-triangular Cholesky factor of a dense SPD matrix (row-major).
pub fn cholesky_factor(mat: &[f64], k: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; k * k];
    for j in 0..k {
        let mut d = mat[j * k + j];
        for p in 0..j {
            d -= l[j * k + p] * l[j * k + p];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { row: j, pivot: d });
        }
        let d = d.sqrt();
        l[j * k + j] = d;
        for i in j + 1..k {
            let mut s = mat[i * k + j];
            for p in 0..j {
                s -= l[i * k + p] * l[j * k + p];
            }
            l[i * k + j] = s / d;
        }
    }
    Ok(l)
}

/// Solves `L L^T u = v` given the factor from [`cholesky_factor`].
pub fn cholesky_substitute(l: &[f64], k: usize, v: &[f64]) -> Vec<f64> {
    let mut y = v.to_vec();
    for i in 0..k {
        for p in 0..i {
            y[i] -= l[i * k + p] * y[p];
        }
        y[i] /= l[i * k + i];
    }
    for i in (0..k).rev() {
        for p in i + 1..k {
            y[i] -= l[p * k + i] * y[p];
        }
        y[i] /= l[i * k + i];
    }
    y
}

pub fn cholesky_solve_dense(sys: &InnerSystem<'_>) -> Result<Vec<f64>> {
    let k = sys.dim();
    if k > MAX_DENSE_DIMENSION {
        return Err(Error::GuardExceeded {
            what: "dense system dimension",
            limit: MAX_DENSE_DIMENSION,
            got: k,
        });
    }
    let l = cholesky_factor(&sys.materialize(), k)?;
    Ok(cholesky_substitute(&l, k, sys.v))
}

/// Dense square solve with partial pivoting; `None` when singular to
/// `pivot_tol`.
pub fn lu_solve(mat: &[f64], k: usize, rhs: &[f64], pivot_tol: f64) -> Option<Vec<f64>> {
    let mut a = mat.to_vec();
    let mut b = rhs.to_vec();
    for col in 0..k {
        let (p, best) = (col..k)
            .map(|r| (r, a[r * k + col].abs()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= pivot_tol {
            return None;
        }
        if p != col {
            for c in 0..k {
                a.swap(p * k + c, col * k + c);
            }
            b.swap(p, col);
        }
        let piv = a[col * k + col];
        for r in col + 1..k {
            let f = a[r * k + col] / piv;
            if f != 0.0 {
                for c in col..k {
                    a[r * k + c] -= f * a[col * k + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for r in (0..k).rev() {
        let mut s = b[r];
        for c in r + 1..k {
            s -= a[r * k + c] * b[c];
        }
        b[r] = s / a[r * k + r];
    }
    Some(b)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn norm2_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc + (x - y) * (x - y))
        .sqrt()
}
