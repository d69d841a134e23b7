//! Dense kernels: symmetric eigensolver (Householder tridiagonalization +
//! implicit QL), Cholesky, the generalized symmetric eigenproblem through the
//! Cholesky transform, and complex LU for the resolvent routes.
//!
//! Sizes here are boundary-dof counts (a few thousand at most), so the plain
//! O(n^3) reference algorithms are the right tool.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
#[cfg_attr(test, allow(unused_imports))]
use crate::fx::FloatExt;
use crate::sparse::Complex64;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMat {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<f64>,
}

impl DenseMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.nrows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.nrows {
            let row = self.row(i);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y[i] = acc;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `max |A - A^T|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            for j in (i + 1)..self.ncols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn symmetrize(&mut self) {
        for i in 0..self.nrows {
            for j in (i + 1)..self.ncols {
                let v = 0.5 * (self.get(i, j) + self.get(j, i));
                self.set(i, j, v);
                self.set(j, i, v);
            }
        }
    }
}

/// Householder reduction of a symmetric matrix to tridiagonal form with
/// accumulation of the orthogonal transform (classic tred2).
fn tred2(z: &mut DenseMat, d: &mut [f64], e: &mut [f64]) {
    let n = z.nrows;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += z.get(i, k).abs();
            }
            if scale == 0.0 {
                e[i] = z.get(i, l);
            } else {
                for k in 0..=l {
                    let v = z.get(i, k) / scale;
                    z.set(i, k, v);
                    h += v * v;
                }
                let f = z.get(i, l);
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z.set(i, l, f - g);
                let mut f_acc = 0.0;
                for j in 0..=l {
                    z.set(j, i, z.get(i, j) / h);
                    let mut g_acc = 0.0;
                    for k in 0..=j {
                        g_acc += z.get(j, k) * z.get(i, k);
                    }
                    for k in (j + 1)..=l {
                        g_acc += z.get(k, j) * z.get(i, k);
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * z.get(i, j);
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = z.get(i, j);
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let v = z.get(j, k) - (f * e[k] + g * z.get(i, k));
                        z.set(j, k, v);
                    }
                }
            }
        } else {
            e[i] = z.get(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += z.get(i, k) * z.get(k, j);
                }
                for k in 0..i {
                    let v = z.get(k, j) - g * z.get(k, i);
                    z.set(k, j, v);
                }
            }
        }
        d[i] = z.get(i, i);
        z.set(i, i, 1.0);
        for j in 0..i {
            z.set(j, i, 0.0);
            z.set(i, j, 0.0);
        }
    }
}

/// Implicit QL iteration with shifts on a tridiagonal matrix, rotating the
/// columns of `z` along (classic tql2). `d` holds the diagonal, `e[0..n-1]`
/// the subdiagonal in `e[1..]` convention on input.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut DenseMat) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::Numerical(
                    "tql2 failed to converge in 64 sweeps".to_string(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let sg = if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sg);
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..z.nrows {
                    f = z.get(k, i + 1);
                    z.set(k, i + 1, s * z.get(k, i) + c * f);
                    z.set(k, i, c * z.get(k, i) - s * f);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn sort_pairs_ascending(d: &mut [f64], z: &mut DenseMat) {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let ds: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    d.copy_from_slice(&ds);
    let old = z.clone();
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..z.nrows {
            z.set(r, new_col, old.get(r, old_col));
        }
    }
}

/// Deterministic sign convention: the entry of largest magnitude positive.
fn fix_column_signs(z: &mut DenseMat) {
    for j in 0..z.ncols {
        let mut best = 0usize;
        let mut mag = -1.0;
        for i in 0..z.nrows {
            let a = z.get(i, j).abs();
            if a > mag + 1e-300 {
                mag = a;
                best = i;
            }
        }
        if z.get(best, j) < 0.0 {
            for i in 0..z.nrows {
                let v = -z.get(i, j);
                z.set(i, j, v);
            }
        }
    }
}

/// Full eigendecomposition of a symmetric matrix: ascending eigenvalues and
/// orthonormal eigenvectors as columns.
pub fn sym_eigen(a: &DenseMat) -> Result<(Vec<f64>, DenseMat)> {
    if a.nrows != a.ncols {
        return Err(Error::InvalidArgument("matrix must be square".to_string()));
    }
    let n = a.nrows;
    let mut z = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut z, &mut d, &mut e);
    tql2(&mut d, &mut e, &mut z)?;
    sort_pairs_ascending(&mut d, &mut z);
    fix_column_signs(&mut z);
    Ok((d, z))
}

/// Eigendecomposition of a tridiagonal matrix (diag, subdiag); eigenvectors
/// of the tridiagonal matrix as columns. Used by the Lanczos post-processing.
pub(crate) fn tridiag_eigen(diag: &[f64], sub: &[f64]) -> Result<(Vec<f64>, DenseMat)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    // tql2 expects the subdiagonal in e[1..n].
    for i in 1..n {
        e[i] = sub[i - 1];
    }
    let mut z = DenseMat::identity(n);
    tql2(&mut d, &mut e, &mut z)?;
    sort_pairs_ascending(&mut d, &mut z);
    Ok((d, z))
}

/// Cholesky factor `L` (lower) of an SPD matrix.
pub fn cholesky_lower(a: &DenseMat) -> Result<DenseMat> {
    if a.nrows != a.ncols {
        return Err(Error::InvalidArgument("matrix must be square".to_string()));
    }
    let n = a.nrows;
    let mut l = DenseMat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::Numerical(format!(
                        "Cholesky pivot {s:.3e} at row {i}: matrix not positive definite"
                    )));
                }
                l.set(i, j, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Solve `L x = b` in place for each column of `b` (lower triangular).
fn forward_solve_matrix(l: &DenseMat, b: &mut DenseMat) {
    let n = l.nrows;
    for j in 0..b.ncols {
        for i in 0..n {
            let mut s = b.get(i, j);
            for k in 0..i {
                s -= l.get(i, k) * b.get(k, j);
            }
            b.set(i, j, s / l.get(i, i));
        }
    }
}

/// Solve `L^T x = b` in place for each column of `b`.
fn backward_solve_matrix(l: &DenseMat, b: &mut DenseMat) {
    let n = l.nrows;
    for j in 0..b.ncols {
        for i in (0..n).rev() {
            let mut s = b.get(i, j);
            for k in (i + 1)..n {
                s -= l.get(k, i) * b.get(k, j);
            }
            b.set(i, j, s / l.get(i, i));
        }
    }
}

fn transpose(a: &DenseMat) -> DenseMat {
    let mut t = DenseMat::zeros(a.ncols, a.nrows);
    for i in 0..a.nrows {
        for j in 0..a.ncols {
            t.set(j, i, a.get(i, j));
        }
    }
    t
}

/// Generalized symmetric eigenproblem `A x = lambda B x` with SPD `B`:
/// ascending eigenvalues, eigenvectors B-orthonormal as columns.
pub fn generalized_sym_eigen(a: &DenseMat, b: &DenseMat) -> Result<(Vec<f64>, DenseMat)> {
    if a.nrows != b.nrows || a.ncols != b.ncols || a.nrows != a.ncols {
        return Err(Error::InvalidArgument(
            "generalized eigenproblem needs square matrices of equal size".to_string(),
        ));
    }
    let l = cholesky_lower(b)?;
    // C = L^{ -1 } A L^{ -T }, computed as L^{-1} (L^{-1} A)^T transposed.
    let mut y = a.clone();
    forward_solve_matrix(&l, &mut y); // Y = L^{-1} A
    let mut c = transpose(&y);
    forward_solve_matrix(&l, &mut c); // C^T = L^{-1} Y^T
    c.symmetrize();
    let (vals, mut vecs) = sym_eigen(&c)?;
    backward_solve_matrix(&l, &mut vecs); // X = L^{-T} Y
    fix_column_signs(&mut vecs);
    Ok((vals, vecs))
}

/// Dense complex matrix (row-major) with partial-pivoting LU solve.
#[derive(Debug, Clone)]
pub struct DenseCMat {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl DenseCMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    /// Solve `A x = b` in place (destroys the matrix).
    pub fn lu_solve(mut self, b: &mut [Complex64]) -> Result<()> {
        let n = self.n;
        for col in 0..n {
            // Partial pivot.
            let mut piv = col;
            let mut mag = self.get(col, col).norm_sqr();
            for r in (col + 1)..n {
                let m = self.get(r, col).norm_sqr();
                if m > mag {
                    mag = m;
                    piv = r;
                }
            }
            if mag == 0.0 {
                return Err(Error::Numerical("singular complex system".to_string()));
            }
            if piv != col {
                for j in 0..n {
                    let t = self.get(col, j);
                    self.set(col, j, self.get(piv, j));
                    self.set(piv, j, t);
                }
                b.swap(col, piv);
            }
            let inv = Complex64::new(1.0, 0.0) / self.get(col, col);
            for r in (col + 1)..n {
                let factor = self.get(r, col) * inv;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in (col + 1)..n {
                    let v = self.get(r, j) - factor * self.get(col, j);
                    self.set(r, j, v);
                }
                b[r] -= factor * b[col];
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n {
                s -= self.get(i, j) * b[j];
            }
            b[i] = s / self.get(i, i);
        }
        Ok(())
    }
}
