//! Symmetric sparse matrices and the direct solver backend.
//!
//! `SparseSym` stores the upper triangle in CSR form and mirrors it on apply.
//! The factorization is an envelope (profile) LDL^T with a reverse
//! Cuthill-McKee pre-ordering, generic over the scalar so the same kernel
//! factors the real operators and the complex-symmetric Robin matrices
//! `K + kM + (alpha - is)B`. A preconditioned conjugate-gradient fallback
//! covers the one place (capacity boxes) where the profile would not fit in
//! memory.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
#[cfg_attr(test, allow(unused_imports))]
use crate::fx::FloatExt;

pub type Complex64 = Complex<f64>;

/// Scalar admitted by the symmetric (not Hermitian) factorization.
pub trait Scalar:
    Copy
    + PartialEq
    + core::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_re(x: f64) -> Self;
    fn re(self) -> f64;
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_re(x: f64) -> Self {
        x
    }
    fn re(self) -> f64 {
        self
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }
    fn from_re(x: f64) -> Self {
        Complex::new(x, 0.0)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn modulus(self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// Accumulates element contributions; duplicate entries are summed.
#[derive(Debug, Clone)]
pub struct TripletBuffer {
    n: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl TripletBuffer {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    /// Add `v` at `(i, j)`; only the upper-triangle representative is kept.
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.entries.push((a as u32, b as u32, v));
    }

    pub fn build(mut self) -> SparseSym {
        // Stable sort keeps the summation order deterministic.
        self.entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx: Vec<u32> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut it = self.entries.iter().peekable();
        while let Some(&(i, j, v)) = it.next() {
            let mut acc = v;
            while let Some(&&(i2, j2, v2)) = it.peek() {
                if i2 == i && j2 == j {
                    acc += v2;
                    it.next();
                } else {
                    break;
                }
            }
            row_ptr[i as usize + 1] += 1;
            col_idx.push(j);
            values.push(acc);
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSym {
            n: self.n,
            row_ptr,
            col_idx,
            values,
        }
    }
}

/// Symmetric sparse matrix; upper triangle stored, mirrored on apply.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl SparseSym {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            row_ptr: vec![0; n + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz_upper(&self) -> usize {
        self.values.len()
    }

    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(move |k| (i, self.col_idx[k] as usize, self.values[k]))
        })
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        y[..self.n].fill(0.0);
        self.apply_add(x, y);
    }

    /// `y += A x`.
    pub fn apply_add(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k] as usize;
                let v = self.values[k];
                y[i] += v * x[j];
                if j != i {
                    y[j] += v * x[i];
                }
            }
        }
    }

    pub fn quadratic(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k] as usize;
                let v = self.values[k];
                acc += v * x[i] * y[j];
                if j != i {
                    acc += v * x[j] * y[i];
                }
            }
        }
        acc
    }

    pub fn diag(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.col_idx[k] as usize == i {
                    d[i] += self.values[k];
                }
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `self + c * other` on the union pattern.
    pub fn add_scaled(&self, other: &SparseSym, c: f64) -> SparseSym {
        assert_eq!(self.n, other.n);
        let mut buf = TripletBuffer::new(self.n);
        for (i, j, v) in self.upper_entries() {
            buf.push(i, j, v);
        }
        for (i, j, v) in other.upper_entries() {
            buf.push(i, j, c * v);
        }
        buf.build()
    }

    pub fn scaled(&self, c: f64) -> SparseSym {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    /// Principal submatrix on the sorted index set `keep`.
    pub fn submatrix(&self, keep: &[usize]) -> SparseSym {
        let mut map = vec![-1i64; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new as i64;
        }
        let mut buf = TripletBuffer::new(keep.len());
        for (i, j, v) in self.upper_entries() {
            let (mi, mj) = (map[i], map[j]);
            if mi >= 0 && mj >= 0 {
                buf.push(mi as usize, mj as usize, v);
            }
        }
        buf.build()
    }

    /// Rectangular block `A[rows, cols]` of the full symmetric matrix.
    pub fn rect_block(&self, rows: &[usize], cols: &[usize]) -> CsrRect {
        let mut rmap = vec![-1i64; self.n];
        for (new, &old) in rows.iter().enumerate() {
            rmap[old] = new as i64;
        }
        let mut cmap = vec![-1i64; self.n];
        for (new, &old) in cols.iter().enumerate() {
            cmap[old] = new as i64;
        }
        let mut triplets: Vec<(u32, u32, f64)> = Vec::new();
        let mut consider = |i: usize, j: usize, v: f64| {
            if rmap[i] >= 0 && cmap[j] >= 0 {
                triplets.push((rmap[i] as u32, cmap[j] as u32, v));
            }
        };
        for (i, j, v) in self.upper_entries() {
            consider(i, j, v);
            if i != j {
                consider(j, i, v);
            }
        }
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; rows.len() + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        for &(i, j, v) in &triplets {
            row_ptr[i as usize + 1] += 1;
            col_idx.push(j);
            values.push(v);
        }
        for i in 0..rows.len() {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrRect {
            nrows: rows.len(),
            ncols: cols.len(),
            row_ptr,
            col_idx,
            values,
        }
    }
}

/// Rectangular CSR block.
#[derive(Debug, Clone)]
pub struct CsrRect {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub values: Vec<f64>,
}

impl CsrRect {
    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.nrows {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k] as usize];
            }
            y[i] = acc;
        }
    }

    /// `y = A^T x`.
    pub fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        y[..self.ncols].fill(0.0);
        for i in 0..self.nrows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                y[self.col_idx[k] as usize] += self.values[k] * x[i];
            }
        }
    }

    /// Column `j` densified.
    pub fn column(&self, j: usize, out: &mut [f64]) {
        out[..self.nrows].fill(0.0);
        for i in 0..self.nrows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.col_idx[k] as usize == j {
                    out[i] = self.values[k];
                }
            }
        }
    }
}

/// Reverse Cuthill-McKee ordering; returns `order` with `order[new] = old`.
pub fn reverse_cuthill_mckee(n: usize, row_ptr: &[usize], col_idx: &[u32]) -> Vec<u32> {
    // Build the full adjacency from an upper-triangular pattern.
    let mut deg = vec![0usize; n];
    for i in 0..n {
        for k in row_ptr[i]..row_ptr[i + 1] {
            let j = col_idx[k] as usize;
            if j != i {
                deg[i] += 1;
                deg[j] += 1;
            }
        }
    }
    let mut ptr = vec![0usize; n + 1];
    for i in 0..n {
        ptr[i + 1] = ptr[i] + deg[i];
    }
    let mut adj = vec![0u32; ptr[n]];
    let mut fill = ptr.clone();
    for i in 0..n {
        for k in row_ptr[i]..row_ptr[i + 1] {
            let j = col_idx[k] as usize;
            if j != i {
                adj[fill[i]] = j as u32;
                fill[i] += 1;
                adj[fill[j]] = i as u32;
                fill[j] += 1;
            }
        }
    }
    for i in 0..n {
        adj[ptr[i]..ptr[i + 1]].sort_unstable_by_key(|&v| (deg[v as usize], v));
    }

    let bfs_last = |root: u32, seen: &mut [i32], tag: i32, order: &mut Vec<u32>| -> u32 {
        let head = order.len();
        order.push(root);
        seen[root as usize] = tag;
        let mut cursor = head;
        while cursor < order.len() {
            let v = order[cursor] as usize;
            cursor += 1;
            for &w in &adj[ptr[v]..ptr[v + 1]] {
                if seen[w as usize] != tag {
                    seen[w as usize] = tag;
                    order.push(w);
                }
            }
        }
        order[order.len() - 1]
    };

    let mut seen = vec![-1i32; n];
    let mut order: Vec<u32> = Vec::with_capacity(n);
    let mut scratch: Vec<u32> = Vec::with_capacity(n);
    let mut next_unvisited = 0usize;
    let mut tag = 0;
    while order.len() < n {
        while seen[next_unvisited] >= 0 {
            next_unvisited += 1;
        }
        // Pseudo-peripheral start: two BFS sweeps from the lowest-degree
        // unvisited vertex of the component.
        let mut root = next_unvisited as u32;
        scratch.clear();
        let far = bfs_last(root, &mut seen, tag, &mut scratch);
        tag += 1;
        scratch.clear();
        let far2 = bfs_last(far, &mut seen, tag, &mut scratch);
        let _ = far2;
        tag += 1;
        root = far;
        let head = order.len();
        bfs_last(root, &mut seen, tag, &mut order);
        tag += 1;
        order[head..].reverse();
    }
    order
}

/// Upper-triangular CSR with generic scalar; the factorization input.
#[derive(Debug, Clone)]
pub struct SymCombined<S> {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub values: Vec<S>,
}

impl SymCombined<f64> {
    pub fn from_real(a: &SparseSym) -> Self {
        Self {
            n: a.n,
            row_ptr: a.row_ptr.clone(),
            col_idx: a.col_idx.clone(),
            values: a.values.clone(),
        }
    }
}

impl<S: Scalar> SymCombined<S> {
    /// Linear combination `sum_k coeff_k * A_k` on the union pattern.
    pub fn combine(terms: &[(&SparseSym, S)]) -> Self {
        assert!(!terms.is_empty());
        let n = terms[0].0.n;
        // Union pattern per row via merge of sorted rows.
        let mut entries: Vec<(u32, u32)> = Vec::new();
        for (a, _) in terms {
            assert_eq!(a.n, n);
            for (i, j, _) in a.upper_entries() {
                entries.push((i as u32, j as u32));
            }
        }
        entries.sort_unstable();
        entries.dedup();
        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _) in &entries {
            row_ptr[i as usize + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx: Vec<u32> = entries.iter().map(|&(_, j)| j).collect();
        let mut values = vec![S::zero(); entries.len()];
        for (a, c) in terms {
            for (i, j, v) in a.upper_entries() {
                // Binary search inside the row.
                let lo = row_ptr[i];
                let hi = row_ptr[i + 1];
                let k = lo + col_idx[lo..hi].binary_search(&(j as u32)).unwrap();
                values[k] = values[k] + *c * S::from_re(v);
            }
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// `y = A x` (mirrored).
    pub fn apply(&self, x: &[S], y: &mut [S]) {
        for v in y[..self.n].iter_mut() {
            *v = S::zero();
        }
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k] as usize;
                let v = self.values[k];
                y[i] = y[i] + v * x[j];
                if j != i {
                    y[j] = y[j] + v * x[i];
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FactorOptions {
    /// Demand positive pivots (definiteness check for real problems).
    pub require_positive: bool,
    /// Pivots below `tol * max|diag|` are treated as singular.
    pub zero_pivot_tol: f64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        Self {
            require_positive: false,
            zero_pivot_tol: 1e-13,
        }
    }
}

/// Envelope (profile) LDL^T factorization with RCM pre-ordering.
#[derive(Debug, Clone)]
pub struct EnvelopeFactor<S> {
    n: usize,
    rank_of: Vec<u32>,
    first: Vec<u32>,
    offset: Vec<usize>,
    lvals: Vec<S>,
    d: Vec<S>,
}

impl<S: Scalar> EnvelopeFactor<S> {
    pub fn profile_len(&self) -> usize {
        self.lvals.len()
    }

    pub fn pivots(&self) -> &[S] {
        &self.d
    }

    /// Smallest pivot magnitude relative to the largest.
    pub fn min_pivot_ratio(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for p in &self.d {
            let m = p.modulus();
            lo = lo.min(m);
            hi = hi.max(m);
        }
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.n;
        let mut z = vec![S::zero(); n];
        for old in 0..n {
            z[self.rank_of[old] as usize] = b[old];
        }
        // L y = b
        for i in 0..n {
            let fi = self.first[i] as usize;
            let row = &self.lvals[self.offset[i]..self.offset[i] + (i - fi)];
            let mut acc = z[i];
            for (t, lv) in row.iter().enumerate() {
                acc = acc - *lv * z[fi + t];
            }
            z[i] = acc;
        }
        // D
        for i in 0..n {
            z[i] = z[i] / self.d[i];
        }
        // L^T x = y
        for i in (0..n).rev() {
            let fi = self.first[i] as usize;
            let row = &self.lvals[self.offset[i]..self.offset[i] + (i - fi)];
            let xi = z[i];
            for (t, lv) in row.iter().enumerate() {
                z[fi + t] = z[fi + t] - *lv * xi;
            }
        }
        let mut x = vec![S::zero(); n];
        for old in 0..n {
            x[old] = z[self.rank_of[old] as usize];
        }
        x
    }
}

/// Factor `a` as `P^T L D L^T P` on the RCM-permuted envelope.
pub fn factor_envelope<S: Scalar>(
    a: &SymCombined<S>,
    opts: FactorOptions,
) -> Result<EnvelopeFactor<S>> {
    let n = a.n;
    let order = reverse_cuthill_mckee(n, &a.row_ptr, &a.col_idx);
    let mut rank_of = vec![0u32; n];
    for (new, &old) in order.iter().enumerate() {
        rank_of[old as usize] = new as u32;
    }

    // Profile: first[i] = min over entries of the permuted row i.
    let mut first: Vec<u32> = (0..n as u32).collect();
    for i in 0..n {
        let pi = rank_of[i];
        for k in a.row_ptr[i]..a.row_ptr[i + 1] {
            let pj = rank_of[a.col_idx[k] as usize];
            let (row, col) = if pi >= pj { (pi, pj) } else { (pj, pi) };
            if col < first[row as usize] {
                first[row as usize] = col;
            }
        }
    }
    let mut offset = vec![0usize; n + 1];
    for i in 0..n {
        offset[i + 1] = offset[i] + (i - first[i] as usize);
    }
    let profile = offset[n];
    let mut lvals = vec![S::zero(); profile];
    let mut d = vec![S::zero(); n];
    let mut diag_scale = 0.0f64;

    // Scatter the (permuted) matrix values into the profile.
    for i in 0..n {
        let pi = rank_of[i] as usize;
        for k in a.row_ptr[i]..a.row_ptr[i + 1] {
            let j = a.col_idx[k] as usize;
            let v = a.values[k];
            let pj = rank_of[j] as usize;
            if pi == pj {
                d[pi] = v;
                diag_scale = diag_scale.max(v.modulus());
            } else {
                let (row, col) = if pi > pj { (pi, pj) } else { (pj, pi) };
                lvals[offset[row] + (col - first[row] as usize)] = v;
            }
        }
    }
    let pivot_floor = opts.zero_pivot_tol * diag_scale.max(f64::MIN_POSITIVE);

    // Row-oriented active factorization; scratch holds l_it * d_t of the
    // current row so the inner dot is a plain two-term multiply-add.
    let mut scratch = vec![S::zero(); n];
    for i in 0..n {
        let fi = first[i] as usize;
        let mut di = d[i];
        for j in fi..i {
            let fj = first[j] as usize;
            let ov = fi.max(fj);
            let mut s = lvals[offset[i] + (j - fi)];
            let row_j = offset[j] + (ov - fj);
            for t in 0..(j - ov) {
                s = s - scratch[ov + t] * lvals[row_j + t];
            }
            let lij = s / d[j];
            lvals[offset[i] + (j - fi)] = lij;
            scratch[j] = s; // l_ij * d_j
            di = di - lij * s;
        }
        let m = di.modulus();
        if !(m > pivot_floor) || !m.is_finite() {
            return Err(Error::Numerical(format!(
                "near-zero pivot {m:.3e} at permuted row {i} (matrix singular or ill-conditioned)"
            )));
        }
        if opts.require_positive && di.re() <= 0.0 {
            return Err(Error::Numerical(format!(
                "non-positive pivot at permuted row {i}: matrix is not positive definite"
            )));
        }
        d[i] = di;
    }

    Ok(EnvelopeFactor {
        n,
        rank_of,
        first,
        offset,
        lvals,
        d,
    })
}

/// Direct solve with iterative refinement; returns the final relative residual.
pub fn solve_refined<S: Scalar>(
    a: &SymCombined<S>,
    f: &EnvelopeFactor<S>,
    b: &[S],
    target_rel: f64,
    max_rounds: usize,
) -> (Vec<S>, f64) {
    let n = a.n;
    let norm = |v: &[S]| -> f64 {
        v.iter()
            .map(|x| {
                let m = x.modulus();
                m * m
            })
            .sum::<f64>()
            .sqrt()
    };
    let bnorm = norm(b).max(f64::MIN_POSITIVE);
    let mut x = f.solve(b);
    let mut y = vec![S::zero(); n];
    let mut rel = f64::INFINITY;
    for _ in 0..=max_rounds {
        a.apply(&x, &mut y);
        let mut r = vec![S::zero(); n];
        for i in 0..n {
            r[i] = b[i] - y[i];
        }
        rel = norm(&r) / bnorm;
        if rel <= target_rel {
            break;
        }
        let dx = f.solve(&r);
        for i in 0..n {
            x[i] = x[i] + dx[i];
        }
    }
    (x, rel)
}

/// Jacobi-preconditioned conjugate gradients for SPD systems.
pub fn conjugate_gradient(
    a: &SymCombined<f64>,
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = a.n;
    let mut diag = vec![0.0f64; n];
    for i in 0..n {
        for k in a.row_ptr[i]..a.row_ptr[i + 1] {
            if a.col_idx[k] as usize == i {
                diag[i] = a.values[k];
            }
        }
    }
    for d in &mut diag {
        if *d <= 0.0 {
            return Err(Error::Numerical("CG needs a positive diagonal".to_string()));
        }
    }
    let mut x = vec![0.0f64; n];
    let mut r = b.to_vec();
    let bnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0f64; n];
    for _ in 0..max_iter {
        a.apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::Numerical(
                "CG: matrix not positive definite".to_string(),
            ));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rnorm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= rel_tol * bnorm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NonConvergence {
        requested: 0,
        converged: 0,
        detail: format!("CG did not reach {rel_tol:.1e} in {max_iter} iterations"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn laplacian_1d(n: usize) -> SparseSym {
        let mut buf = TripletBuffer::new(n);
        for i in 0..n {
            buf.push(i, i, 2.0);
            if i + 1 < n {
                buf.push(i, i + 1, -1.0);
            }
        }
        buf.build()
    }

    #[test]
    fn triplets_sum_duplicates() {
        let mut buf = TripletBuffer::new(2);
        buf.push(0, 1, 1.0);
        buf.push(1, 0, 2.0);
        buf.push(0, 0, 5.0);
        let a = buf.build();
        assert_eq!(a.nnz_upper(), 2);
        let mut y = [0.0; 2];
        a.apply(&[1.0, 1.0], &mut y);
        assert_eq!(y, [8.0, 3.0]);
    }

    #[test]
    fn apply_matches_quadratic() {
        let a = laplacian_1d(8);
        let x: Vec<f64> = (0..8).map(|i| (i as f64).sin()).collect();
        let mut y = vec![0.0; 8];
        a.apply(&x, &mut y);
        let q = a.quadratic(&x, &x);
        let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!((q - dot).abs() < 1e-12);
    }

    #[test]
    fn envelope_solves_spd() {
        let a = laplacian_1d(50);
        let comb = SymCombined::from_real(&a);
        let f = factor_envelope(
            &comb,
            FactorOptions {
                require_positive: true,
                ..Default::default()
            },
        )
        .unwrap();
        let mut rng = SplitMix64::new(1);
        let xtrue: Vec<f64> = (0..50).map(|_| rng.next_symmetric()).collect();
        let mut b = vec![0.0; 50];
        a.apply(&xtrue, &mut b);
        let (x, rel) = solve_refined(&comb, &f, &b, 1e-13, 3);
        assert!(rel < 1e-12);
        for i in 0..50 {
            assert!((x[i] - xtrue[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn factor_detects_indefinite() {
        let mut buf = TripletBuffer::new(2);
        buf.push(0, 0, 1.0);
        buf.push(1, 1, -1.0);
        let a = buf.build();
        let comb = SymCombined::from_real(&a);
        assert!(factor_envelope(
            &comb,
            FactorOptions {
                require_positive: true,
                ..Default::default()
            }
        )
        .is_err());
        // Without the positivity demand an indefinite matrix still factors.
        let f = factor_envelope(&comb, FactorOptions::default()).unwrap();
        let x = f.solve(&[3.0, 4.0]);
        assert!((x[0] - 3.0).abs() < 1e-14 && (x[1] + 4.0).abs() < 1e-14);
    }

    #[test]
    fn factor_detects_singular() {
        let mut buf = TripletBuffer::new(2);
        buf.push(0, 0, 1.0);
        buf.push(0, 1, 1.0);
        buf.push(1, 1, 1.0);
        let a = buf.build();
        let comb = SymCombined::from_real(&a);
        assert!(matches!(
            factor_envelope(&comb, FactorOptions::default()),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn complex_symmetric_solve() {
        // (P - i s B) with P = 1D Laplacian + I, B = diag mass.
        let p = laplacian_1d(30);
        let eye = {
            let mut buf = TripletBuffer::new(30);
            for i in 0..30 {
                buf.push(i, i, 1.0);
            }
            buf.build()
        };
        let s = 0.7;
        let comb = SymCombined::combine(&[
            (&p, Complex64::new(1.0, 0.0)),
            (&eye, Complex64::new(1.0, -s)),
        ]);
        let f = factor_envelope(&comb, FactorOptions::default()).unwrap();
        let mut rng = SplitMix64::new(3);
        let xtrue: Vec<Complex64> = (0..30)
            .map(|_| Complex64::new(rng.next_symmetric(), rng.next_symmetric()))
            .collect();
        let mut b = vec![Complex64::new(0.0, 0.0); 30];
        comb.apply(&xtrue, &mut b);
        let (x, rel) = solve_refined(&comb, &f, &b, 1e-13, 3);
        assert!(rel < 1e-12);
        for i in 0..30 {
            assert!((x[i] - xtrue[i]).modulus() < 1e-10);
        }
    }

    #[test]
    fn rcm_reduces_profile_on_shuffled_band() {
        // A banded matrix under a random permutation; RCM should recover a
        // narrow profile.
        let n = 200usize;
        let mut rng = SplitMix64::new(9);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            perm.swap(i, j);
        }
        let mut buf = TripletBuffer::new(n);
        for i in 0..n {
            buf.push(perm[i], perm[i], 4.0);
            if i + 1 < n {
                buf.push(perm[i], perm[i + 1], -1.0);
            }
            if i + 2 < n {
                buf.push(perm[i], perm[i + 2], -0.5);
            }
        }
        let a = buf.build();
        let comb = SymCombined::from_real(&a);
        let f = factor_envelope(&comb, FactorOptions::default()).unwrap();
        // Bandwidth 2 band: profile at most 2 per row after a good ordering.
        assert!(
            f.profile_len() <= 4 * n,
            "profile {} too large",
            f.profile_len()
        );
    }

    #[test]
    fn cg_matches_direct() {
        let a = laplacian_1d(80);
        let comb = SymCombined::from_real(&a);
        let mut rng = SplitMix64::new(5);
        let b: Vec<f64> = (0..80).map(|_| rng.next_symmetric()).collect();
        let f = factor_envelope(&comb, FactorOptions::default()).unwrap();
        let (xd, _) = solve_refined(&comb, &f, &b, 1e-13, 3);
        let xc = conjugate_gradient(&comb, &b, 1e-12, 10_000).unwrap();
        for i in 0..80 {
            assert!((xd[i] - xc[i]).abs() < 1e-7);
        }
    }
}
