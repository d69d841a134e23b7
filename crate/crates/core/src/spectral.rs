//! Spectral solvers: shift-invert Lanczos for the sparse generalized
//! pencils (Dirichlet, Neumann, Robin), the discrete Poincaré–Steklov
//! operator as a boundary Schur complement, its spectrum against the
//! boundary mass, the resolvent identity and the injectivity probe.
//!
//! The Steklov operator at shift `k` is
//! `S = A_bb - A_bi A_ii^{-1} A_ib` with `A = K + k M`; measured against the
//! boundary mass `B` it is the discrete Dirichlet-to-Neumann map: `S f`
//! gives the weak normal derivative functional of the k-harmonic extension
//! of `f`, and `B^{-1} S f` its L^2(mu) representative.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::dense::{generalized_sym_eigen, tridiag_eigen, DenseCMat, DenseMat};
use crate::error::{Error, Result};
use crate::fem::{solve_robin, Field, OperatorSet};
#[cfg_attr(test, allow(unused_imports))]
use crate::fx::FloatExt;
use crate::measure::MeasureKind;
use crate::rng::SplitMix64;
use crate::sparse::{
    factor_envelope, Complex64, EnvelopeFactor, FactorOptions, SparseSym, SymCombined,
};

pub const DEFAULT_SEED: u64 = 0x53_54_45_4b_4c_4f_56; // "STEKLOV"

/// Ritz pairs are accepted at `RESIDUAL_TOL * (1 + |lambda|) * scale(A)`.
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigMode {
    Smallest,
    Nearest(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Robin,
    Steklov,
    Generic,
}

/// What problem a spectrum belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemDesc {
    pub bc: BcKind,
    pub alpha: f64,
    pub k: f64,
    pub measure: Option<MeasureKind>,
    pub mesh_id: u64,
}

impl ProblemDesc {
    pub fn generic() -> Self {
        Self {
            bc: BcKind::Generic,
            alpha: 0.0,
            k: 0.0,
            measure: None,
            mesh_id: 0,
        }
    }
}

/// Converged eigenpairs, ascending, with per-pair residual norms
/// `||A x - lambda W x||_2` for W-normalized `x`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub residual_norms: Vec<f64>,
    pub desc: ProblemDesc,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Shift-invert Lanczos with full reorthogonalization on the pencil
/// `A x = lambda W x` (`W` positive definite). Deterministic for a fixed
/// seed; eigenvectors come back W-orthonormal with the largest-magnitude
/// entry positive.
pub fn eigs_generalized_seeded(
    a: &SparseSym,
    w: &SparseSym,
    count: usize,
    mode: EigMode,
    seed: u64,
) -> Result<Spectrum> {
    let n = a.n();
    if w.n() != n {
        return Err(Error::InvalidArgument("pencil size mismatch".to_string()));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be positive".to_string()));
    }
    if count > n / 4 {
        return Err(Error::InvalidArgument(format!(
            "count {count} exceeds n/4 = {} (mesh too coarse for that many modes)",
            n / 4
        )));
    }
    let sigma = match mode {
        EigMode::Smallest => -0.5,
        EigMode::Nearest(s) => s,
    };
    let shifted = a.add_scaled(w, -sigma);
    let comb = SymCombined::from_real(&shifted);
    let factor = factor_envelope(&comb, FactorOptions::default()).map_err(|e| match e {
        Error::Numerical(detail) => Error::SpectralExclusion { k: sigma, detail },
        other => other,
    })?;

    let scale = a.max_abs().max(1.0);
    let mut rng = SplitMix64::new(seed);
    let m_max = (8 * count + 80).min(n);
    let mut q_cols: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    // W-normalized random start vector.
    let mut q0: Vec<f64> = (0..n).map(|_| rng.next_symmetric()).collect();
    let mut wq = vec![0.0f64; n];
    w.apply(&q0, &mut wq);
    let nrm = dot(&q0, &wq).sqrt();
    for v in &mut q0 {
        *v /= nrm;
    }
    q_cols.push(q0);

    let mut m_target = (2 * count + 30).min(m_max);
    let mut wz = vec![0.0f64; n];
    loop {
        while q_cols.len() <= m_target && alphas.len() < m_target {
            let j = alphas.len();
            let qj = &q_cols[j];
            w.apply(qj, &mut wz);
            let mut z = factor.solve(&wz);
            let alpha = dot(&z, &wz);
            alphas.push(alpha);
            for (zi, qi) in z.iter_mut().zip(qj) {
                *zi -= alpha * qi;
            }
            if j > 0 {
                let beta_prev = betas[j - 1];
                let qprev = &q_cols[j - 1];
                for (zi, qi) in z.iter_mut().zip(qprev) {
                    *zi -= beta_prev * qi;
                }
            }
            // Full reorthogonalization, two classical Gram-Schmidt passes.
            for _ in 0..2 {
                w.apply(&z, &mut wz);
                for qi in &q_cols {
                    let c = dot(qi, &wz);
                    for (zi, qv) in z.iter_mut().zip(qi) {
                        *zi -= c * qv;
                    }
                }
            }
            w.apply(&z, &mut wz);
            let beta = dot(&z, &wz).max(0.0).sqrt();
            if !(beta > 1e-14) {
                // Invariant subspace: inject a fresh W-orthogonal direction.
                let mut fresh: Vec<f64> = (0..n).map(|_| rng.next_symmetric()).collect();
                for _ in 0..2 {
                    w.apply(&fresh, &mut wz);
                    for qi in &q_cols {
                        let c = dot(qi, &wz);
                        for (fi, qv) in fresh.iter_mut().zip(qi) {
                            *fi -= c * qv;
                        }
                    }
                }
                w.apply(&fresh, &mut wz);
                let fn2 = dot(&fresh, &wz).max(0.0).sqrt();
                if !(fn2 > 1e-14) {
                    break; // space exhausted
                }
                for v in &mut fresh {
                    *v /= fn2;
                }
                betas.push(0.0);
                q_cols.push(fresh);
                continue;
            }
            betas.push(beta);
            let qnext: Vec<f64> = z.iter().map(|&v| v / beta).collect();
            q_cols.push(qnext);
        }

        let m = alphas.len();
        let (theta, y) = tridiag_eigen(&alphas, &betas[..m.saturating_sub(1)])?;

        // Ritz values: lambda = sigma + 1/theta.
        let mut cands: Vec<(f64, usize)> = theta
            .iter()
            .enumerate()
            .filter(|(_, &t)| t.abs() > 1e-300)
            .map(|(i, &t)| (sigma + 1.0 / t, i))
            .collect();
        match mode {
            EigMode::Smallest => cands.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap()),
            EigMode::Nearest(s) => cands.sort_by(|p, q| {
                (p.0 - s)
                    .abs()
                    .partial_cmp(&(q.0 - s).abs())
                    .unwrap()
                    .then(p.0.partial_cmp(&q.0).unwrap())
            }),
        }
        if cands.len() >= count {
            let mut selected: Vec<(f64, usize)> = cands[..count].to_vec();
            selected.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());

            // Assemble Ritz vectors and check true residuals.
            let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(count);
            let mut resids: Vec<f64> = Vec::with_capacity(count);
            let mut ok = true;
            let mut ax = vec![0.0f64; n];
            for &(lambda, idx) in &selected {
                let mut x = vec![0.0f64; n];
                for (col, qi) in q_cols.iter().take(m).enumerate() {
                    let c = y.get(col, idx);
                    if c != 0.0 {
                        for (xi, qv) in x.iter_mut().zip(qi) {
                            *xi += c * qv;
                        }
                    }
                }
                // W-normalize and fix the sign.
                w.apply(&x, &mut wz);
                let nx = dot(&x, &wz).max(0.0).sqrt();
                if nx > 0.0 {
                    for v in &mut x {
                        *v /= nx;
                    }
                }
                let mut best = 0usize;
                let mut mag = -1.0;
                for (i, &v) in x.iter().enumerate() {
                    if v.abs() > mag + 1e-300 {
                        mag = v.abs();
                        best = i;
                    }
                }
                if x[best] < 0.0 {
                    for v in &mut x {
                        *v = -*v;
                    }
                }
                a.apply(&x, &mut ax);
                w.apply(&x, &mut wz);
                let mut r2 = 0.0;
                for i in 0..n {
                    let r = ax[i] - lambda * wz[i];
                    r2 += r * r;
                }
                let resid = r2.sqrt();
                if resid > RESIDUAL_TOL * (1.0 + lambda.abs()) * scale {
                    ok = false;
                }
                resids.push(resid);
                vecs.push(x);
            }
            if ok {
                return Ok(Spectrum {
                    eigenvalues: selected.iter().map(|p| p.0).collect(),
                    eigenvectors: Some(vecs),
                    residual_norms: resids,
                    desc: ProblemDesc::generic(),
                });
            }
        }

        if m >= m_max || q_cols.len() <= m {
            let converged = cands.len().min(count);
            return Err(Error::NonConvergence {
                requested: count,
                converged,
                detail: format!(
                    "Lanczos reached m = {m} (max {m_max}) without {count} pairs at tolerance {RESIDUAL_TOL:.1e}"
                ),
            });
        }
        m_target = (m_target + 2 * count + 10).min(m_max);
    }
}

/// Deterministic default-seed front end.
pub fn eigs_generalized(
    a: &SparseSym,
    w: &SparseSym,
    count: usize,
    mode: EigMode,
) -> Result<Spectrum> {
    eigs_generalized_seeded(a, w, count, mode, DEFAULT_SEED)
}

/// Robin pencil `(K + alpha B, M)`: smallest `count` eigenpairs,
/// M-orthonormal eigenvectors. `alpha = 0` is the Neumann problem.
pub fn robin_spectrum(ops: &OperatorSet, alpha: f64, count: usize) -> Result<Spectrum> {
    robin_spectrum_seeded(ops, alpha, count, DEFAULT_SEED)
}

pub fn robin_spectrum_seeded(
    ops: &OperatorSet,
    alpha: f64,
    count: usize,
    seed: u64,
) -> Result<Spectrum> {
    if alpha < 0.0 {
        return Err(Error::InvalidArgument(
            "alpha must be nonnegative".to_string(),
        ));
    }
    let a = ops.stiffness.add_scaled(&ops.boundary_mass, alpha);
    let mut spec = eigs_generalized_seeded(&a, &ops.mass, count, EigMode::Smallest, seed)?;
    spec.desc = ProblemDesc {
        bc: if alpha == 0.0 {
            BcKind::Neumann
        } else {
            BcKind::Robin
        },
        alpha,
        k: 0.0,
        measure: Some(ops.measure_kind()),
        mesh_id: ops.mesh_id,
    };
    Ok(spec)
}

/// Dirichlet pencil `(K_II, M_II)`; eigenvectors are zero-extended to the
/// full vertex set.
pub fn dirichlet_spectrum(ops: &OperatorSet, count: usize) -> Result<Spectrum> {
    let interior = &ops.dofmap.interior;
    let k_ii = ops.stiffness.submatrix(interior);
    let m_ii = ops.mass.submatrix(interior);
    let inner = eigs_generalized(&k_ii, &m_ii, count, EigMode::Smallest)?;
    let n = ops.n();
    let vecs = inner.eigenvectors.map(|vs| {
        vs.into_iter()
            .map(|v| {
                let mut full = vec![0.0f64; n];
                for (&dof, &val) in interior.iter().zip(&v) {
                    full[dof] = val;
                }
                full
            })
            .collect::<Vec<_>>()
    });
    Ok(Spectrum {
        eigenvalues: inner.eigenvalues,
        eigenvectors: vecs,
        residual_norms: inner.residual_norms,
        desc: ProblemDesc {
            bc: BcKind::Dirichlet,
            alpha: 0.0,
            k: 0.0,
            measure: Some(ops.measure_kind()),
            mesh_id: ops.mesh_id,
        },
    })
}

/// Boundary dof budget for forming the Schur complement densely.
const DENSE_SCHUR_LIMIT: usize = 6000;

/// Discrete Poincaré–Steklov operator at shift `k`.
#[derive(Debug)]
pub struct SteklovOperator {
    pub k: f64,
    /// Mesh dof ids of the boundary columns of `s`, in order.
    pub boundary: Vec<usize>,
    /// Mesh dof ids of Gamma (subset of `boundary`).
    pub gamma: Vec<usize>,
    /// Position of each Gamma dof inside `boundary`.
    pub gamma_pos: Vec<usize>,
    /// Dense Schur complement on all boundary dofs; rows/columns off Gamma
    /// are retained (flagged through `gamma_pos`).
    pub s: DenseMat,
    /// Boundary mass restricted to Gamma (Gamma-local indexing).
    pub b_gamma: SparseSym,
    b_gamma_factor: EnvelopeFactor<f64>,
    interior_factor: EnvelopeFactor<f64>,
    a_ib: crate::sparse::CsrRect,
    a_bb: SparseSym,
}

impl SteklovOperator {
    pub fn n_boundary(&self) -> usize {
        self.boundary.len()
    }

    /// `S f` without the dense matrix (two triangular solves).
    pub fn apply_schur(&self, f: &[f64]) -> Vec<f64> {
        let nb = self.boundary.len();
        let ni = self.a_ib.nrows;
        let mut af = vec![0.0f64; ni];
        self.a_ib.apply(f, &mut af);
        let z = self.interior_factor.solve(&af);
        let mut out = vec![0.0f64; nb];
        self.a_bb.apply(f, &mut out);
        let mut back = vec![0.0f64; nb];
        self.a_ib.apply_transpose(&z, &mut back);
        for i in 0..nb {
            out[i] -= back[i];
        }
        out
    }

    /// Dense restriction of `s` to the Gamma block.
    pub fn s_gamma(&self) -> DenseMat {
        let ng = self.gamma.len();
        let mut sg = DenseMat::zeros(ng, ng);
        for (i, &pi) in self.gamma_pos.iter().enumerate() {
            for (j, &pj) in self.gamma_pos.iter().enumerate() {
                sg.set(i, j, self.s.get(pi, pj));
            }
        }
        sg
    }
}

/// Build the Schur complement `S = A_bb - A_bi A_ii^{-1} A_ib` of
/// `A = K + k M` onto the boundary dofs, column by column against the
/// stored interior factorization, then symmetrize.
pub fn build_steklov(ops: &OperatorSet, k: f64) -> Result<SteklovOperator> {
    let a = ops.helmholtz(k);
    let interior = &ops.dofmap.interior;
    let boundary = &ops.dofmap.boundary;
    let nb = boundary.len();
    if nb > DENSE_SCHUR_LIMIT {
        return Err(Error::Capacity(format!(
            "boundary dof count {nb} exceeds the dense Schur budget {DENSE_SCHUR_LIMIT}"
        )));
    }
    let a_ii = a.submatrix(interior);
    let a_ib = a.rect_block(interior, boundary);
    let a_bb = a.submatrix(boundary);
    let comb = SymCombined::from_real(&a_ii);
    let interior_factor =
        factor_envelope(&comb, FactorOptions::default()).map_err(|e| match e {
            Error::Numerical(detail) => Error::SpectralExclusion { k, detail },
            other => other,
        })?;

    let ni = interior.len();
    let mut s = DenseMat::zeros(nb, nb);
    let mut col = vec![0.0f64; ni];
    let mut back = vec![0.0f64; nb];
    let mut bcol = vec![0.0f64; nb];
    for jb in 0..nb {
        self_column(&a_ib, jb, &mut col);
        let z = interior_factor.solve(&col);
        self_column_sym(&a_bb, jb, &mut bcol);
        self_apply_transpose(&a_ib, &z, &mut back);
        for ib in 0..nb {
            s.set(ib, jb, bcol[ib] - back[ib]);
        }
    }
    s.symmetrize();

    let gamma = ops.dofmap.robin.clone();
    let gamma_pos: Vec<usize> = gamma
        .iter()
        .map(|g| boundary.binary_search(g).expect("Gamma inside boundary"))
        .collect();
    let b_gamma = ops.boundary_mass.submatrix(&gamma);
    let b_comb = SymCombined::from_real(&b_gamma);
    let b_gamma_factor = factor_envelope(
        &b_comb,
        FactorOptions {
            require_positive: true,
            ..Default::default()
        },
    )?;

    Ok(SteklovOperator {
        k,
        boundary: boundary.clone(),
        gamma,
        gamma_pos,
        s,
        b_gamma,
        b_gamma_factor,
        interior_factor,
        a_ib,
        a_bb,
    })
}

fn self_column(a: &crate::sparse::CsrRect, j: usize, out: &mut [f64]) {
    out[..a.nrows].fill(0.0);
    for i in 0..a.nrows {
        for k in a.row_ptr[i]..a.row_ptr[i + 1] {
            if a.col_idx[k] as usize == j {
                out[i] = a.values[k];
            }
        }
    }
}

fn self_column_sym(a: &SparseSym, j: usize, out: &mut [f64]) {
    out[..a.n()].fill(0.0);
    for (r, c, v) in a.upper_entries() {
        if c == j {
            out[r] = v;
        }
        if r == j && c != j {
            out[c] = v;
        }
    }
}

fn self_apply_transpose(a: &crate::sparse::CsrRect, x: &[f64], y: &mut [f64]) {
    a.apply_transpose(x, y);
}

/// Steklov spectrum: `S f = lambda B_Gamma f` on the Gamma block, ascending,
/// eigenvectors B-orthonormal.
pub fn steklov_spectrum(st: &SteklovOperator, count: usize) -> Result<Spectrum> {
    let ng = st.gamma.len();
    if count == 0 || count > ng {
        return Err(Error::InvalidArgument(format!("count must be in 1..={ng}")));
    }
    let sg = st.s_gamma();
    let bg = dense_from_sparse(&st.b_gamma);
    let (vals, vecs) = generalized_sym_eigen(&sg, &bg)?;
    let mut eigenvalues = Vec::with_capacity(count);
    let mut eigenvectors = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut sf = vec![0.0f64; ng];
    let mut bf = vec![0.0f64; ng];
    for idx in 0..count {
        let x = vecs.column(idx);
        sg.mul_vec(&x, &mut sf);
        st.b_gamma.apply(&x, &mut bf);
        let mut r2 = 0.0;
        for i in 0..ng {
            let r = sf[i] - vals[idx] * bf[i];
            r2 += r * r;
        }
        eigenvalues.push(vals[idx]);
        residuals.push(r2.sqrt());
        eigenvectors.push(x);
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors: Some(eigenvectors),
        residual_norms: residuals,
        desc: ProblemDesc {
            bc: BcKind::Steklov,
            alpha: 0.0,
            k: st.k,
            measure: None,
            mesh_id: 0,
        },
    })
}

fn dense_from_sparse(a: &SparseSym) -> DenseMat {
    let n = a.n();
    let mut m = DenseMat::zeros(n, n);
    for (i, j, v) in a.upper_entries() {
        m.set(i, j, v);
        if i != j {
            m.set(j, i, v);
        }
    }
    m
}

/// Apply the L^2(mu) Dirichlet-to-Neumann map:
/// `psi = B_Gamma^{-1} (S f)|_Gamma` for `f` on Gamma (zero off Gamma).
pub fn apply_dtn(st: &SteklovOperator, f: &[f64]) -> Result<Vec<f64>> {
    let ng = st.gamma.len();
    if f.len() != ng {
        return Err(Error::InvalidArgument(
            "datum must have one value per Gamma dof".to_string(),
        ));
    }
    let nb = st.boundary.len();
    let mut f_ext = vec![0.0f64; nb];
    for (i, &pos) in st.gamma_pos.iter().enumerate() {
        f_ext[pos] = f[i];
    }
    let mut sf = vec![0.0f64; nb];
    st.s.mul_vec(&f_ext, &mut sf);
    let g: Vec<f64> = st.gamma_pos.iter().map(|&p| sf[p]).collect();
    Ok(st.b_gamma_factor.solve(&g))
}

/// Compare the two resolvent routes for `(is - A_k)^{-1} h`:
/// route A traces the complex Robin solve on the full mesh; route B solves
/// `(is B_Gamma - S) u = B_Gamma h` densely. Returns the relative gap.
pub fn resolvent_check(st: &SteklovOperator, ops: &OperatorSet, s: f64, h: &[f64]) -> Result<f64> {
    if s == 0.0 {
        return Err(Error::InvalidArgument("s must be nonzero".to_string()));
    }
    let ng = st.gamma.len();
    if h.len() != ng {
        return Err(Error::InvalidArgument(
            "datum must have one value per Gamma dof".to_string(),
        ));
    }
    // Route A: full-mesh complex Robin solve, then trace on Gamma.
    let u = solve_robin(ops, Complex64::new(0.0, 0.0), st.k, s, h)?;
    let uc = match u {
        Field::Complex(v) => v,
        Field::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
    };
    let trace_a: Vec<Complex64> = st.gamma.iter().map(|&dof| uc[dof]).collect();

    // Route B: (is B - S_Gamma) x = B h.
    let sg = st.s_gamma();
    let bg = dense_from_sparse(&st.b_gamma);
    let mut mat = DenseCMat::zeros(ng);
    for i in 0..ng {
        for j in 0..ng {
            mat.set(i, j, Complex64::new(-sg.get(i, j), s * bg.get(i, j)));
        }
    }
    let mut rhs = vec![Complex64::new(0.0, 0.0); ng];
    let mut bh = vec![0.0f64; ng];
    st.b_gamma.apply(h, &mut bh);
    for i in 0..ng {
        rhs[i] = Complex64::new(bh[i], 0.0);
    }
    mat.lu_solve(&mut rhs)?;

    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in 0..ng {
        num += (trace_a[i] - rhs[i]).norm_sqr();
        den += rhs[i].norm_sqr();
    }
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok((num / den).sqrt())
}

/// Injectivity probe of the Poincaré–Steklov pencil near `k* = -lambda_N`.
#[derive(Debug, Clone, Copy)]
pub struct InjectivityProbe {
    pub k_star: f64,
    /// Minimal generalized singular value of `(S, B_Gamma)` at `k*`.
    pub min_sv: f64,
    /// Same probe at `k* + 0.5` (expected away from zero).
    pub min_sv_shifted: f64,
    /// Scale reference: `max |S_ij|` at `k*` (the entry norm used by the
    /// symmetry bound as well; the top generalized eigenvalue grows like
    /// `1/h` and would not give an h-stable threshold).
    pub s_norm: f64,
    /// Whether `k*` collided with the interior Dirichlet exclusion set and
    /// had to be nudged.
    pub shifted_probe: bool,
}

/// The `which`-th Neumann eigenvalue (1-based) gives `k* = -lambda_N`; the
/// pencil `(S, B)` at `k*` must be near-singular (Lemma: the Steklov map is
/// injective iff `k` avoids the Neumann spectrum), and regular at `k*+1/2`.
pub fn injectivity_probe(ops: &OperatorSet, which: usize) -> Result<InjectivityProbe> {
    if which == 0 || which > 10 {
        return Err(Error::InvalidArgument(
            "which must be in 1..=10".to_string(),
        ));
    }
    let neumann = robin_spectrum(ops, 0.0, which)?;
    let lambda_n = neumann.eigenvalues[which - 1];
    let mut k_star = -lambda_n;
    let mut shifted_probe = false;
    let st = match build_steklov(ops, k_star) {
        Ok(st) => st,
        Err(Error::SpectralExclusion { .. }) => {
            shifted_probe = true;
            k_star += 1e-3 * (1.0 + k_star.abs());
            build_steklov(ops, k_star)?
        }
        Err(e) => return Err(e),
    };
    let min_sv = steklov_min_singular_value(&st)?;
    let s_norm = st.s.max_abs();
    let st2 = build_steklov(ops, k_star + 0.5)?;
    let min_sv_shifted = steklov_min_singular_value(&st2)?;
    Ok(InjectivityProbe {
        k_star,
        min_sv,
        min_sv_shifted,
        s_norm,
        shifted_probe,
    })
}

/// Minimal generalized singular value of the pencil `(S_Gamma, B_Gamma)`:
/// the smallest |lambda| of `S f = lambda B f`. Near zero exactly when the
/// Steklov operator has a kernel direction (k on the Neumann spectrum).
pub fn steklov_min_singular_value(st: &SteklovOperator) -> Result<f64> {
    let sg = st.s_gamma();
    let bg = dense_from_sparse(&st.b_gamma);
    let (vals, _) = generalized_sym_eigen(&sg, &bg)?;
    Ok(vals.iter().fold(f64::INFINITY, |lo, v| lo.min(v.abs())))
}
