//! P1 finite elements: stiffness `K`, mass `M` and the boundary mass `B`
//! taken against the boundary measure, plus the Dirichlet, Neumann/Robin and
//! complex-Robin solvers, discrete weak normal derivatives and trace norms.
//!
//! Conventions: the assembled operator is `K + k M` (so the Dirichlet pencil
//! has positive spectrum), the Robin matrix is `K + k M + (alpha - i s) B`,
//! and the weak normal derivative of a discrete solution `u` is the boundary
//! restriction of `(K + k M) u - M f`, which realizes the Green identity
//! pairing `<du/dnu, Tr v>` exactly at the algebraic level. Its L^2(mu)
//! representative solves `B_Gamma psi = g`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
#[cfg_attr(test, allow(unused_imports))]
use crate::fx::FloatExt;
use crate::measure::{BoundaryMeasure, MeasureKind};
use crate::mesh::{DofMap, TriMesh};
use crate::sparse::{
    factor_envelope, solve_refined, Complex64, FactorOptions, SparseSym, SymCombined, TripletBuffer,
};

/// Nodal coefficient vector, real or complex.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl Field {
    pub fn len(&self) -> usize {
        match self {
            Field::Real(v) => v.len(),
            Field::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Field::Real(v) => Some(v),
            Field::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&[Complex64]> {
        match self {
            Field::Complex(v) => Some(v),
            Field::Real(_) => None,
        }
    }

    /// Entry-wise modulus.
    pub fn magnitude(&self) -> Vec<f64> {
        match self {
            Field::Real(v) => v.iter().map(|x| x.abs()).collect(),
            Field::Complex(v) => v.iter().map(|z| z.norm_sqr().sqrt()).collect(),
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Field::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Field::Complex(v) => v.clone(),
        }
    }
}

/// Assembled P1 operators with their dof split and measure.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    /// `int grad phi_i . grad phi_j`
    pub stiffness: SparseSym,
    /// `int phi_i phi_j`
    pub mass: SparseSym,
    /// `int_Gamma phi_i phi_j dmu`, supported on Gamma vertices.
    pub boundary_mass: SparseSym,
    pub dofmap: DofMap,
    pub measure: BoundaryMeasure,
    pub domain_area: f64,
    pub mesh_id: u64,
}

impl OperatorSet {
    pub fn n(&self) -> usize {
        self.mass.n()
    }

    /// `K + k M` as a sparse symmetric matrix.
    pub fn helmholtz(&self, k: f64) -> SparseSym {
        self.stiffness.add_scaled(&self.mass, k)
    }

    /// Energy product `u^T (K + M) v`.
    pub fn h1_product(&self, u: &[f64], v: &[f64]) -> f64 {
        self.stiffness.quadratic(u, v) + self.mass.quadratic(u, v)
    }

    pub fn measure_kind(&self) -> MeasureKind {
        self.measure.kind
    }
}

/// Triangle geometry: area and the P1 gradient coefficients
/// `grad phi_i = (b_i, c_i) / (2A)`.
fn tri_coeffs(mesh: &TriMesh, t: usize) -> (f64, [f64; 3], [f64; 3]) {
    let [i, j, k] = mesh.triangles[t];
    let (p1, p2, p3) = (mesh.vertices[i], mesh.vertices[j], mesh.vertices[k]);
    let area = 0.5 * ((p2.x - p1.x) * (p3.y - p1.y) - (p3.x - p1.x) * (p2.y - p1.y));
    let b = [p2.y - p3.y, p3.y - p1.y, p1.y - p2.y];
    let c = [p3.x - p2.x, p1.x - p3.x, p2.x - p1.x];
    (area, b, c)
}

/// Assemble stiffness and mass from the analytic P1 element matrices.
pub fn assemble_km(mesh: &TriMesh) -> (SparseSym, SparseSym) {
    let n = mesh.num_vertices();
    let mut kbuf = TripletBuffer::new(n);
    let mut mbuf = TripletBuffer::new(n);
    for t in 0..mesh.num_triangles() {
        let (area, b, c) = tri_coeffs(mesh, t);
        let verts = mesh.triangles[t];
        let inv4a = 1.0 / (4.0 * area);
        for i in 0..3 {
            for j in i..3 {
                let kij = (b[i] * b[j] + c[i] * c[j]) * inv4a;
                kbuf.push(verts[i], verts[j], kij);
                let mij = if i == j { area / 6.0 } else { area / 12.0 };
                mbuf.push(verts[i], verts[j], mij);
            }
        }
    }
    (kbuf.build(), mbuf.build())
}

/// Boundary mass against the measure: each edge contributes
/// `w_e [[2,1],[1,2]] / 6` on its two vertices (consistent 1D mass).
pub fn assemble_boundary_mass(mesh: &TriMesh, measure: &BoundaryMeasure) -> Result<SparseSym> {
    let n = mesh.num_vertices();
    let ids = measure.mesh_vertices.as_ref().ok_or_else(|| {
        Error::InvalidArgument("measure does not reference mesh vertices".to_string())
    })?;
    if ids.iter().any(|&v| v >= n) {
        return Err(Error::InvalidArgument(
            "measure references vertices outside the mesh".to_string(),
        ));
    }
    // Every measure edge must be a boundary edge of this mesh.
    let mut bset: Vec<(usize, usize)> = mesh
        .boundary_edges
        .iter()
        .map(|e| if e.a < e.b { (e.a, e.b) } else { (e.b, e.a) })
        .collect();
    bset.sort_unstable();
    let mut buf = TripletBuffer::new(n);
    for (e, pair) in measure.edges.iter().enumerate() {
        let (a, b) = (ids[pair[0]], ids[pair[1]]);
        let key = if a < b { (a, b) } else { (b, a) };
        if bset.binary_search(&key).is_err() {
            return Err(Error::InvalidArgument(
                "measure edge is not a boundary edge of the mesh".to_string(),
            ));
        }
        let w = measure.weights[e];
        buf.push(a, a, w / 3.0);
        buf.push(b, b, w / 3.0);
        buf.push(a, b, w / 6.0);
    }
    Ok(buf.build())
}

/// Assemble the operator set for a mesh and boundary measure. Gamma (the
/// robin dof set) is the vertex support of the measure.
pub fn assemble(mesh: &TriMesh, measure: &BoundaryMeasure) -> Result<OperatorSet> {
    let (stiffness, mass) = assemble_km(mesh);
    let boundary_mass = assemble_boundary_mass(mesh, measure)?;
    let n = mesh.num_vertices();
    let mut is_boundary = vec![false; n];
    for e in &mesh.boundary_edges {
        is_boundary[e.a] = true;
        is_boundary[e.b] = true;
    }
    let ids = measure.mesh_vertices.as_ref().unwrap();
    let mut robin: Vec<usize> = ids.clone();
    robin.sort_unstable();
    robin.dedup();
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for v in 0..n {
        if is_boundary[v] {
            boundary.push(v);
        } else {
            interior.push(v);
        }
    }
    Ok(OperatorSet {
        stiffness,
        mass,
        boundary_mass,
        dofmap: DofMap {
            interior,
            boundary,
            robin,
            is_boundary,
        },
        measure: measure.clone(),
        domain_area: mesh.total_area(),
        mesh_id: mesh.id(),
    })
}

fn spectral_exclusion(k: f64, err: Error) -> Error {
    match err {
        Error::Numerical(detail) => Error::SpectralExclusion { k, detail },
        other => other,
    }
}

/// Solve the Dirichlet problem for `-Delta + k`: `u = f` on the whole
/// boundary and `(K + kM) u = M source` at interior rows. With `source = 0`
/// this is the discrete k-harmonic extension of `f`.
///
/// `f` is read at boundary dofs of a full-length vector.
pub fn solve_dirichlet(
    ops: &OperatorSet,
    k: f64,
    f: &[f64],
    source: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let n = ops.n();
    if f.len() != n {
        return Err(Error::InvalidArgument(
            "boundary datum must be a full-length nodal vector".to_string(),
        ));
    }
    let a = ops.helmholtz(k);
    let interior = &ops.dofmap.interior;
    let boundary = &ops.dofmap.boundary;
    let a_ii = a.submatrix(interior);
    let a_ib = a.rect_block(interior, boundary);
    let comb = SymCombined::from_real(&a_ii);
    let factor = factor_envelope(
        &comb,
        FactorOptions {
            require_positive: true,
            ..Default::default()
        },
    )
    .map_err(|e| spectral_exclusion(k, e))?;

    let fb: Vec<f64> = boundary.iter().map(|&v| f[v]).collect();
    let mut rhs = vec![0.0f64; interior.len()];
    a_ib.apply(&fb, &mut rhs);
    for v in &mut rhs {
        *v = -*v;
    }
    if let Some(src) = source {
        if src.len() != n {
            return Err(Error::InvalidArgument(
                "source must be a full-length nodal vector".to_string(),
            ));
        }
        let mut msrc = vec![0.0f64; n];
        ops.mass.apply(src, &mut msrc);
        for (r, &v) in rhs.iter_mut().zip(interior.iter()) {
            *r += msrc[v];
        }
    }
    let (ui, _) = solve_refined(&comb, &factor, &rhs, 1e-13, 3);
    let mut u = vec![0.0f64; n];
    for (&v, &val) in boundary.iter().zip(&fb) {
        u[v] = val;
    }
    for (&v, &val) in interior.iter().zip(&ui) {
        u[v] = val;
    }
    Ok(u)
}

/// Solve the (complex) Robin problem
/// `(K + kM + (alpha - i s) B) u = -B h_ext` where `h` lives on Gamma.
/// Real data with `s = 0` and real `alpha` takes the real path.
pub fn solve_robin(
    ops: &OperatorSet,
    alpha: Complex64,
    k: f64,
    s: f64,
    h: &[f64],
) -> Result<Field> {
    let n = ops.n();
    let robin = &ops.dofmap.robin;
    if h.len() != robin.len() {
        return Err(Error::InvalidArgument(format!(
            "Robin datum must have one value per Gamma vertex ({} != {})",
            h.len(),
            robin.len()
        )));
    }
    let mut h_ext = vec![0.0f64; n];
    for (&v, &val) in robin.iter().zip(h) {
        h_ext[v] = val;
    }
    let mut rhs = vec![0.0f64; n];
    ops.boundary_mass.apply(&h_ext, &mut rhs);
    for v in &mut rhs {
        *v = -*v;
    }

    if s == 0.0 && alpha.im == 0.0 {
        let a = ops.helmholtz(k).add_scaled(&ops.boundary_mass, alpha.re);
        let comb = SymCombined::from_real(&a);
        let factor = factor_envelope(
            &comb,
            FactorOptions {
                require_positive: true,
                ..Default::default()
            },
        )
        .map_err(|e| spectral_exclusion(k, e))?;
        let (u, rel) = solve_refined(&comb, &factor, &rhs, 1e-12, 4);
        if rel > 1e-10 {
            return Err(Error::Numerical(format!(
                "Robin solve stalled at relative residual {rel:.3e}"
            )));
        }
        Ok(Field::Real(u))
    } else {
        let comb = SymCombined::<Complex64>::combine(&[
            (&ops.stiffness, Complex64::new(1.0, 0.0)),
            (&ops.mass, Complex64::new(k, 0.0)),
            (&ops.boundary_mass, alpha - Complex64::new(0.0, s)),
        ]);
        let factor = factor_envelope(&comb, FactorOptions::default())
            .map_err(|e| spectral_exclusion(k, e))?;
        let rhs_c: Vec<Complex64> = rhs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let (u, rel) = solve_refined(&comb, &factor, &rhs_c, 1e-12, 4);
        if rel > 1e-10 {
            return Err(Error::Numerical(format!(
                "complex Robin solve stalled at relative residual {rel:.3e}"
            )));
        }
        Ok(Field::Complex(u))
    }
}

/// Weak normal derivative of a discrete solution.
#[derive(Debug, Clone)]
pub struct NormalDerivative {
    /// Functional values `g = ((K + kM) u - M source)` at boundary dofs,
    /// ordered like `dofmap.boundary`.
    pub g: Vec<f64>,
    /// L^2(mu) representative on Gamma (`B_Gamma psi = g|_Gamma`), ordered
    /// like `dofmap.robin`; `None` when `g` does not vanish off Gamma.
    pub psi: Option<Vec<f64>>,
    /// Largest |g| on boundary dofs outside Gamma.
    pub off_gamma_max: f64,
}

/// Compute the discrete weak normal derivative of `u` for `-Delta + k` with
/// the given interior source (`None` means zero).
pub fn normal_derivative(
    ops: &OperatorSet,
    u: &[f64],
    k: f64,
    source: Option<&[f64]>,
) -> Result<NormalDerivative> {
    let n = ops.n();
    if u.len() != n {
        return Err(Error::InvalidArgument("field length mismatch".to_string()));
    }
    if ops.dofmap.robin.is_empty() {
        return Err(Error::InvalidArgument("empty Gamma".to_string()));
    }
    let mut resid = vec![0.0f64; n];
    ops.stiffness.apply(u, &mut resid);
    let mut tmp = vec![0.0f64; n];
    ops.mass.apply(u, &mut tmp);
    for i in 0..n {
        resid[i] += k * tmp[i];
    }
    if let Some(src) = source {
        ops.mass.apply(src, &mut tmp);
        for i in 0..n {
            resid[i] -= tmp[i];
        }
    }
    let g: Vec<f64> = ops.dofmap.boundary.iter().map(|&v| resid[v]).collect();
    let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let robin = &ops.dofmap.robin;
    let mut in_gamma = vec![false; n];
    for &v in robin {
        in_gamma[v] = true;
    }
    let off_gamma_max = ops
        .dofmap
        .boundary
        .iter()
        .filter(|&&v| !in_gamma[v])
        .map(|&v| resid[v].abs())
        .fold(0.0f64, f64::max);

    let psi = if off_gamma_max <= 1e-8 * gmax.max(1e-300) {
        let b_gg = ops.boundary_mass.submatrix(robin);
        let comb = SymCombined::from_real(&b_gg);
        let factor = factor_envelope(
            &comb,
            FactorOptions {
                require_positive: true,
                ..Default::default()
            },
        )?;
        let g_gamma: Vec<f64> = robin.iter().map(|&v| resid[v]).collect();
        let (p, _) = solve_refined(&comb, &factor, &g_gamma, 1e-13, 3);
        Some(p)
    } else {
        None
    };
    Ok(NormalDerivative {
        g,
        psi,
        off_gamma_max,
    })
}

/// Quotient trace norm: `sqrt(u^T (K + M) u)` with `u` the discrete
/// 1-harmonic extension of `f` (the minimizer over all extensions).
pub fn trace_norm(ops: &OperatorSet, f: &[f64]) -> Result<f64> {
    let u = solve_dirichlet(ops, 1.0, f, None)?;
    Ok(ops.h1_product(&u, &u).max(0.0).sqrt())
}

/// Green-identity consistency: `|g^T (Tr v) - (v^T K u + k v^T M u - v^T M f)|`
/// with the right-hand side evaluated by an independent per-element
/// quadrature path (not the assembled matrices).
pub fn greens_identity_residual(
    ops: &OperatorSet,
    mesh: &TriMesh,
    u: &[f64],
    v: &[f64],
    k: f64,
    source: Option<&[f64]>,
) -> Result<f64> {
    let n = ops.n();
    if u.len() != n || v.len() != n {
        return Err(Error::InvalidArgument("field length mismatch".to_string()));
    }
    let nd = normal_derivative(ops, u, k, source)?;
    let lhs: f64 = ops
        .dofmap
        .boundary
        .iter()
        .zip(&nd.g)
        .map(|(&vid, &gv)| gv * v[vid])
        .sum();

    // Independent element-by-element quadrature of the volume terms.
    let mut rhs = 0.0f64;
    for t in 0..mesh.num_triangles() {
        let (area, b, c) = tri_coeffs(mesh, t);
        let verts = mesh.triangles[t];
        let inv2a = 1.0 / (2.0 * area);
        let (mut gux, mut guy, mut gvx, mut gvy) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..3 {
            gux += u[verts[i]] * b[i] * inv2a;
            guy += u[verts[i]] * c[i] * inv2a;
            gvx += v[verts[i]] * b[i] * inv2a;
            gvy += v[verts[i]] * c[i] * inv2a;
        }
        rhs += area * (gux * gvx + guy * gvy);
        // Exact P1 mass quadrature: (A/12) [ (sum u)(sum v) + sum u_i v_i ].
        let su: f64 = verts.iter().map(|&i| u[i]).sum();
        let sv: f64 = verts.iter().map(|&i| v[i]).sum();
        let dot: f64 = verts.iter().map(|&i| u[i] * v[i]).sum();
        rhs += k * area / 12.0 * (su * sv + dot);
        if let Some(src) = source {
            let ss: f64 = verts.iter().map(|&i| src[i]).sum();
            let dots: f64 = verts.iter().map(|&i| src[i] * v[i]).sum();
            rhs -= area / 12.0 * (ss * sv + dots);
        }
    }
    Ok((lhs - rhs).abs())
}
