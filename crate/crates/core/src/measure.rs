//! Boundary measures mu on Gamma: arclength and the self-similar d-measure of
//! the Minkowski chain, the d-upper-regularity certificate
//! `mu(B_r(x)) <= c_d r^d`, boundary integrals against traces, and a
//! truncated-box capacity estimator.
//!
//! The self-similar measure gives every elementary generation-g segment the
//! mass `total / 8^g`; since the total arclength `2^g` diverges with g, this
//! is the normalization under which the boundary measures converge weakly and
//! the trace-integral convergence proxy makes sense. Its regularity exponent
//! is d = log 8 / log 4 = 3/2.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
#[cfg_attr(test, allow(unused_imports))]
use crate::fx::FloatExt;
use crate::geometry::{PolyChain, PrefractalSpec, Vec2};
use crate::mesh::{BoundaryTag, TriMesh};
use crate::sparse::{
    conjugate_gradient, factor_envelope, solve_refined, FactorOptions, SymCombined,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Arclength,
    SelfSimilar,
}

/// Weighted edge set realizing a boundary measure on Gamma.
#[derive(Debug, Clone)]
pub struct BoundaryMeasure {
    pub kind: MeasureKind,
    /// Regularity exponent the measure is certified against by default.
    pub d: f64,
    /// Gamma vertex coordinates (local indexing).
    pub points: Vec<Vec2>,
    /// Edges as pairs of local point indices.
    pub edges: Vec<[usize; 2]>,
    /// Nonnegative mass per edge.
    pub weights: Vec<f64>,
    pub total_mass: f64,
    /// Mesh vertex id of each local point, when built from a mesh.
    pub mesh_vertices: Option<Vec<usize>>,
}

impl BoundaryMeasure {
    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        self.points[a].dist(self.points[b])
    }

    /// Trapezoidal integral of per-vertex trace values against the measure.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        boundary_integral(self, values)
    }

    /// Evaluate a function on the Gamma points.
    pub fn sample<F: Fn(Vec2) -> f64>(&self, f: F) -> Vec<f64> {
        self.points.iter().map(|&p| f(p)).collect()
    }
}

fn collect_gamma_edges(
    mesh: &TriMesh,
    keep: impl Fn(&BoundaryTag) -> bool,
) -> (Vec<Vec2>, Vec<[usize; 2]>, Vec<usize>, Vec<f64>) {
    let mut mesh_ids: Vec<usize> = Vec::new();
    for e in &mesh.boundary_edges {
        if keep(&e.tag) {
            mesh_ids.push(e.a);
            mesh_ids.push(e.b);
        }
    }
    mesh_ids.sort_unstable();
    mesh_ids.dedup();
    let local = |v: usize| mesh_ids.binary_search(&v).unwrap();
    let mut edges = Vec::new();
    let mut lengths = Vec::new();
    for e in &mesh.boundary_edges {
        if keep(&e.tag) {
            edges.push([local(e.a), local(e.b)]);
            lengths.push(mesh.vertices[e.a].dist(mesh.vertices[e.b]));
        }
    }
    let points = mesh_ids.iter().map(|&v| mesh.vertices[v]).collect();
    (points, edges, mesh_ids, lengths)
}

/// Arclength measure on the edges with tags in `gamma_tags`; d defaults to 1.
pub fn arclength_measure(mesh: &TriMesh, gamma_tags: &[BoundaryTag]) -> Result<BoundaryMeasure> {
    let (points, edges, mesh_ids, lengths) = collect_gamma_edges(mesh, |t| gamma_tags.contains(t));
    if edges.is_empty() {
        return Err(Error::InvalidArgument(
            "empty Gamma: no boundary edges carry the requested tags".to_string(),
        ));
    }
    let total_mass = lengths.iter().sum();
    Ok(BoundaryMeasure {
        kind: MeasureKind::Arclength,
        d: 1.0,
        points,
        edges,
        weights: lengths,
        total_mass,
        mesh_vertices: Some(mesh_ids),
    })
}

/// Self-similar measure of total mass `total` on the generation-g prefractal
/// side: each of the `8^g` elementary segments carries `total / 8^g`,
/// distributed over its mesh edges proportionally to covered length.
/// d = log 8 / log 4 = 3/2.
pub fn selfsimilar_measure(
    spec: &PrefractalSpec,
    mesh: &TriMesh,
    total: f64,
) -> Result<BoundaryMeasure> {
    spec.validate()?;
    if !(total > 0.0) {
        return Err(Error::InvalidArgument(
            "total mass must be positive".to_string(),
        ));
    }
    let (points, edges, mesh_ids, lengths) =
        collect_gamma_edges(mesh, |t| *t == BoundaryTag::Fractal);
    if edges.is_empty() {
        return Err(Error::InvalidArgument(
            "mesh has no fractal-tagged edges".to_string(),
        ));
    }
    let unit = spec.unit();
    // The mesh must subdivide every elementary segment uniformly: all edges
    // equal length, an exact power-of-two fraction of the segment length,
    // and total chain length 2^g * base_length.
    let len0 = lengths[0];
    for &l in &lengths {
        if (l - len0).abs() > 1e-12 * unit {
            return Err(Error::InvalidArgument(
                "mesh/spec generation mismatch: unequal fractal edge lengths".to_string(),
            ));
        }
    }
    let ratio = unit / len0;
    let r = libm::round(ratio.ln() / core::f64::consts::LN_2);
    if !(r >= 0.0) || (ratio - 2f64.powi(r as i32)).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::InvalidArgument(
            "mesh/spec generation mismatch: edge length is not a dyadic fraction of the elementary segment".to_string(),
        ));
    }
    let expect_count = spec.segment_count() * (1usize << r as u32);
    if edges.len() != expect_count {
        return Err(Error::InvalidArgument(
            "mesh/spec generation mismatch: wrong fractal edge count".to_string(),
        ));
    }
    let seg_mass = total / spec.segment_count() as f64;
    let weights: Vec<f64> = lengths.iter().map(|&l| seg_mass * (l / unit)).collect();
    let total_mass = weights.iter().sum();
    Ok(BoundaryMeasure {
        kind: MeasureKind::SelfSimilar,
        d: 1.5,
        points,
        edges,
        weights,
        total_mass,
        mesh_vertices: Some(mesh_ids),
    })
}

/// Mesh-free variant on a raw prefractal chain (one edge per elementary
/// segment); used by the cross-generation integral convergence checks where
/// a full 2D mesh of the finest generations would be wasteful.
pub fn selfsimilar_measure_on_chain(
    spec: &PrefractalSpec,
    chain: &PolyChain,
    total: f64,
) -> Result<BoundaryMeasure> {
    spec.validate()?;
    if !(total > 0.0) {
        return Err(Error::InvalidArgument(
            "total mass must be positive".to_string(),
        ));
    }
    if chain.segment_count() != spec.segment_count() {
        return Err(Error::InvalidArgument(
            "chain/spec generation mismatch".to_string(),
        ));
    }
    let seg_mass = total / spec.segment_count() as f64;
    let edges: Vec<[usize; 2]> = (0..chain.segment_count()).map(|i| [i, i + 1]).collect();
    Ok(BoundaryMeasure {
        kind: MeasureKind::SelfSimilar,
        d: 1.5,
        points: chain.vertices.clone(),
        weights: vec![seg_mass; edges.len()],
        edges,
        total_mass: total,
        mesh_vertices: None,
    })
}

/// Where the regularity sweep puts its ball centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterRule {
    /// Every Gamma vertex and every edge midpoint.
    VerticesAndMidpoints,
    /// Every k-th point of that list (cheap sweeps on fine generations).
    EveryKth(usize),
}

#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub d: f64,
    pub c_d: f64,
    pub worst_center: Vec2,
    pub worst_radius: f64,
    /// `(r, max_x mu(B_r(x)) / r^d)` per tested radius.
    pub per_radius: Vec<(f64, f64)>,
    /// d outside the trace regime (n-2, n) = (0, 2).
    pub outside_trace_regime: bool,
}

/// Length of `seg ∩ B(x, r)` times the edge's linear density, exactly.
fn ball_edge_mass(a: Vec2, b: Vec2, w: f64, x: Vec2, r: f64) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return 0.0;
    }
    let ax = a - x;
    // |ax + t ab|^2 = r^2
    let bq = 2.0 * ax.dot(ab);
    let cq = ax.dot(ax) - r * r;
    let disc = bq * bq - 4.0 * len2 * cq;
    if disc <= 0.0 {
        // No crossing: fully inside iff an endpoint is.
        return if cq < 0.0 { w } else { 0.0 };
    }
    let sq = disc.sqrt();
    let t1 = ((-bq - sq) / (2.0 * len2)).clamp(0.0, 1.0);
    let t2 = ((-bq + sq) / (2.0 * len2)).clamp(0.0, 1.0);
    w * (t2 - t1)
}

/// Certify the d-upper-regularity constant: the maximum of
/// `mu(B_r(x)) / r^d` over the sampled centers and given radii, with exact
/// segment-disk intersections.
pub fn check_upper_regularity(
    m: &BoundaryMeasure,
    d: f64,
    radii: &[f64],
    rule: CenterRule,
) -> Result<RegularityReport> {
    if !(d > 0.0) {
        return Err(Error::InvalidArgument(
            "exponent d must be positive".to_string(),
        ));
    }
    if d > 2.0 {
        return Err(Error::InvalidArgument(
            "exponent d beyond the ambient dimension".to_string(),
        ));
    }
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::InvalidArgument(
            "radii must be a nonempty subset of (0, 1]".to_string(),
        ));
    }
    let mut centers: Vec<Vec2> = m.points.clone();
    for e in &m.edges {
        centers.push((m.points[e[0]] + m.points[e[1]]) * 0.5);
    }
    if let CenterRule::EveryKth(k) = rule {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "stride must be positive".to_string(),
            ));
        }
        centers = centers.into_iter().step_by(k).collect();
    }

    // Bucket the edges on a grid of the largest radius for candidate lookup.
    let r_max = radii.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &m.points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    let cell = r_max;
    let nx = (((hi.x - lo.x) / cell).ceil() as usize + 2).max(1);
    let ny = (((hi.y - lo.y) / cell).ceil() as usize + 2).max(1);
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); nx * ny];
    for (e, pair) in m.edges.iter().enumerate() {
        let (a, b) = (m.points[pair[0]], m.points[pair[1]]);
        let x0 = (((a.x.min(b.x) - lo.x) / cell).floor() as isize).clamp(0, nx as isize - 1);
        let x1 = (((a.x.max(b.x) - lo.x) / cell).floor() as isize).clamp(0, nx as isize - 1);
        let y0 = (((a.y.min(b.y) - lo.y) / cell).floor() as isize).clamp(0, ny as isize - 1);
        let y1 = (((a.y.max(b.y) - lo.y) / cell).floor() as isize).clamp(0, ny as isize - 1);
        for gy in y0..=y1 {
            for gx in x0..=x1 {
                buckets[gy as usize * nx + gx as usize].push(e as u32);
            }
        }
    }

    let mut per_radius: Vec<(f64, f64)> = radii.iter().map(|&r| (r, 0.0)).collect();
    let mut c_d = 0.0f64;
    let mut worst_center = centers[0];
    let mut worst_radius = radii[0];
    let mut stamp = vec![u32::MAX; m.edges.len()];
    for (ci, &x) in centers.iter().enumerate() {
        let gx = (((x.x - lo.x) / cell).floor() as isize).clamp(0, nx as isize - 1);
        let gy = (((x.y - lo.y) / cell).floor() as isize).clamp(0, ny as isize - 1);
        let mut candidates: Vec<u32> = Vec::new();
        for dy in -1..=1isize {
            for dx in -1..=1isize {
                let (cx, cy) = (gx + dx, gy + dy);
                if cx < 0 || cy < 0 || cx >= nx as isize || cy >= ny as isize {
                    continue;
                }
                for &e in &buckets[cy as usize * nx + cx as usize] {
                    if stamp[e as usize] != ci as u32 {
                        stamp[e as usize] = ci as u32;
                        candidates.push(e);
                    }
                }
            }
        }
        candidates.sort_unstable();
        for (ri, &r) in radii.iter().enumerate() {
            let mut mass = 0.0;
            for &e in &candidates {
                let pair = m.edges[e as usize];
                mass += ball_edge_mass(
                    m.points[pair[0]],
                    m.points[pair[1]],
                    m.weights[e as usize],
                    x,
                    r,
                );
            }
            let c = mass / r.powf(d);
            if c > per_radius[ri].1 {
                per_radius[ri].1 = c;
            }
            if c > c_d {
                c_d = c;
                worst_center = x;
                worst_radius = r;
            }
        }
    }
    Ok(RegularityReport {
        d,
        c_d,
        worst_center,
        worst_radius,
        per_radius,
        outside_trace_regime: !(d < 2.0),
    })
}

/// Trapezoidal edge rule: `sum_e w_e (v_a + v_b) / 2`.
pub fn boundary_integral(m: &BoundaryMeasure, trace_values: &[f64]) -> Result<f64> {
    if trace_values.len() != m.points.len() {
        return Err(Error::InvalidArgument(
            "trace values must cover every Gamma vertex".to_string(),
        ));
    }
    let mut acc = 0.0;
    for (e, pair) in m.edges.iter().enumerate() {
        acc += m.weights[e] * 0.5 * (trace_values[pair[0]] + trace_values[pair[1]]);
    }
    Ok(acc)
}

/// Free-node budget beyond which the capacity solve switches to CG
/// (the direct profile would not fit in memory on refined boxes).
const CAPACITY_DIRECT_LIMIT: usize = 120_000;

/// Truncated capacity of a node set: `min u^T (K + M) u` over fields equal
/// to 1 on `target_nodes` and 0 on the box boundary (so the minimizer
/// extends by zero to the whole plane). Truncation restricts the admissible
/// set, so this is an upper bound of the capacity over the plane and it
/// decreases toward it as the box grows.
pub fn capacity_estimate(box_mesh: &TriMesh, target_nodes: &[usize]) -> Result<f64> {
    if target_nodes.is_empty() {
        return Ok(0.0);
    }
    let n = box_mesh.num_vertices();
    let mut target: Vec<usize> = target_nodes.to_vec();
    target.sort_unstable();
    target.dedup();
    if target.iter().any(|&v| v >= n) {
        return Err(Error::InvalidArgument(
            "target node out of range".to_string(),
        ));
    }
    let mut on_boundary = vec![false; n];
    for e in &box_mesh.boundary_edges {
        on_boundary[e.a] = true;
        on_boundary[e.b] = true;
    }
    if target.iter().any(|&v| on_boundary[v]) {
        return Err(Error::InvalidArgument(
            "target touches the truncation box boundary".to_string(),
        ));
    }
    // Box diameter must dominate the target diameter (4x).
    let (blo, bhi) = box_mesh.bbox();
    let mut tlo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut thi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &v in &target {
        let p = box_mesh.vertices[v];
        tlo.x = tlo.x.min(p.x);
        tlo.y = tlo.y.min(p.y);
        thi.x = thi.x.max(p.x);
        thi.y = thi.y.max(p.y);
    }
    let box_diam = bhi.dist(blo);
    let target_diam = thi.dist(tlo);
    if box_diam < 4.0 * target_diam {
        return Err(Error::InvalidArgument(
            "truncation box diameter must be at least 4x the target diameter".to_string(),
        ));
    }

    let (k, m) = crate::fem::assemble_km(box_mesh);
    let a = k.add_scaled(&m, 1.0);
    let mut is_fixed = vec![false; n];
    for &v in &target {
        is_fixed[v] = true;
    }
    // Zero-Dirichlet truncation on the box boundary.
    for (v, &on_b) in on_boundary.iter().enumerate() {
        if on_b {
            is_fixed[v] = true;
        }
    }
    let free: Vec<usize> = (0..n).filter(|&v| !is_fixed[v]).collect();
    let a_ff = a.submatrix(&free);
    let a_ft = a.rect_block(&free, &target);
    let ones = vec![1.0f64; target.len()];
    let mut rhs = vec![0.0f64; free.len()];
    a_ft.apply(&ones, &mut rhs);
    for v in &mut rhs {
        *v = -*v;
    }

    let comb = SymCombined::from_real(&a_ff);
    let u_free = if free.len() <= CAPACITY_DIRECT_LIMIT {
        let f = factor_envelope(
            &comb,
            FactorOptions {
                require_positive: true,
                ..Default::default()
            },
        )?;
        solve_refined(&comb, &f, &rhs, 1e-12, 3).0
    } else {
        conjugate_gradient(&comb, &rhs, 1e-10, 100_000)?
    };

    let mut u = vec![0.0f64; n];
    for (i, &v) in free.iter().enumerate() {
        u[v] = u_free[i];
    }
    for &v in &target {
        u[v] = 1.0;
    }
    Ok(a.quadratic(&u, &u))
}
