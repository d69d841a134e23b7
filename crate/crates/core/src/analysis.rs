//! Eigenfunction localization metrics, cross-mesh mode matching (modal
//! assurance criterion), spectral Hausdorff distances, and the
//! cross-generation stability study on the prefractal family.
//!
//! Localization is quantified by the participation ratio
//! `PR = (int phi^2)^2 / (|Omega| int phi^4)` (1 for delocalized fields,
//! small for concentrated ones) together with the area fraction, centroid
//! and bounding box of the half-max region |phi| >= max|phi| / 2.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMat;
use crate::error::{Error, Result};
use crate::fem::{assemble, OperatorSet};
#[cfg_attr(test, allow(unused_imports))]
use crate::fx::FloatExt;
use crate::geometry::{
    build_domain, generate_minkowski, hausdorff_distance, symmetric_difference_area,
    PrefractalSpec, Vec2,
};
use crate::measure::{
    arclength_measure, boundary_integral, selfsimilar_measure, selfsimilar_measure_on_chain,
    BoundaryMeasure, MeasureKind,
};
use crate::mesh::{mesh_polyomino, BoundaryTag, PointLocator, TriMesh, ALL_TAGS, MAX_REFINEMENT};
use crate::spectral::{robin_spectrum_seeded, Spectrum, DEFAULT_SEED};

/// Participation ratio of a nodal field: `(phi^T M phi)^2 / (|Omega| Q4)`
/// with `Q4` the edge-midpoint quadrature of `phi^4` (exact for quadratics;
/// on the P1 quartic it carries an O(h^2) quadrature error).
pub fn participation_ratio(phi: &[f64], mesh: &TriMesh, ops: &OperatorSet) -> Result<f64> {
    if phi.len() != mesh.num_vertices() {
        return Err(Error::InvalidArgument("field length mismatch".to_string()));
    }
    let l2 = ops.mass.quadratic(phi, phi);
    if l2 <= 0.0 {
        return Err(Error::InvalidArgument("zero field".to_string()));
    }
    let mut q4 = 0.0f64;
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangles[t];
        let area = mesh.triangle_area(t);
        let m1 = 0.5 * (phi[a] + phi[b]);
        let m2 = 0.5 * (phi[b] + phi[c]);
        let m3 = 0.5 * (phi[c] + phi[a]);
        q4 += area / 3.0 * (m1.powi(4) + m2.powi(4) + m3.powi(4));
    }
    Ok(l2 * l2 / (ops.domain_area * q4))
}

/// Localization summary of one mode.
#[derive(Debug, Clone, Copy)]
pub struct ModeLocalization {
    pub participation_ratio: f64,
    /// Area fraction of the half-max region |phi| >= max|phi|/2.
    pub support_fraction: f64,
    /// Area-weighted centroid of the half-max region.
    pub centroid: Vec2,
    pub bbox_lo: Vec2,
    pub bbox_hi: Vec2,
}

/// Lumped vertex masses (row sums of M; one third of the adjacent area).
fn lumped_mass(mesh: &TriMesh) -> Vec<f64> {
    let mut lump = vec![0.0f64; mesh.num_vertices()];
    for t in 0..mesh.num_triangles() {
        let area = mesh.triangle_area(t);
        for &v in &mesh.triangles[t] {
            lump[v] += area / 3.0;
        }
    }
    lump
}

pub fn localize_mode(phi: &[f64], mesh: &TriMesh, ops: &OperatorSet) -> Result<ModeLocalization> {
    let pr = participation_ratio(phi, mesh, ops)?;
    let lump = lumped_mass(mesh);
    let amax = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut mass = 0.0f64;
    let mut cx = 0.0f64;
    let mut cy = 0.0f64;
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (v, &val) in phi.iter().enumerate() {
        if val.abs() >= 0.5 * amax {
            let w = lump[v];
            let p = mesh.vertices[v];
            mass += w;
            cx += w * p.x;
            cy += w * p.y;
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
    }
    Ok(ModeLocalization {
        participation_ratio: pr,
        support_fraction: mass / ops.domain_area,
        centroid: Vec2::new(cx / mass, cy / mass),
        bbox_lo: lo,
        bbox_hi: hi,
    })
}

/// Localization report for every mode of a spectrum.
pub fn localization_report(
    spectrum: &Spectrum,
    mesh: &TriMesh,
    ops: &OperatorSet,
) -> Result<Vec<ModeLocalization>> {
    let vecs = spectrum
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("spectrum carries no eigenvectors".to_string()))?;
    vecs.iter()
        .map(|phi| localize_mode(phi, mesh, ops))
        .collect()
}

/// Mode matching between two spectra on overlapping domains.
#[derive(Debug, Clone)]
pub struct ModeMatch {
    /// `mac[i][j]` between mode i of `a` and mode j of `b`.
    pub mac: DenseMat,
    /// Greedy one-to-one best matches `(i, j, mac)`, best first.
    pub matches: Vec<(usize, usize, f64)>,
    /// Number of sample points in the domain intersection.
    pub samples: usize,
}

/// Modal assurance criterion matrix on a `grid x grid` sampling of the
/// intersection of the two mesh domains, P1-interpolated, with greedy
/// one-to-one matching. MAC is squared-normalized, hence sign- and
/// scale-invariant.
pub fn match_modes(
    a: &Spectrum,
    mesh_a: &TriMesh,
    b: &Spectrum,
    mesh_b: &TriMesh,
    grid: usize,
) -> Result<ModeMatch> {
    let va = a
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("spectrum a carries no eigenvectors".to_string()))?;
    let vb = b
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("spectrum b carries no eigenvectors".to_string()))?;
    if grid < 8 {
        return Err(Error::InvalidArgument("sample grid too coarse".to_string()));
    }
    let (alo, ahi) = mesh_a.bbox();
    let (blo, bhi) = mesh_b.bbox();
    let lo = Vec2::new(alo.x.max(blo.x), alo.y.max(blo.y));
    let hi = Vec2::new(ahi.x.min(bhi.x), ahi.y.min(bhi.y));
    if !(lo.x < hi.x && lo.y < hi.y) {
        return Err(Error::InvalidArgument("disjoint domains".to_string()));
    }
    let loc_a = PointLocator::new(mesh_a);
    let loc_b = PointLocator::new(mesh_b);
    let mut points: Vec<(usize, [f64; 3], usize, [f64; 3])> = Vec::new();
    let dx = (hi.x - lo.x) / grid as f64;
    let dy = (hi.y - lo.y) / grid as f64;
    for j in 0..grid {
        for i in 0..grid {
            let p = Vec2::new(lo.x + (i as f64 + 0.5) * dx, lo.y + (j as f64 + 0.5) * dy);
            if let (Some(ta), Some(tb)) = (loc_a.locate(p), loc_b.locate(p)) {
                points.push((ta.0, ta.1, tb.0, tb.1));
            }
        }
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "no common sample points in the domain intersection".to_string(),
        ));
    }

    let sample = |mesh: &TriMesh, phi: &[f64], tri: usize, bary: [f64; 3]| -> f64 {
        let [x, y, z] = mesh.triangles[tri];
        bary[0] * phi[x] + bary[1] * phi[y] + bary[2] * phi[z]
    };
    let sa: Vec<Vec<f64>> = va
        .iter()
        .map(|phi| {
            points
                .iter()
                .map(|&(t, bary, _, _)| sample(mesh_a, phi, t, bary))
                .collect()
        })
        .collect();
    let sb: Vec<Vec<f64>> = vb
        .iter()
        .map(|phi| {
            points
                .iter()
                .map(|&(_, _, t, bary)| sample(mesh_b, phi, t, bary))
                .collect()
        })
        .collect();

    let na = sa.len();
    let nb = sb.len();
    let mut mac = DenseMat::zeros(na, nb);
    let norm2 = |v: &[f64]| -> f64 { v.iter().map(|x| x * x).sum() };
    let nsa: Vec<f64> = sa.iter().map(|v| norm2(v)).collect();
    let nsb: Vec<f64> = sb.iter().map(|v| norm2(v)).collect();
    for i in 0..na {
        for j in 0..nb {
            let dot: f64 = sa[i].iter().zip(&sb[j]).map(|(x, y)| x * y).sum();
            let den = nsa[i] * nsb[j];
            mac.set(i, j, if den > 0.0 { dot * dot / den } else { 0.0 });
        }
    }

    let mut used_a = vec![false; na];
    let mut used_b = vec![false; nb];
    let mut matches = Vec::with_capacity(na.min(nb));
    for _ in 0..na.min(nb) {
        let mut best = (0usize, 0usize, -1.0f64);
        for i in 0..na {
            if used_a[i] {
                continue;
            }
            for j in 0..nb {
                if used_b[j] {
                    continue;
                }
                if mac.get(i, j) > best.2 {
                    best = (i, j, mac.get(i, j));
                }
            }
        }
        used_a[best.0] = true;
        used_b[best.1] = true;
        matches.push(best);
    }
    Ok(ModeMatch {
        mac,
        matches,
        samples: points.len(),
    })
}

/// Hausdorff distance between two truncated eigenvalue lists as subsets of
/// the real line.
pub fn spectral_hausdorff(a: &[f64], b: &[f64], cutoff: f64) -> Result<f64> {
    let ta: Vec<f64> = a.iter().copied().filter(|&x| x <= cutoff).collect();
    let tb: Vec<f64> = b.iter().copied().filter(|&x| x <= cutoff).collect();
    if ta.is_empty() || tb.is_empty() {
        return Err(Error::InvalidArgument(
            "empty truncated spectrum".to_string(),
        ));
    }
    let one_sided = |from: &[f64], to: &[f64]| -> f64 {
        from.iter()
            .map(|&x| {
                to.iter()
                    .map(|&y| (x - y).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    Ok(one_sided(&ta, &tb).max(one_sided(&tb, &ta)))
}

/// Which boundary edges carry the Robin measure in the study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaChoice {
    FullBoundary,
    FractalSide,
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub generations: Vec<u32>,
    pub alpha: f64,
    pub measure: MeasureKind,
    pub gamma: GammaChoice,
    /// Target mesh pitch; refinement is chosen per generation to reach it
    /// (downgraded when the cell budget would be exceeded).
    pub target_h: f64,
    pub eig_count: usize,
    /// Spectral Hausdorff truncation.
    pub cutoff: f64,
    /// MAC sampling resolution.
    pub sample_grid: usize,
    pub seed: u64,
    pub max_cells: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            generations: vec![1, 2, 3, 4],
            alpha: 0.1,
            measure: MeasureKind::SelfSimilar,
            gamma: GammaChoice::FractalSide,
            target_h: 1.0 / 64.0,
            eig_count: 20,
            cutoff: f64::INFINITY,
            sample_grid: 96,
            seed: DEFAULT_SEED,
            max_cells: crate::mesh::MAX_CELLS,
        }
    }
}

/// Smooth test family for the trace-integral convergence proxy.
pub const TEST_POLYNOMIALS: [&str; 6] = ["1", "x", "y", "x^2", "xy", "y^2"];

pub fn eval_test_polynomial(idx: usize, p: Vec2) -> f64 {
    match idx {
        0 => 1.0,
        1 => p.x,
        2 => p.y,
        3 => p.x * p.x,
        4 => p.x * p.y,
        5 => p.y * p.y,
        _ => 0.0,
    }
}

/// A mode is "adjacent to the fractal side" when the centroid of its
/// half-max region sits in the bottom band of the domain (the prefractal
/// strip spans y in [-L/3, L/4]).
pub const ADJACENCY_Y_FRACTION: f64 = 0.35;

#[derive(Debug, Clone)]
pub struct GenerationResult {
    pub generation: u32,
    pub refinement: u32,
    pub h: f64,
    pub downgraded: bool,
    pub spectrum: Spectrum,
    pub localization: Vec<ModeLocalization>,
    /// Trace-integral convergence proxy: integrals of the test family
    /// against the generation's unit-mass self-similar chain measure
    /// (the normalization under which the boundary measures converge
    /// weakly), independent of the mesh pitch schedule.
    pub measure_integrals: [f64; 6],
    /// Total mass of the study's Robin measure on this mesh.
    pub measure_total_mass: f64,
    /// Index of the most localized fractal-adjacent mode, if any clears the
    /// half-median participation-ratio bar.
    pub localized_mode: Option<usize>,
    /// Median participation ratio across the computed modes.
    pub median_pr: f64,
}

#[derive(Debug, Clone)]
pub struct CrossGenResult {
    pub g_low: u32,
    pub g_high: u32,
    pub mac: DenseMat,
    pub matches: Vec<(usize, usize, f64)>,
    pub spectral_hausdorff: f64,
    pub boundary_hausdorff: f64,
    pub symmetric_difference: f64,
    /// MAC of the localized-mode pair (low-gen mode vs its best match).
    pub localized_pair: Option<(usize, usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub generations: Vec<GenerationResult>,
    pub cross: Vec<CrossGenResult>,
    /// `|I_{g+1} - I_g|` per test polynomial, between successive listed
    /// generations.
    pub integral_differences: Vec<[f64; 6]>,
}

fn median(sorted_src: &[f64]) -> f64 {
    let mut v = sorted_src.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Pick the most localized fractal-adjacent mode: participation ratio at
/// most half the median and centroid inside the fractal band.
pub fn pick_localized_mode(localization: &[ModeLocalization], base_length: f64) -> Option<usize> {
    let prs: Vec<f64> = localization.iter().map(|l| l.participation_ratio).collect();
    let med = median(&prs);
    let mut best: Option<usize> = None;
    for (i, loc) in localization.iter().enumerate() {
        if loc.participation_ratio <= 0.5 * med
            && loc.centroid.y <= ADJACENCY_Y_FRACTION * base_length
        {
            if best.is_none()
                || loc.participation_ratio < localization[best.unwrap()].participation_ratio
            {
                best = Some(i);
            }
        }
    }
    best
}

fn pick_refinement(spec: &PrefractalSpec, config: &StudyConfig) -> (u32, bool) {
    let unit = spec.unit();
    let mut r = 0u32;
    while unit / 2f64.powi(r as i32) > config.target_h && r < MAX_REFINEMENT {
        r += 1;
    }
    let mut downgraded = false;
    // Keep the cell count within budget: cells ~ area / h^2.
    loop {
        let h = unit / 2f64.powi(r as i32);
        let cells = (spec.base_length * spec.base_length) / (h * h) * 1.4;
        if cells <= config.max_cells as f64 || r == 0 {
            break;
        }
        r -= 1;
        downgraded = true;
    }
    if unit / 2f64.powi(r as i32) > config.target_h {
        downgraded = true;
    }
    (r, downgraded)
}

fn study_measure(
    spec: &PrefractalSpec,
    mesh: &TriMesh,
    config: &StudyConfig,
) -> Result<BoundaryMeasure> {
    match (config.measure, config.gamma) {
        (MeasureKind::Arclength, GammaChoice::FullBoundary) => arclength_measure(mesh, &ALL_TAGS),
        (MeasureKind::Arclength, GammaChoice::FractalSide) => {
            arclength_measure(mesh, &[BoundaryTag::Fractal])
        }
        (MeasureKind::SelfSimilar, GammaChoice::FractalSide) => {
            selfsimilar_measure(spec, mesh, 1.0)
        }
        (MeasureKind::SelfSimilar, GammaChoice::FullBoundary) => Err(Error::InvalidArgument(
            "the self-similar measure is supported on the fractal side only".to_string(),
        )),
    }
}

/// Run the cross-generation spectral-stability study: per generation a mesh
/// at comparable pitch, the study measure, the Robin spectrum and its
/// localization report; across successive generations mode matching,
/// spectral and geometric Hausdorff distances, and the trace-integral
/// convergence proxy.
pub fn convergence_study(config: &StudyConfig) -> Result<ConvergenceReport> {
    if config.generations.is_empty() {
        return Err(Error::InvalidArgument("no generations listed".to_string()));
    }
    if !(config.alpha >= 0.0) {
        return Err(Error::InvalidArgument(
            "alpha must be nonnegative".to_string(),
        ));
    }
    let mut results: Vec<GenerationResult> = Vec::new();
    let mut meshes: Vec<TriMesh> = Vec::new();
    for &g in &config.generations {
        let spec = PrefractalSpec::minkowski(g);
        let domain = build_domain(&spec)?;
        let (r, downgraded) = pick_refinement(&spec, config);
        let mesh = mesh_polyomino(&domain, r)?;
        let m = study_measure(&spec, &mesh, config)?;
        let ops = assemble(&mesh, &m)?;
        let spectrum = robin_spectrum_seeded(&ops, config.alpha, config.eig_count, config.seed)?;
        let localization = localization_report(&spectrum, &mesh, &ops)?;
        let chain = generate_minkowski(&spec)?;
        let proxy = selfsimilar_measure_on_chain(&spec, &chain, 1.0)?;
        let mut integrals = [0.0f64; 6];
        for (i, val) in integrals.iter_mut().enumerate() {
            let vals = proxy.sample(|p| eval_test_polynomial(i, p));
            *val = boundary_integral(&proxy, &vals)?;
        }
        let prs: Vec<f64> = localization.iter().map(|l| l.participation_ratio).collect();
        let localized_mode = pick_localized_mode(&localization, spec.base_length);
        results.push(GenerationResult {
            generation: g,
            refinement: r,
            h: mesh.h,
            downgraded,
            spectrum,
            localization,
            measure_integrals: integrals,
            measure_total_mass: m.total_mass,
            localized_mode,
            median_pr: median(&prs),
        });
        meshes.push(mesh);
    }

    let mut cross: Vec<CrossGenResult> = Vec::new();
    let mut integral_differences: Vec<[f64; 6]> = Vec::new();
    for w in 0..results.len().saturating_sub(1) {
        let (lowers, uppers) = results.split_at(w + 1);
        let low = &lowers[w];
        let high = &uppers[0];
        let mm = match_modes(
            &low.spectrum,
            &meshes[w],
            &high.spectrum,
            &meshes[w + 1],
            config.sample_grid,
        )?;
        let sh = spectral_hausdorff(
            &low.spectrum.eigenvalues,
            &high.spectrum.eigenvalues,
            config.cutoff,
        )?;
        let chain_low = generate_minkowski(&PrefractalSpec::minkowski(low.generation))?;
        let chain_high = generate_minkowski(&PrefractalSpec::minkowski(high.generation))?;
        let spacing = PrefractalSpec::minkowski(high.generation).unit() * 0.5;
        let bh = hausdorff_distance(&chain_low, &chain_high, spacing)?;
        let dom_low = build_domain(&PrefractalSpec::minkowski(low.generation))?;
        let dom_high = build_domain(&PrefractalSpec::minkowski(high.generation))?;
        let sd = symmetric_difference_area(&dom_low, &dom_high, 512)?;

        let localized_pair = low.localized_mode.map(|i| {
            // Best match of the localized low mode in the high spectrum.
            let mut bj = 0usize;
            let mut bv = -1.0;
            for j in 0..high.spectrum.len() {
                if mm.mac.get(i, j) > bv {
                    bv = mm.mac.get(i, j);
                    bj = j;
                }
            }
            (i, bj, bv)
        });

        let mut diffs = [0.0f64; 6];
        for i in 0..6 {
            diffs[i] = (high.measure_integrals[i] - low.measure_integrals[i]).abs();
        }
        integral_differences.push(diffs);
        cross.push(CrossGenResult {
            g_low: low.generation,
            g_high: high.generation,
            mac: mm.mac,
            matches: mm.matches,
            spectral_hausdorff: sh,
            boundary_hausdorff: bh,
            symmetric_difference: sd,
            localized_pair,
        });
    }
    Ok(ConvergenceReport {
        generations: results,
        cross,
        integral_differences,
    })
}
