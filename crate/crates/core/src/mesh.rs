//! Conforming triangulations of prefractal polyomino domains, exactly aligned
//! with the dyadic boundary grid, plus uniform refinement and a structured
//! disk mesh for oracle problems.
//!
//! Minkowski domains are polyominoes at pitch `base_length / 4^g`: every cell
//! of that grid is entirely inside or outside, so inside/outside by cell
//! center is exact and the boundary is represented without geometric error.
//! Each inside cell splits into two triangles along its SW-NE diagonal;
//! vertices are numbered row-major, which makes the output deterministic.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
#[cfg_attr(test, allow(unused_imports))]
use crate::fx::FloatExt;
use crate::geometry::{DomainPolygon, Vec2};

pub const MAX_REFINEMENT: u32 = 8;
/// Budget on generated cells; `convergence_study` downgrades refinement to fit.
pub const MAX_CELLS: usize = 8_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// Edge on the prefractal side.
    Fractal,
    /// Edge on one of the two sides adjacent to the prefractal side.
    Lateral,
    /// Edge on the side opposite the prefractal side.
    Top,
}

pub const ALL_TAGS: [BoundaryTag; 3] =
    [BoundaryTag::Fractal, BoundaryTag::Lateral, BoundaryTag::Top];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub tag: BoundaryTag,
}

/// Structured-grid lookup for meshes produced by `mesh_polyomino`:
/// maps a grid cell to its pair of triangles.
#[derive(Debug, Clone)]
pub struct StructuredGrid {
    pub origin: Vec2,
    pub pitch: f64,
    pub nx: usize,
    pub ny: usize,
    /// First triangle of the cell (the second is `+1`), or `-1` if outside.
    pub cell_tri: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Vec2>,
    /// CCW index triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Grid pitch (structured meshes) or a representative element size.
    pub h: f64,
    pub grid: Option<StructuredGrid>,
}

impl TriMesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * ((pb.x - pa.x) * (pc.y - pa.y) - (pc.x - pa.x) * (pb.y - pa.y))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn bbox(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    /// Undirected edge count (used by the Euler-relation check).
    pub fn num_edges(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(self.triangles.len() * 3);
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.push(if a < b { (a, b) } else { (b, a) });
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    /// Cheap content digest used to stamp spectra with their mesh.
    pub fn id(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        let mut mix = |v: u64| {
            h ^= v;
            h = h.wrapping_mul(0x100000001b3);
        };
        mix(self.vertices.len() as u64);
        mix(self.triangles.len() as u64);
        mix(self.boundary_edges.len() as u64);
        mix(self.h.to_bits());
        if let Some(v) = self.vertices.last() {
            mix(v.x.to_bits());
            mix(v.y.to_bits());
        }
        h
    }
}

/// Interior/boundary split of the mesh vertices; `robin` lists the vertices
/// carrying the boundary measure (the tag set Gamma).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofMap {
    pub interior: Vec<usize>,
    pub boundary: Vec<usize>,
    pub robin: Vec<usize>,
    pub is_boundary: Vec<bool>,
}

pub fn extract_dofmap(mesh: &TriMesh, gamma_tags: &[BoundaryTag]) -> DofMap {
    let n = mesh.num_vertices();
    let mut is_boundary = vec![false; n];
    let mut is_robin = vec![false; n];
    for e in &mesh.boundary_edges {
        is_boundary[e.a] = true;
        is_boundary[e.b] = true;
        if gamma_tags.contains(&e.tag) {
            is_robin[e.a] = true;
            is_robin[e.b] = true;
        }
    }
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    let mut robin = Vec::new();
    for v in 0..n {
        if is_boundary[v] {
            boundary.push(v);
            if is_robin[v] {
                robin.push(v);
            }
        } else {
            interior.push(v);
        }
    }
    DofMap {
        interior,
        boundary,
        robin,
        is_boundary,
    }
}

// Integer description of a polyomino boundary: per vertical line x = const,
// the covered y-spans with their tag, and likewise per horizontal line.
struct IntBoundary {
    vertical: BTreeMap<i64, Vec<(i64, i64, BoundaryTag)>>,
    horizontal: BTreeMap<i64, Vec<(i64, i64, BoundaryTag)>>,
}

impl IntBoundary {
    fn tag_of(&self, a: (i64, i64), b: (i64, i64)) -> Option<BoundaryTag> {
        if a.0 == b.0 {
            let (ylo, yhi) = if a.1 < b.1 { (a.1, b.1) } else { (b.1, a.1) };
            self.vertical.get(&a.0).and_then(|spans| {
                spans
                    .iter()
                    .find(|&&(lo, hi, _)| lo <= ylo && yhi <= hi)
                    .map(|&(_, _, t)| t)
            })
        } else {
            let (xlo, xhi) = if a.0 < b.0 { (a.0, b.0) } else { (b.0, a.0) };
            self.horizontal.get(&a.1).and_then(|spans| {
                spans
                    .iter()
                    .find(|&&(lo, hi, _)| lo <= xlo && xhi <= hi)
                    .map(|&(_, _, t)| t)
            })
        }
    }
}

/// Triangulate a polyomino domain on the grid of pitch
/// `base_pitch / 2^refinement`, where `base_pitch` is the length of the
/// shortest polygon edge. Cells are classified by their center (exact for
/// polyominoes), each inside cell is split along its SW-NE diagonal, and
/// boundary edges keep the tag of the polygon side they lie on.
pub fn mesh_polyomino(domain: &DomainPolygon, refinement: u32) -> Result<TriMesh> {
    if refinement > MAX_REFINEMENT {
        return Err(Error::Capacity(format!(
            "refinement {refinement} exceeds the cap {MAX_REFINEMENT}"
        )));
    }
    let nv = domain.vertices.len();
    if nv < 4 {
        return Err(Error::Geometry("polygon too small".to_string()));
    }
    let fr = &domain.fractal_side_range;
    if fr.start != 0 || fr.end < 2 || fr.end > nv {
        return Err(Error::Geometry("malformed fractal_side_range".to_string()));
    }

    // Base pitch: shortest edge length; every vertex must sit on that grid
    // and every edge must be axis-aligned.
    let mut base = f64::INFINITY;
    for i in 0..nv {
        let a = domain.vertices[i];
        let b = domain.vertices[(i + 1) % nv];
        if a.x != b.x && a.y != b.y {
            return Err(Error::Geometry(format!("edge {i} is not axis-aligned")));
        }
        let len = a.dist(b);
        if len <= 0.0 {
            return Err(Error::Geometry(format!("degenerate edge {i}")));
        }
        base = base.min(len);
    }
    // Integer grid anchored at the polygon's bounding-box corner.
    let (glo, _) = domain.bbox();
    let to_int = |x: f64, o: f64| -> Result<i64> {
        let s = (x - o) / base;
        let r = libm::round(s);
        if (s - r).abs() > 1e-9 {
            Err(Error::Geometry(format!(
                "vertex coordinate {x} is off the pitch-{base} grid"
            )))
        } else {
            Ok(r as i64)
        }
    };
    let ivert: Vec<(i64, i64)> = domain
        .vertices
        .iter()
        .map(|v| Ok((to_int(v.x, glo.x)?, to_int(v.y, glo.y)?)))
        .collect::<Result<_>>()?;

    // Tagged boundary spans on the coarse integer grid. Sides after the
    // fractal chain are: adjacent (lateral), opposite (top), adjacent.
    let mut boundary = IntBoundary {
        vertical: BTreeMap::new(),
        horizontal: BTreeMap::new(),
    };
    for i in 0..nv {
        let a = ivert[i];
        let b = ivert[(i + 1) % nv];
        let tag = if i + 1 < fr.end {
            BoundaryTag::Fractal
        } else if i + 1 == fr.end + 1 {
            BoundaryTag::Top
        } else {
            BoundaryTag::Lateral
        };
        if a.0 == b.0 {
            let (lo, hi) = if a.1 < b.1 { (a.1, b.1) } else { (b.1, a.1) };
            boundary
                .vertical
                .entry(a.0)
                .or_default()
                .push((lo, hi, tag));
        } else if a.1 == b.1 {
            let (lo, hi) = if a.0 < b.0 { (a.0, b.0) } else { (b.0, a.0) };
            boundary
                .horizontal
                .entry(a.1)
                .or_default()
                .push((lo, hi, tag));
        } else {
            return Err(Error::Geometry(format!("edge {i} is not axis-aligned")));
        }
    }

    // Coarse bounding box.
    let (bx0, bx1) = ivert.iter().fold((i64::MAX, i64::MIN), |(lo, hi), v| {
        (lo.min(v.0), hi.max(v.0))
    });
    let (by0, by1) = ivert.iter().fold((i64::MAX, i64::MIN), |(lo, hi), v| {
        (lo.min(v.1), hi.max(v.1))
    });
    let ncx = (bx1 - bx0) as usize;
    let ncy = (by1 - by0) as usize;
    if ncx == 0 || ncy == 0 {
        return Err(Error::Geometry("polygon has no interior".to_string()));
    }

    // Classify coarse cells by even-odd parity against the vertical spans.
    let mut inside = vec![false; ncx * ncy];
    let mut n_inside = 0usize;
    for cy in 0..ncy {
        let yc = by0 + cy as i64; // cell [yc, yc+1); parity at its center
        let mut crossings: Vec<i64> = Vec::new();
        for (&x, spans) in &boundary.vertical {
            for &(lo, hi, _) in spans {
                if lo <= yc && yc < hi {
                    crossings.push(x);
                }
            }
        }
        crossings.sort_unstable();
        for pair in crossings.chunks_exact(2) {
            for x in pair[0]..pair[1] {
                let cx = (x - bx0) as usize;
                inside[cy * ncx + cx] = true;
                n_inside += 1;
            }
        }
    }

    let m = 1usize << refinement; // fine cells per coarse cell side
    if n_inside * m * m > MAX_CELLS {
        return Err(Error::Capacity(format!(
            "mesh would have {} cells (budget {MAX_CELLS})",
            n_inside * m * m
        )));
    }

    // Fine lattice over the coarse bbox; vertices numbered row-major.
    let fnx = ncx * m + 1;
    let fny = ncy * m + 1;
    let h = base / m as f64;
    let origin = Vec2::new(glo.x + bx0 as f64 * base, glo.y + by0 as f64 * base);
    let cell_inside = |fx: i64, fy: i64| -> bool {
        if fx < 0 || fy < 0 {
            return false;
        }
        let (cx, cy) = (fx as usize / m, fy as usize / m);
        cx < ncx && cy < ncy && inside[cy * ncx + cx]
    };

    let mut vidx = vec![-1i64; fnx * fny];
    let mut vertices: Vec<Vec2> = Vec::new();
    for fy in 0..fny as i64 {
        for fx in 0..fnx as i64 {
            let touches = cell_inside(fx, fy)
                || cell_inside(fx - 1, fy)
                || cell_inside(fx, fy - 1)
                || cell_inside(fx - 1, fy - 1);
            if touches {
                vidx[fy as usize * fnx + fx as usize] = vertices.len() as i64;
                vertices.push(Vec2::new(
                    origin.x + fx as f64 * h,
                    origin.y + fy as f64 * h,
                ));
            }
        }
    }

    let vat = |fx: i64, fy: i64| -> usize { vidx[fy as usize * fnx + fx as usize] as usize };
    // Fine boundary edge -> tag of the coarse polygon side it lies on.
    let fine_edge_tag = |a: (i64, i64), b: (i64, i64)| -> Result<BoundaryTag> {
        let mi = m as i64;
        let (ca, cb) = if a.0 == b.0 {
            let x = bx0 + a.0.div_euclid(mi);
            let ylo = by0 + a.1.min(b.1).div_euclid(mi);
            ((x, ylo), (x, ylo + 1))
        } else {
            let y = by0 + a.1.div_euclid(mi);
            let xlo = bx0 + a.0.min(b.0).div_euclid(mi);
            ((xlo, y), (xlo + 1, y))
        };
        boundary
            .tag_of(ca, cb)
            .ok_or_else(|| Error::Geometry("boundary edge does not lie on the polygon".to_string()))
    };

    let mut triangles: Vec<[usize; 3]> = Vec::with_capacity(2 * n_inside * m * m);
    let mut boundary_edges: Vec<BoundaryEdge> = Vec::new();
    let mut cell_tri = vec![-1i64; (fnx - 1) * (fny - 1)];

    for fy in 0..(fny - 1) as i64 {
        for fx in 0..(fnx - 1) as i64 {
            if !cell_inside(fx, fy) {
                continue;
            }
            let v00 = vat(fx, fy);
            let v10 = vat(fx + 1, fy);
            let v11 = vat(fx + 1, fy + 1);
            let v01 = vat(fx, fy + 1);
            cell_tri[fy as usize * (fnx - 1) + fx as usize] = triangles.len() as i64;
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);

            if !cell_inside(fx, fy - 1) {
                let tag = fine_edge_tag((fx, fy), (fx + 1, fy))?;
                boundary_edges.push(BoundaryEdge {
                    a: v00,
                    b: v10,
                    tag,
                });
            }
            if !cell_inside(fx + 1, fy) {
                let tag = fine_edge_tag((fx + 1, fy), (fx + 1, fy + 1))?;
                boundary_edges.push(BoundaryEdge {
                    a: v10,
                    b: v11,
                    tag,
                });
            }
            if !cell_inside(fx, fy + 1) {
                let tag = fine_edge_tag((fx, fy + 1), (fx + 1, fy + 1))?;
                boundary_edges.push(BoundaryEdge {
                    a: v11,
                    b: v01,
                    tag,
                });
            }
            if !cell_inside(fx - 1, fy) {
                let tag = fine_edge_tag((fx, fy), (fx, fy + 1))?;
                boundary_edges.push(BoundaryEdge {
                    a: v00,
                    b: v01,
                    tag,
                });
            }
        }
    }

    Ok(TriMesh {
        vertices,
        triangles,
        boundary_edges,
        h,
        grid: Some(StructuredGrid {
            origin,
            pitch: h,
            nx: fnx - 1,
            ny: fny - 1,
            cell_tri,
        }),
    })
}

/// Uniform refinement: each triangle splits into four by edge midpoints;
/// boundary tags are inherited and the pitch halves.
pub fn refine(mesh: &TriMesh) -> TriMesh {
    let mut vertices = mesh.vertices.clone();
    let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut mid = |a: usize, b: usize, vertices: &mut Vec<Vec2>| -> usize {
        let key = if a < b { (a, b) } else { (b, a) };
        *midpoint.entry(key).or_insert_with(|| {
            let p = (vertices[a] + vertices[b]) * 0.5;
            vertices.push(p);
            vertices.len() - 1
        })
    };

    let mut triangles = Vec::with_capacity(mesh.triangles.len() * 4);
    for &[a, b, c] in &mesh.triangles {
        let ab = mid(a, b, &mut vertices);
        let bc = mid(b, c, &mut vertices);
        let ca = mid(c, a, &mut vertices);
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
    }

    let mut boundary_edges = Vec::with_capacity(mesh.boundary_edges.len() * 2);
    for e in &mesh.boundary_edges {
        let m = mid(e.a, e.b, &mut vertices);
        boundary_edges.push(BoundaryEdge {
            a: e.a,
            b: m,
            tag: e.tag,
        });
        boundary_edges.push(BoundaryEdge {
            a: m,
            b: e.b,
            tag: e.tag,
        });
    }

    TriMesh {
        vertices,
        triangles,
        boundary_edges,
        h: mesh.h * 0.5,
        grid: None,
    }
}

/// Structured mesh of the unit disk bounded by a regular `n_boundary`-gon:
/// `rings` concentric vertex rings around a center vertex. Boundary edges
/// are tagged `Fractal` so the full boundary is a single gamma choice.
pub fn mesh_disk(n_boundary: usize, rings: usize) -> Result<TriMesh> {
    if n_boundary < 3 || rings < 1 {
        return Err(Error::InvalidArgument(
            "disk mesh needs n_boundary >= 3 and rings >= 1".to_string(),
        ));
    }
    if n_boundary * rings > MAX_CELLS {
        return Err(Error::Capacity("disk mesh too large".to_string()));
    }
    let n = n_boundary;
    let mut vertices = Vec::with_capacity(1 + n * rings);
    vertices.push(Vec2::new(0.0, 0.0));
    for k in 1..=rings {
        let r = k as f64 / rings as f64;
        for i in 0..n {
            let theta = 2.0 * core::f64::consts::PI * i as f64 / n as f64;
            vertices.push(Vec2::new(r * theta.cos(), r * theta.sin()));
        }
    }
    let ring_vertex = |k: usize, i: usize| -> usize { 1 + (k - 1) * n + (i % n) };

    let mut triangles = Vec::with_capacity(n * (2 * rings - 1));
    for i in 0..n {
        triangles.push([0, ring_vertex(1, i), ring_vertex(1, i + 1)]);
    }
    for k in 1..rings {
        for i in 0..n {
            let a = ring_vertex(k, i);
            let b = ring_vertex(k + 1, i);
            let c = ring_vertex(k + 1, i + 1);
            let d = ring_vertex(k, i + 1);
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }

    let boundary_edges = (0..n)
        .map(|i| BoundaryEdge {
            a: ring_vertex(rings, i),
            b: ring_vertex(rings, i + 1),
            tag: BoundaryTag::Fractal,
        })
        .collect();

    Ok(TriMesh {
        vertices,
        triangles,
        boundary_edges,
        h: (1.0 / rings as f64).max(2.0 * (core::f64::consts::PI / n as f64).sin()),
        grid: None,
    })
}

/// Bucket-grid point locator for arbitrary triangle meshes. Returns the
/// containing triangle and barycentric coordinates.
pub struct PointLocator<'a> {
    mesh: &'a TriMesh,
    lo: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'a> PointLocator<'a> {
    pub fn new(mesh: &'a TriMesh) -> Self {
        let (lo, hi) = mesh.bbox();
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-300);
        let target = ((mesh.num_triangles() as f64).sqrt().ceil() as usize).clamp(1, 1024);
        let cell = span / target as f64;
        let nx = (((hi.x - lo.x) / cell).ceil() as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / cell).ceil() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let mut tlo = Vec2::new(f64::INFINITY, f64::INFINITY);
            let mut thi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
            for &v in tri {
                let p = mesh.vertices[v];
                tlo.x = tlo.x.min(p.x);
                tlo.y = tlo.y.min(p.y);
                thi.x = thi.x.max(p.x);
                thi.y = thi.y.max(p.y);
            }
            let x0 = (((tlo.x - lo.x) / cell).floor() as isize).clamp(0, nx as isize - 1);
            let x1 = (((thi.x - lo.x) / cell).floor() as isize).clamp(0, nx as isize - 1);
            let y0 = (((tlo.y - lo.y) / cell).floor() as isize).clamp(0, ny as isize - 1);
            let y1 = (((thi.y - lo.y) / cell).floor() as isize).clamp(0, ny as isize - 1);
            for gy in y0..=y1 {
                for gx in x0..=x1 {
                    buckets[gy as usize * nx + gx as usize].push(t as u32);
                }
            }
        }
        Self {
            mesh,
            lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    pub fn locate(&self, p: Vec2) -> Option<(usize, [f64; 3])> {
        let gx = (((p.x - self.lo.x) / self.cell).floor() as isize).clamp(0, self.nx as isize - 1);
        let gy = (((p.y - self.lo.y) / self.cell).floor() as isize).clamp(0, self.ny as isize - 1);
        for &t in &self.buckets[gy as usize * self.nx + gx as usize] {
            let [a, b, c] = self.mesh.triangles[t as usize];
            let (pa, pb, pc) = (
                self.mesh.vertices[a],
                self.mesh.vertices[b],
                self.mesh.vertices[c],
            );
            let det = (pb.x - pa.x) * (pc.y - pa.y) - (pc.x - pa.x) * (pb.y - pa.y);
            if det == 0.0 {
                continue;
            }
            let l1 = ((pb.x - p.x) * (pc.y - p.y) - (pc.x - p.x) * (pb.y - p.y)) / det;
            let l2 = ((pc.x - p.x) * (pa.y - p.y) - (pa.x - p.x) * (pc.y - p.y)) / det;
            let l3 = 1.0 - l1 - l2;
            let eps = -1e-12;
            if l1 >= eps && l2 >= eps && l3 >= eps {
                return Some((t as usize, [l1, l2, l3]));
            }
        }
        None
    }

    /// P1 interpolation of a nodal field at `p`; `None` outside the mesh.
    pub fn interpolate(&self, field: &[f64], p: Vec2) -> Option<f64> {
        let (t, bary) = self.locate(p)?;
        let [a, b, c] = self.mesh.triangles[t];
        Some(bary[0] * field[a] + bary[1] * field[b] + bary[2] * field[c])
    }
}
