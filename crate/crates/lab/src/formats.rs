//! Versioned file formats: geometry/mesh/measure JSON documents, spectra
//! CSV, VTK legacy unstructured grids, PGM heatmaps and Matrix Market dumps.
//!
//! Every file embeds or references the config hash of the run that produced
//! it (JSON field, VTK title, `#`/`%` comment lines).

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use steklov_core::dense::DenseMat;
use steklov_core::fem::Field;
use steklov_core::geometry::{DomainPolygon, PolyChain, Vec2};
use steklov_core::measure::{BoundaryMeasure, MeasureKind, RegularityReport};
use steklov_core::mesh::{BoundaryTag, PointLocator, TriMesh};
use steklov_core::sparse::SparseSym;
use steklov_core::spectral::Spectrum;

use crate::CliResult;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

// ---------------------------------------------------------------- geometry

#[derive(Debug, Serialize, Deserialize)]
pub struct CurveDoc {
    pub version: u32,
    pub kind: String,
    pub vertices: Vec<[f64; 2]>,
    pub closed: bool,
    #[serde(default)]
    pub meta: serde_json::Map<String, Value>,
}

pub fn chain_doc(chain: &PolyChain, config_hash: &str) -> CurveDoc {
    let mut meta = serde_json::Map::new();
    meta.insert("config".into(), json!(config_hash));
    meta.insert("length".into(), json!(chain.length()));
    CurveDoc {
        version: 1,
        kind: "polychain".into(),
        vertices: chain.vertices.iter().map(|v| [v.x, v.y]).collect(),
        closed: chain.closed,
        meta,
    }
}

pub fn polygon_doc(domain: &DomainPolygon, config_hash: &str) -> CurveDoc {
    let mut meta = serde_json::Map::new();
    meta.insert("config".into(), json!(config_hash));
    meta.insert("area".into(), json!(domain.area));
    meta.insert(
        "fractal_side_range".into(),
        json!([
            domain.fractal_side_range.start,
            domain.fractal_side_range.end
        ]),
    );
    CurveDoc {
        version: 1,
        kind: "polygon".into(),
        vertices: domain.vertices.iter().map(|v| [v.x, v.y]).collect(),
        closed: true,
        meta,
    }
}

pub fn read_curve(path: &Path) -> CliResult<CurveDoc> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| crate::CliError::Usage(format!("bad curve document {path:?}: {e}")))
}

impl CurveDoc {
    pub fn to_chain(&self) -> PolyChain {
        PolyChain {
            vertices: self
                .vertices
                .iter()
                .map(|&[x, y]| Vec2::new(x, y))
                .collect(),
            closed: self.closed,
        }
    }
}

// -------------------------------------------------------------------- mesh

pub fn mesh_doc(mesh: &TriMesh, config_hash: &str) -> Value {
    let tag_name = |t: BoundaryTag| match t {
        BoundaryTag::Fractal => "fractal",
        BoundaryTag::Lateral => "lateral",
        BoundaryTag::Top => "top",
    };
    json!({
        "version": 1,
        "vertices": mesh.vertices.iter().map(|v| [v.x, v.y]).collect::<Vec<_>>(),
        "triangles": mesh.triangles,
        "boundary": mesh
            .boundary_edges
            .iter()
            .map(|e| json!([e.a, e.b, tag_name(e.tag)]))
            .collect::<Vec<_>>(),
        "h": mesh.h,
        "config": config_hash,
    })
}

/// VTK legacy ASCII UNSTRUCTURED_GRID with optional point scalars.
/// The timestamp in the title is suppressed under deterministic mode.
pub fn write_vtk(
    path: &Path,
    mesh: &TriMesh,
    fields: &[(String, Vec<f64>)],
    config_hash: &str,
    deterministic: bool,
) -> CliResult<()> {
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    if deterministic {
        out.push_str(&format!("steklov-lab config={config_hash}\n"));
    } else {
        let t = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        out.push_str(&format!("steklov-lab config={config_hash} t={t}\n"));
    }
    out.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    out.push_str(&format!("POINTS {} double\n", mesh.num_vertices()));
    for v in &mesh.vertices {
        out.push_str(&format!("{} {} 0\n", v.x, v.y));
    }
    let t = mesh.num_triangles();
    out.push_str(&format!("CELLS {t} {}\n", 4 * t));
    for tri in &mesh.triangles {
        out.push_str(&format!("3 {} {} {}\n", tri[0], tri[1], tri[2]));
    }
    out.push_str(&format!("CELL_TYPES {t}\n"));
    for _ in 0..t {
        out.push_str("5\n");
    }
    if !fields.is_empty() {
        out.push_str(&format!("POINT_DATA {}\n", mesh.num_vertices()));
        for (name, values) in fields {
            out.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
            for v in values {
                out.push_str(&format!("{v}\n"));
            }
        }
    }
    fs::write(path, out)?;
    Ok(())
}

// ----------------------------------------------------------------- spectra

/// CSV with header `index,eigenvalue,residual`; a `#` comment line carries
/// the config hash.
pub fn spectrum_csv(spec: &Spectrum, config_hash: &str) -> String {
    let mut out = format!("# config {config_hash}\nindex,eigenvalue,residual\n");
    for (i, (ev, res)) in spec
        .eigenvalues
        .iter()
        .zip(&spec.residual_norms)
        .enumerate()
    {
        out.push_str(&format!("{i},{ev},{res:e}\n"));
    }
    out
}

pub fn write_spectrum_csv(path: &Path, spec: &Spectrum, config_hash: &str) -> CliResult<()> {
    fs::write(path, spectrum_csv(spec, config_hash))?;
    Ok(())
}

// --------------------------------------------------------------- heatmaps

/// 8-bit binary PGM of a nodal field's modulus, max-normalized, sampled on
/// a `size x size` pixel grid over the mesh bounding box (0 outside the
/// domain). Row 0 is the top of the bounding box.
pub fn write_pgm(
    path: &Path,
    mesh: &TriMesh,
    locator: &PointLocator<'_>,
    field: &Field,
    size: usize,
    config_hash: &str,
) -> CliResult<()> {
    let magnitude = field.magnitude();
    let (lo, hi) = mesh.bbox();
    let w = size.max(1);
    let h = size.max(1);
    let dx = (hi.x - lo.x) / w as f64;
    let dy = (hi.y - lo.y) / h as f64;
    let mut samples = vec![0.0f64; w * h];
    let mut vmax = 0.0f64;
    for row in 0..h {
        let y = hi.y - (row as f64 + 0.5) * dy;
        for col in 0..w {
            let x = lo.x + (col as f64 + 0.5) * dx;
            if let Some(v) = locator.interpolate(&magnitude, Vec2::new(x, y)) {
                samples[row * w + col] = v;
                vmax = vmax.max(v);
            }
        }
    }
    let scale = if vmax > 0.0 { 255.0 / vmax } else { 0.0 };
    let mut bytes: Vec<u8> = Vec::with_capacity(w * h + 64);
    bytes.extend_from_slice(format!("P5\n# config {config_hash}\n{w} {h}\n255\n").as_bytes());
    for s in &samples {
        bytes.push(libm_round_clamp(*s * scale));
    }
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

fn libm_round_clamp(v: f64) -> u8 {
    let r = v.round();
    if r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}

// ------------------------------------------------------------ matrix market

/// Dense symmetric matrix in Matrix Market coordinate format (lower
/// triangle, 1-based).
pub fn write_matrix_market_dense(path: &Path, m: &DenseMat, config_hash: &str) -> CliResult<()> {
    let n = m.nrows;
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..=i {
            let v = m.get(i, j);
            if v != 0.0 {
                entries.push((i + 1, j + 1, v));
            }
        }
    }
    let mut out = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    out.push_str(&format!(
        "% config {config_hash}\n{n} {n} {}\n",
        entries.len()
    ));
    for (i, j, v) in entries {
        out.push_str(&format!("{i} {j} {v}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Sparse symmetric matrix in Matrix Market coordinate format.
pub fn write_matrix_market_sparse(path: &Path, m: &SparseSym, config_hash: &str) -> CliResult<()> {
    let n = m.n();
    let mut entries: Vec<(usize, usize, f64)> = m
        .upper_entries()
        .map(|(i, j, v)| (j + 1, i + 1, v)) // lower triangle convention
        .collect();
    entries.sort_by_key(|&(i, j, _)| (i, j));
    let mut out = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    out.push_str(&format!(
        "% config {config_hash}\n{n} {n} {}\n",
        entries.len()
    ));
    for (i, j, v) in entries {
        out.push_str(&format!("{i} {j} {v}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Complex symmetric dense matrix in Matrix Market coordinate format.
pub fn write_matrix_market_dense_complex(
    path: &Path,
    n: usize,
    get: impl Fn(usize, usize) -> (f64, f64),
    config_hash: &str,
) -> CliResult<()> {
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..=i {
            let (re, im) = get(i, j);
            if re != 0.0 || im != 0.0 {
                entries.push((i + 1, j + 1, re, im));
            }
        }
    }
    let mut out = String::from("%%MatrixMarket matrix coordinate complex symmetric\n");
    out.push_str(&format!(
        "% config {config_hash}\n{n} {n} {}\n",
        entries.len()
    ));
    for (i, j, re, im) in entries {
        out.push_str(&format!("{i} {j} {re} {im}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

// ----------------------------------------------------------------- measure

pub fn measure_doc(m: &BoundaryMeasure, config_hash: &str) -> Value {
    let kind = match m.kind {
        MeasureKind::Arclength => "arclength",
        MeasureKind::SelfSimilar => "selfsimilar",
    };
    // Edge endpoints as mesh vertex ids when available, local ids otherwise.
    let edges: Vec<Value> = m
        .edges
        .iter()
        .zip(&m.weights)
        .map(|(e, w)| match &m.mesh_vertices {
            Some(ids) => json!([ids[e[0]], ids[e[1]], w]),
            None => json!([e[0], e[1], w]),
        })
        .collect();
    json!({
        "version": 1,
        "kind": kind,
        "d": m.d,
        "edges": edges,
        "total": m.total_mass,
        "config": config_hash,
    })
}

pub fn regularity_doc(r: &RegularityReport, kind: MeasureKind, config_hash: &str) -> Value {
    json!({
        "version": 1,
        "kind": match kind {
            MeasureKind::Arclength => "arclength",
            MeasureKind::SelfSimilar => "selfsimilar",
        },
        "d": r.d,
        "c_d": r.c_d,
        "worst_case": { "x": r.worst_center.x, "y": r.worst_center.y, "r": r.worst_radius },
        "per_radius": r.per_radius.iter().map(|&(rad, c)| json!([rad, c])).collect::<Vec<_>>(),
        "outside_trace_regime": r.outside_trace_regime,
        "config": config_hash,
    })
}
