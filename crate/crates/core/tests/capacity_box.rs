//! Spec-scale capacity check: disk of radius 0.1 centered in a 4x4 box at
//! h = 1/64, stable within 5% under one refinement. The refined solve
//! (~263k dofs) exercises the CG fallback.

use steklov_core::geometry::{PrefractalSpec, Vec2};
use steklov_core::measure::capacity_estimate;
use steklov_core::mesh::{mesh_polyomino, refine, TriMesh};

fn disk_nodes(mesh: &TriMesh, center: Vec2, radius: f64) -> Vec<usize> {
    mesh.vertices
        .iter()
        .enumerate()
        .filter(|(_, p)| p.dist(center) <= radius)
        .map(|(i, _)| i)
        .collect()
}

#[test]
fn capacity_disk_in_4x4_box_refinement_stable() {
    let spec = PrefractalSpec::minkowski(0)
        .with_base_length(4.0)
        .with_anchor(Vec2::new(-2.0, -2.0));
    let domain = steklov_core::geometry::build_domain(&spec).unwrap();
    // base pitch 4, so r = 8 gives h = 4/256 = 1/64.
    let coarse = mesh_polyomino(&domain, 8).unwrap();
    assert!((coarse.h - 1.0 / 64.0).abs() < 1e-12);
    let fine = refine(&coarse);
    let center = Vec2::new(0.0, 0.0);
    let cap_coarse = capacity_estimate(&coarse, &disk_nodes(&coarse, center, 0.1)).unwrap();
    let cap_fine = capacity_estimate(&fine, &disk_nodes(&fine, center, 0.1)).unwrap();
    assert!(cap_coarse > 0.0);
    let rel = (cap_fine - cap_coarse).abs() / cap_coarse;
    assert!(
        rel < 0.05,
        "capacity drift {rel:.4} ({cap_coarse} -> {cap_fine})"
    );
}
