//! End-to-end CLI checks: exit-code contract, file schemas, determinism.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_steklov-lab"))
}

#[test]
fn geometry_domain_gen0_is_square() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("square.json");
    let status = bin()
        .args(["geometry", "--gen", "0", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["kind"], "polygon");
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 4);
    assert!((doc["meta"]["area"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn geometry_chain_gen3_segment_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chain.json");
    let status = bin()
        .args(["geometry", "--gen", "3", "--shape", "chain", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["kind"], "polychain");
    // 512 segments = 513 vertices.
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 513);
}

#[test]
fn geometry_generation_cap_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.json");
    let output = bin()
        .args(["geometry", "--gen", "99", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&output.stderr);
    assert!(msg.contains("capacity"), "stderr: {msg}");
    assert!(!out.exists());
}

#[test]
fn usage_error_exits_2() {
    let output = bin().args(["solve", "--bc", "nonsense"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn solve_neumann_first_eigenvalue_zero() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "solve",
            "--bc",
            "neumann",
            "--gen",
            "0",
            "--refine",
            "4",
            "--eigs",
            "1",
            "--no-pgm",
            "--no-vtk",
            "--deterministic",
            "--out-dir",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let first = csv.lines().nth(2).unwrap();
    let ev: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
    assert!(ev.abs() < 1e-8, "lambda0 = {ev}");
}

#[test]
fn solve_robin_emits_requested_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "solve",
            "--bc",
            "robin",
            "--alpha",
            "0.1",
            "--gen",
            "1",
            "--refine",
            "1",
            "--eigs",
            "6",
            "--pgm-size",
            "48",
            "--dump-mesh",
            "--dump-operators",
            "--deterministic",
            "--out-dir",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let mesh: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("mesh.json")).unwrap())
            .unwrap();
    assert_eq!(mesh["version"], 1);
    assert!((mesh["h"].as_f64().unwrap() - 0.125).abs() < 1e-15);
    assert!(mesh["boundary"][0][2].is_string());
    let mtx = std::fs::read_to_string(dir.path().join("stiffness.mtx")).unwrap();
    assert!(mtx.starts_with("%%MatrixMarket matrix coordinate real symmetric"));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 6);
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("index,eigenvalue,residual"));
    for i in 0..6 {
        let p = dir.path().join(format!("mode_{i:03}.pgm"));
        let bytes = std::fs::read(&p).unwrap();
        assert!(bytes.starts_with(b"P5\n"), "bad magic in {p:?}");
    }
    let vtk = std::fs::read_to_string(dir.path().join("modes.vtk")).unwrap();
    assert!(vtk.contains("UNSTRUCTURED_GRID"));
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap())
            .unwrap();
    assert!(record["config_hash"].is_string());
    assert!(record.get("timings_ms").is_none());
}

#[test]
fn dtn_spectral_exclusion_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // k = -25 lies beyond the first interior Dirichlet eigenvalue (2 pi^2),
    // so the k-harmonic extension step must refuse it.
    let output = bin()
        .args([
            "dtn",
            "--shape",
            "minkowski",
            "--gen",
            "0",
            "--refine",
            "4",
            "--k",
            "-25",
            "--eigs",
            "3",
            "--deterministic",
            "--out-dir",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let msg = String::from_utf8_lossy(&output.stderr);
    assert!(msg.contains("spectral exclusion"), "stderr: {msg}");
}

#[test]
fn dtn_dump_matrix_market() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "dtn",
            "--shape",
            "minkowski",
            "--gen",
            "1",
            "--refine",
            "0",
            "--k",
            "1",
            "--eigs",
            "3",
            "--dump-matrix",
            "--deterministic",
            "--out-dir",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let mtx = std::fs::read_to_string(dir.path().join("steklov.mtx")).unwrap();
    assert!(mtx.starts_with("%%MatrixMarket matrix coordinate real symmetric"));
    let cmtx = std::fs::read_to_string(dir.path().join("resolvent.mtx")).unwrap();
    assert!(cmtx.starts_with("%%MatrixMarket matrix coordinate complex symmetric"));
}

#[test]
fn measure_selfsimilar_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reg.json");
    let mout = dir.path().join("measure.json");
    let status = bin()
        .args([
            "measure",
            "--kind",
            "selfsimilar",
            "--gen",
            "3",
            "--d",
            "1.5",
            "--out",
        ])
        .arg(&out)
        .arg("--out-measure")
        .arg(&mout)
        .status()
        .unwrap();
    assert!(status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(doc["c_d"].as_f64().unwrap().is_finite());
    assert_eq!(doc["d"], 1.5);
    assert_eq!(doc["outside_trace_regime"], false);
    let mdoc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&mout).unwrap()).unwrap();
    assert_eq!(mdoc["kind"], "selfsimilar");
    assert_eq!(mdoc["edges"].as_array().unwrap().len(), 512);
    assert!((mdoc["total"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn env_var_thread_cap_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "solve",
            "--bc",
            "neumann",
            "--gen",
            "0",
            "--refine",
            "2",
            "--eigs",
            "1",
            "--no-pgm",
            "--no-vtk",
            "--deterministic",
            "--out-dir",
        ])
        .arg(dir.path())
        .env("STEKLOV_LAB_THREADS", "3")
        .status()
        .unwrap();
    assert!(status.success());
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap())
            .unwrap();
    assert_eq!(record["threads"], 3);
}

fn read_dir_sorted(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

#[test]
fn converge_deterministic_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let status = bin()
            .args([
                "converge",
                "--gens",
                "1:2",
                "--alpha",
                "0.1",
                "--measure",
                "arclength",
                "--gamma",
                "full",
                "--target-h",
                "0.0625",
                "--eigs",
                "5",
                "--sample-grid",
                "32",
                "--deterministic",
                "--out-dir",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let files_a = read_dir_sorted(&a);
    let files_b = read_dir_sorted(&b);
    assert_eq!(files_a.len(), files_b.len());
    assert!(files_a.iter().any(|p| p.ends_with("report.json")));
    for (pa, pb) in files_a.iter().zip(&files_b) {
        assert_eq!(pa.file_name(), pb.file_name());
        let ba = std::fs::read(pa).unwrap();
        let bb = std::fs::read(pb).unwrap();
        assert_eq!(ba, bb, "{:?} differs", pa.file_name());
    }
}
