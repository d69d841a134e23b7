//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see the lines for passing criteria as well).

use std::time::Instant;

use steklov_core::analysis::{
    convergence_study, spectral_hausdorff, GammaChoice, StudyConfig, TEST_POLYNOMIALS,
};
use steklov_core::fem::{assemble, trace_norm, OperatorSet};
use steklov_core::geometry::{
    build_domain, generate_minkowski, hausdorff_distance, symmetric_difference_area, PrefractalSpec,
};
use steklov_core::measure::{
    arclength_measure, boundary_integral, check_upper_regularity, selfsimilar_measure_on_chain,
    CenterRule,
};
use steklov_core::mesh::{mesh_disk, mesh_polyomino, BoundaryTag, TriMesh, ALL_TAGS};
use steklov_core::rng::SplitMix64;
use steklov_core::spectral::{
    apply_dtn, build_steklov, dirichlet_spectrum, resolvent_check, robin_spectrum,
    steklov_min_singular_value, steklov_spectrum, DEFAULT_SEED,
};

use steklov_lab::report::{reference_comparison, REFERENCE_EIGENVALUES};

fn pass(id: u32, name: &str, details: &str) {
    println!("criterion {id:02} ({name}): PASS - {details}");
}

macro_rules! check {
    ($id:expr, $name:expr, $cond:expr, $($msg:tt)*) => {
        assert!($cond, "criterion {:02} ({}): FAIL - {}", $id, $name, format!($($msg)*));
    };
}

/// Modified Bessel function of the first kind by its power series
/// (independent oracle for every disk-based check).
fn bessel_i(m: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    for j in 1..=m as usize {
        term *= half / j as f64;
    }
    let mut sum = term;
    for j in 1..60 {
        term *= half * half / (j as f64 * (j as f64 + m as f64));
        sum += term;
    }
    sum
}

fn square_ops(refine: u32) -> OperatorSet {
    let domain = build_domain(&PrefractalSpec::minkowski(0)).unwrap();
    let mesh = mesh_polyomino(&domain, refine).unwrap();
    let m = arclength_measure(&mesh, &ALL_TAGS).unwrap();
    assemble(&mesh, &m).unwrap()
}

/// Generation-g mesh at pitch 1/64 (refinement chosen per generation).
fn gen_ops_h64(g: u32) -> OperatorSet {
    let domain = build_domain(&PrefractalSpec::minkowski(g)).unwrap();
    let r = 6 - 2 * g.min(3);
    let mesh = mesh_polyomino(&domain, r).unwrap();
    assert!((mesh.h - 1.0 / 64.0).abs() < 1e-15);
    let m = arclength_measure(&mesh, &ALL_TAGS).unwrap();
    assemble(&mesh, &m).unwrap()
}

fn disk_ops(n: usize, rings: usize) -> (TriMesh, OperatorSet) {
    let mesh = mesh_disk(n, rings).unwrap();
    let m = arclength_measure(&mesh, &[BoundaryTag::Fractal]).unwrap();
    let ops = assemble(&mesh, &m).unwrap();
    (mesh, ops)
}

#[test]
fn criterion_01_dirichlet_square_spectrum() {
    let name = "analytic Dirichlet spectrum";
    let t0 = Instant::now();
    let pi2 = std::f64::consts::PI.powi(2);
    let exact = [2.0 * pi2, 5.0 * pi2, 5.0 * pi2, 8.0 * pi2, 10.0 * pi2];

    let ops = square_ops(6); // h = 1/64
    let spec = dirichlet_spectrum(&ops, 5).unwrap();
    for (i, (&got, &want)) in spec.eigenvalues.iter().zip(&exact).enumerate() {
        let rel = (got - want).abs() / want;
        check!(
            1,
            name,
            rel < 0.01,
            "mode {i}: {got} vs {want} (rel {rel:.2e})"
        );
    }
    // O(h^2): per-mode error ratio between refinements 5 and 6 in [3.5, 4.5].
    let coarse = dirichlet_spectrum(&square_ops(5), 5).unwrap();
    for i in 0..5 {
        let e_c = (coarse.eigenvalues[i] - exact[i]).abs();
        let e_f = (spec.eigenvalues[i] - exact[i]).abs();
        let ratio = e_c / e_f;
        check!(
            1,
            name,
            (3.5..=4.5).contains(&ratio),
            "mode {i}: ratio {ratio:.3}"
        );
    }
    let dt = t0.elapsed().as_secs_f64();
    check!(1, name, dt <= 60.0, "runtime {dt:.1}s > 60s");
    pass(
        1,
        name,
        &format!(
            "first five within 1% of pi^2*(2,5,5,8,10); refinement ratios in [3.5,4.5]; {dt:.1}s"
        ),
    );
}

#[test]
fn criterion_02_neumann_kernel() {
    let name = "Neumann kernel";
    let ops = square_ops(6);
    let spec = robin_spectrum(&ops, 0.0, 2).unwrap();
    let l0 = spec.eigenvalues[0].abs();
    check!(2, name, l0 <= 1e-8, "lambda0 = {l0:.3e}");
    let v = &spec.eigenvectors.as_ref().unwrap()[0];
    let n = v.len() as f64;
    let sum: f64 = v.iter().sum();
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let cosine = sum.abs() / (norm * n.sqrt());
    check!(2, name, cosine >= 1.0 - 1e-8, "cosine similarity {cosine}");
    pass(
        2,
        name,
        &format!("lambda0 = {l0:.2e}, cosine to constants = {cosine:.12}"),
    );
}

#[test]
fn criterion_03_disk_dtn_oracle() {
    let name = "DtN Bessel oracle";
    let t0 = Instant::now();
    // Oracle first: lowest eigenvalue I1/I0, then I_m'(1)/I_m(1) twice
    // (I_m' = (I_{m-1} + I_{m+1}) / 2).
    let l0 = bessel_i(1, 1.0) / bessel_i(0, 1.0);
    let l1 = 0.5 * (bessel_i(0, 1.0) + bessel_i(2, 1.0)) / bessel_i(1, 1.0);
    let l2 = 0.5 * (bessel_i(1, 1.0) + bessel_i(3, 1.0)) / bessel_i(2, 1.0);

    let (_, ops) = disk_ops(256, 64);
    let st = build_steklov(&ops, 1.0).unwrap();
    let spec = steklov_spectrum(&st, 5).unwrap();
    let within = |got: f64, want: f64| (got - want).abs() <= 0.02 * want;
    check!(
        3,
        name,
        within(spec.eigenvalues[0], l0),
        "lambda0 {} vs {l0}",
        spec.eigenvalues[0]
    );
    for idx in [1usize, 2] {
        check!(
            3,
            name,
            within(spec.eigenvalues[idx], l1),
            "mode {idx} {} vs {l1}",
            spec.eigenvalues[idx]
        );
    }
    for idx in [3usize, 4] {
        check!(
            3,
            name,
            within(spec.eigenvalues[idx], l2),
            "mode {idx} {} vs {l2}",
            spec.eigenvalues[idx]
        );
    }
    let dt = t0.elapsed().as_secs_f64();
    check!(3, name, dt <= 120.0, "runtime {dt:.1}s > 120s");
    pass(
        3,
        name,
        &format!(
            "lambda0 = {:.6} (I1/I0 = {l0:.6}); degenerate pairs at {:.5}/{:.5}; {dt:.1}s",
            spec.eigenvalues[0], spec.eigenvalues[1], spec.eigenvalues[3]
        ),
    );
}

#[test]
fn criterion_04_resolvent_identity() {
    let name = "resolvent identity";
    let mut rng = SplitMix64::new(DEFAULT_SEED ^ 0x04);
    let mut worst = 0.0f64;
    for g in 0..=3u32 {
        let ops = gen_ops_h64(g);
        for &k in &[0.5, 1.0, 2.0] {
            let st = build_steklov(&ops, k).unwrap();
            let ng = st.gamma.len();
            for &s in &[0.1, 1.0, 10.0] {
                for _ in 0..5 {
                    let h: Vec<f64> = (0..ng).map(|_| rng.next_symmetric()).collect();
                    let err = resolvent_check(&st, &ops, s, &h).unwrap();
                    worst = worst.max(err);
                    check!(4, name, err <= 1e-8, "g={g} k={k} s={s}: rel err {err:.3e}");
                }
            }
        }
    }
    pass(
        4,
        name,
        &format!("max relative gap {worst:.3e} over g=0..3, k in {{0.5,1,2}}, s in {{0.1,1,10}}"),
    );
}

#[test]
fn criterion_05_two_route_dtn() {
    let name = "two-route DtN equivalence";
    let mut rng = SplitMix64::new(DEFAULT_SEED ^ 0x05);
    let mut worst = 0.0f64;
    for g in 0..=2u32 {
        let ops = gen_ops_h64(g);
        let st = build_steklov(&ops, 1.0).unwrap();
        let ng = st.gamma.len();
        for _ in 0..20 {
            let f: Vec<f64> = (0..ng).map(|_| rng.next_symmetric()).collect();
            let psi_schur = apply_dtn(&st, &f).unwrap();
            let mut f_full = vec![0.0f64; ops.n()];
            for (&dof, &val) in st.gamma.iter().zip(&f) {
                f_full[dof] = val;
            }
            let u = steklov_core::fem::solve_dirichlet(&ops, 1.0, &f_full, None).unwrap();
            let nd = steklov_core::fem::normal_derivative(&ops, &u, 1.0, None).unwrap();
            let psi = nd.psi.unwrap();
            let num: f64 = psi_schur
                .iter()
                .zip(&psi)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let den: f64 = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
            let rel = num / den.max(1e-300);
            worst = worst.max(rel);
            check!(5, name, rel <= 1e-9, "g={g}: relative gap {rel:.3e}");
        }
    }
    pass(
        5,
        name,
        &format!("max relative gap {worst:.3e} over 20 random data, g=0..2"),
    );
}

#[test]
fn criterion_06_symmetry_positivity() {
    let name = "Schur symmetry and positivity";
    let mut min_eig_global = f64::INFINITY;
    let mut dom_count = 0;
    let mut run = |ops: &OperatorSet, label: &str| {
        let st = build_steklov(ops, 1.0).unwrap();
        let asym = st.s.asymmetry();
        let scale = st.s.max_abs();
        check!(
            6,
            name,
            asym <= 1e-12 * scale,
            "{label}: asymmetry {asym:.3e} vs scale {scale:.3e}"
        );
        let spec = steklov_spectrum(&st, 1).unwrap();
        check!(
            6,
            name,
            spec.eigenvalues[0] > 0.0,
            "{label}: min eig {}",
            spec.eigenvalues[0]
        );
        min_eig_global = min_eig_global.min(spec.eigenvalues[0]);
        dom_count += 1;
    };
    for g in 0..=3u32 {
        run(&gen_ops_h64(g), &format!("gen {g}"));
    }
    let (_, disk) = disk_ops(128, 32);
    run(&disk, "disk");
    pass(
        6,
        name,
        &format!("{dom_count} domains at k=1; smallest Steklov eigenvalue {min_eig_global:.5}"),
    );
}

#[test]
fn criterion_07_injectivity_probe() {
    let name = "injectivity probe";
    let pi2 = std::f64::consts::PI.powi(2);
    let ops = square_ops(6); // h = 1/64
                             // k = 0: constants are in the kernel of the DtN pencil.
    let st0 = build_steklov(&ops, 0.0).unwrap();
    let sv0 = steklov_min_singular_value(&st0).unwrap();
    let scale0 = st0.s.max_abs();
    check!(
        7,
        name,
        sv0 <= 1e-8 * scale0,
        "k=0: min sv {sv0:.3e} vs scale {scale0:.3e}"
    );
    // k = -pi^2 (the second Neumann eigenvalue, continuum value).
    let st1 = build_steklov(&ops, -pi2).unwrap();
    let sv1 = steklov_min_singular_value(&st1).unwrap();
    let scale1 = st1.s.max_abs();
    check!(
        7,
        name,
        sv1 <= 1e-2 * scale1,
        "k=-pi^2: min sv {sv1:.3e} vs scale {scale1:.3e}"
    );
    // Away from the Neumann spectrum the pencil is regular.
    let st2 = build_steklov(&ops, -pi2 + 0.5).unwrap();
    let sv2 = steklov_min_singular_value(&st2).unwrap();
    let scale2 = st2.s.max_abs();
    check!(
        7,
        name,
        sv2 >= 1e-3 * scale2,
        "k=-pi^2+0.5: min sv {sv2:.3e} vs scale {scale2:.3e}"
    );
    pass(
        7,
        name,
        &format!(
            "min sv / scale: {:.1e} at k=0, {:.1e} at -pi^2, {:.1e} at -pi^2+0.5",
            sv0 / scale0,
            sv1 / scale1,
            sv2 / scale2
        ),
    );
}

#[test]
fn criterion_08_trace_norm_oracle() {
    let name = "trace norm oracle";
    let expect = (2.0 * std::f64::consts::PI * bessel_i(1, 1.0) / bessel_i(0, 1.0)).sqrt();
    let (_, ops) = disk_ops(256, 64);
    let ones = vec![1.0; ops.n()];
    let t = trace_norm(&ops, &ones).unwrap();
    check!(
        8,
        name,
        (t - expect).abs() <= 0.02 * expect,
        "norm {t} vs {expect}"
    );
    // Exact homogeneity.
    let mut rng = SplitMix64::new(DEFAULT_SEED ^ 0x08);
    let f: Vec<f64> = (0..ops.n()).map(|_| rng.next_symmetric()).collect();
    let t1 = trace_norm(&ops, &f).unwrap();
    let f2: Vec<f64> = f.iter().map(|&x| 2.0 * x).collect();
    let t2 = trace_norm(&ops, &f2).unwrap();
    check!(
        8,
        name,
        (t2 - 2.0 * t1).abs() <= 1e-10 * t1.max(1.0),
        "homogeneity gap {}",
        (t2 - 2.0 * t1).abs()
    );
    pass(
        8,
        name,
        &format!("||1||_B = {t:.5} vs sqrt(2 pi I1/I0) = {expect:.5}; homogeneity exact"),
    );
}

#[test]
fn criterion_09_measure_regularity() {
    let name = "measure regularity";
    // Self-similar, d = 3/2: c_d at g=5 within 20% of g=4.
    let radii = [0.25, 0.125, 0.0625, 0.03125];
    let mut cs = Vec::new();
    for g in [4u32, 5] {
        let spec = PrefractalSpec::minkowski(g);
        let chain = generate_minkowski(&spec).unwrap();
        let m = selfsimilar_measure_on_chain(&spec, &chain, 1.0).unwrap();
        let rep =
            check_upper_regularity(&m, 1.5, &radii, CenterRule::VerticesAndMidpoints).unwrap();
        check!(
            9,
            name,
            rep.c_d.is_finite() && rep.c_d > 0.0,
            "g={g}: c_d = {}",
            rep.c_d
        );
        cs.push(rep.c_d);
    }
    let drift = (cs[1] - cs[0]).abs() / cs[0];
    check!(
        9,
        name,
        drift <= 0.2,
        "c_d drift {drift:.3} ({} vs {})",
        cs[0],
        cs[1]
    );
    // Arclength on a straight side, d = 1: c_d = 2 +- 5%.
    let domain = build_domain(&PrefractalSpec::minkowski(0)).unwrap();
    let mesh = mesh_polyomino(&domain, 5).unwrap();
    let m = arclength_measure(&mesh, &[BoundaryTag::Fractal]).unwrap();
    let rep = check_upper_regularity(&m, 1.0, &[0.5, 0.25, 0.1], CenterRule::VerticesAndMidpoints)
        .unwrap();
    check!(
        9,
        name,
        (rep.c_d - 2.0).abs() <= 0.05 * 2.0,
        "straight side c_d = {}",
        rep.c_d
    );
    pass(
        9,
        name,
        &format!(
            "selfsimilar c_d = {:.4} (g=4) / {:.4} (g=5), drift {:.1}%; straight-side c_d = {:.4}",
            cs[0],
            cs[1],
            drift * 100.0,
            rep.c_d
        ),
    );
}

#[test]
fn criterion_10_geometry_convergence() {
    let name = "geometry convergence";
    let chains: Vec<_> = (1..=5u32)
        .map(|g| generate_minkowski(&PrefractalSpec::minkowski(g)).unwrap())
        .collect();
    let domains: Vec<_> = (1..=5u32)
        .map(|g| build_domain(&PrefractalSpec::minkowski(g)).unwrap())
        .collect();
    let mut dh = Vec::new();
    let mut sd = Vec::new();
    for g in 0..4 {
        let spacing = PrefractalSpec::minkowski(g as u32 + 2).unit() * 0.5;
        dh.push(hausdorff_distance(&chains[g], &chains[g + 1], spacing).unwrap());
        // The grid must resolve the finest bumps of generation g+2.
        sd.push(symmetric_difference_area(&domains[g], &domains[g + 1], 3072).unwrap());
    }
    for w in dh.windows(2) {
        check!(
            10,
            name,
            w[1] < w[0],
            "d^H not strictly decreasing: {:?}",
            dh
        );
    }
    for w in sd.windows(2) {
        check!(
            10,
            name,
            w[1] < w[0],
            "symdiff not strictly decreasing: {:?}",
            sd
        );
    }
    // Values at the g=3 -> g=4 pair.
    check!(10, name, dh[2] < 0.07, "d^H(G3,G4) = {}", dh[2]);
    check!(10, name, sd[2] < 0.07, "symdiff(G3,G4) = {}", sd[2]);
    pass(
        10,
        name,
        &format!(
            "d^H = {:?}; symdiff = {:?}",
            dh.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
            sd.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_11_localization_stability() {
    let name = "localization stability";
    let t0 = Instant::now();
    let config = StudyConfig {
        generations: vec![1, 2, 3, 4],
        alpha: 0.1,
        measure: steklov_core::measure::MeasureKind::Arclength,
        gamma: GammaChoice::FullBoundary,
        target_h: 1.0 / 128.0,
        eig_count: 30,
        cutoff: f64::INFINITY,
        sample_grid: 128,
        seed: DEFAULT_SEED,
        max_cells: steklov_core::mesh::MAX_CELLS,
    };
    let report = convergence_study(&config).unwrap();
    let mut failures: Vec<String> = Vec::new();
    let mut found: Vec<String> = Vec::new();
    for gen in &report.generations {
        if gen.h > 1.0 / 128.0 + 1e-15 {
            failures.push(format!(
                "generation {} meshed at h = {}",
                gen.generation, gen.h
            ));
        }
        match gen.localized_mode {
            Some(i) => found.push(format!(
                "g{}: mode {} (PR {:.3}, lambda {:.2})",
                gen.generation,
                i,
                gen.localization[i].participation_ratio,
                gen.spectrum.eigenvalues[i]
            )),
            None => {
                let best = gen
                    .localization
                    .iter()
                    .map(|l| l.participation_ratio)
                    .fold(f64::INFINITY, f64::min);
                failures.push(format!(
                    "generation {}: no mode among the first 30 with PR <= half the median \
                     (best PR {best:.4} vs bar {:.4})",
                    gen.generation,
                    0.5 * gen.median_pr
                ));
            }
        }
    }
    for cross in &report.cross {
        match cross.localized_pair {
            Some((i, j, mac)) => {
                if mac < 0.5 {
                    failures.push(format!(
                        "localized pair {}->{} (modes {i}/{j}): MAC {mac:.3} < 0.5",
                        cross.g_low, cross.g_high
                    ));
                } else {
                    found.push(format!(
                        "MAC {}->{}: {mac:.3} (modes {i}/{j})",
                        cross.g_low, cross.g_high
                    ));
                }
            }
            None => failures.push(format!(
                "pair {}->{}: no localized mode to match",
                cross.g_low, cross.g_high
            )),
        }
    }
    // Soft reference comparison: reported, not asserted.
    let pc = reference_comparison(&report);
    let detail = match (pc.scale, pc.within_tolerance) {
        (Some(c), Some(true)) => format!(
            "reference scale fit c = {c:.4}, all deviations within 25% of {REFERENCE_EIGENVALUES:?}"
        ),
        (Some(c), _) => format!(
            "reference scale fit c = {c:.4}, deviations {:?} against {REFERENCE_EIGENVALUES:?} \
             (soft target, reported only)",
            pc.deviations
                .iter()
                .map(|d| d.map(|v| format!("{:.0}%", v * 100.0)))
                .collect::<Vec<_>>()
        ),
        _ => "reference scale fit impossible (fewer than two localized modes found)".to_string(),
    };
    println!("criterion 11 (reference-values report): {detail}");
    let dt = t0.elapsed().as_secs_f64();
    if dt > 1200.0 {
        failures.push(format!("runtime {dt:.0}s > 20min"));
    }
    check!(
        11,
        name,
        failures.is_empty(),
        "{} [established: {}]",
        failures.join("; "),
        found.join("; ")
    );
    pass(11, name, &format!("{}; {dt:.0}s", found.join("; ")));
}

#[test]
fn criterion_12_trace_integral_proxy() {
    let name = "trace-integral convergence proxy";
    // Integrals of the test family against the unit-mass self-similar
    // measures of generations 1..5.
    let mut integrals: Vec<[f64; 6]> = Vec::new();
    for g in 1..=5u32 {
        let spec = PrefractalSpec::minkowski(g);
        let chain = generate_minkowski(&spec).unwrap();
        let m = selfsimilar_measure_on_chain(&spec, &chain, 1.0).unwrap();
        let mut row = [0.0f64; 6];
        for (i, slot) in row.iter_mut().enumerate() {
            let vals = m.sample(|p| steklov_core::analysis::eval_test_polynomial(i, p));
            *slot = boundary_integral(&m, &vals).unwrap();
        }
        integrals.push(row);
    }
    let mut summary = Vec::new();
    for (vi, vname) in TEST_POLYNOMIALS.iter().enumerate() {
        let diffs: Vec<f64> = (0..4)
            .map(|g| (integrals[g + 1][vi] - integrals[g][vi]).abs())
            .collect();
        for w in diffs.windows(2) {
            // The generator preserves 1, x, y and xy exactly (differences at
            // roundoff); allow an absolute slack there, demand decrease
            // wherever the differences are live.
            check!(
                12,
                name,
                w[1] <= w[0] + 1e-12,
                "v = {vname}: differences {diffs:?} not monotone"
            );
        }
        summary.push(format!("{vname}: {:.2e}->{:.2e}", diffs[0], diffs[3]));
    }
    // x^2 and y^2 carry the live 16^-g decay; demand strict monotonicity.
    for vi in [3usize, 5] {
        let diffs: Vec<f64> = (0..4)
            .map(|g| (integrals[g + 1][vi] - integrals[g][vi]).abs())
            .collect();
        for w in diffs.windows(2) {
            check!(
                12,
                name,
                w[1] < w[0],
                "v = {}: {diffs:?}",
                TEST_POLYNOMIALS[vi]
            );
        }
    }
    pass(12, name, &summary.join("; "));
}

#[test]
fn criterion_13_determinism() {
    let name = "deterministic outputs";
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_steklov-lab"))
            .args([
                "converge",
                "--gens",
                "1:2",
                "--alpha",
                "0.1",
                "--measure",
                "selfsimilar",
                "--gamma",
                "fractal",
                "--target-h",
                "0.03125",
                "--eigs",
                "6",
                "--sample-grid",
                "48",
                "--deterministic",
                "--out-dir",
            ])
            .arg(out)
            .status()
            .unwrap();
        check!(13, name, status.success(), "cmd_converge failed");
    }
    let mut names: Vec<_> = std::fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    check!(
        13,
        name,
        names.iter().any(|n| n == "report.json"),
        "missing report.json"
    );
    check!(
        13,
        name,
        names.iter().any(|n| n.to_string_lossy().ends_with(".csv")),
        "missing CSV outputs"
    );
    let mut compared = 0;
    for file in &names {
        let ba = std::fs::read(a.join(file)).unwrap();
        let bb = std::fs::read(b.join(file)).unwrap();
        check!(13, name, ba == bb, "{file:?} differs between runs");
        compared += 1;
    }
    pass(
        13,
        name,
        &format!("{compared} files byte-identical across two runs"),
    );
}
