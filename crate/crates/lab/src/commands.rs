//! Command implementations.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use steklov_core::analysis::{convergence_study, GammaChoice, StudyConfig};
use steklov_core::fem::{assemble, normal_derivative, solve_dirichlet, Field};
use steklov_core::geometry::{build_domain, generate_minkowski, PrefractalSpec};
use steklov_core::measure::{
    arclength_measure, check_upper_regularity, selfsimilar_measure, selfsimilar_measure_on_chain,
    BoundaryMeasure, CenterRule, MeasureKind,
};
use steklov_core::mesh::{mesh_disk, mesh_polyomino, BoundaryTag, PointLocator, TriMesh, ALL_TAGS};
use steklov_core::rng::SplitMix64;
use steklov_core::spectral::{
    apply_dtn, build_steklov, dirichlet_spectrum, resolvent_check, robin_spectrum_seeded,
    steklov_spectrum, DEFAULT_SEED,
};

use crate::cli::{
    BcArg, Cli, Command, ConvergeArgs, DomainArg, GammaArg, GeomShapeArg, GeometryArgs, MeasureArg,
    MeasureArgs, SolveArgs,
};
use crate::config::{config_hash, resolve_threads, RunRecord};
use crate::formats;
use crate::report::report_doc;
use crate::{CliError, CliResult};

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Geometry(args) => cmd_geometry(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Dtn(args) => cmd_dtn(&args),
        Command::Converge(args) => cmd_converge(&args),
        Command::Measure(args) => cmd_measure(&args),
    }
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn gamma_tags(gamma: GammaArg) -> &'static [BoundaryTag] {
    match gamma {
        GammaArg::Full => &ALL_TAGS,
        GammaArg::Fractal => &ALL_TAGS[..1],
    }
}

fn path_str(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Artifact reference relative to the run record's own directory.
fn artifact(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path_str(p))
}

// ---------------------------------------------------------------- geometry

#[derive(Serialize)]
struct GeometryConfig {
    fractal: &'static str,
    generation: u32,
    length: f64,
    shape: &'static str,
}

fn cmd_geometry(args: &GeometryArgs) -> CliResult<()> {
    let spec = PrefractalSpec::minkowski(args.generation).with_base_length(args.length);
    let cfg = GeometryConfig {
        fractal: "minkowski",
        generation: args.generation,
        length: args.length,
        shape: match args.shape {
            GeomShapeArg::Domain => "domain",
            GeomShapeArg::Chain => "chain",
        },
    };
    let hash = config_hash(&cfg);
    match args.shape {
        GeomShapeArg::Domain => {
            let domain = build_domain(&spec)?;
            formats::write_json(&args.out, &formats::polygon_doc(&domain, &hash))?;
        }
        GeomShapeArg::Chain => {
            let chain = generate_minkowski(&spec)?;
            formats::write_json(&args.out, &formats::chain_doc(&chain, &hash))?;
        }
    }
    println!("wrote {}", path_str(&args.out));
    Ok(())
}

// ------------------------------------------------------------------- solve

#[derive(Serialize, Clone)]
struct ProblemConfig {
    domain: &'static str,
    generation: u32,
    length: f64,
    refine: u32,
    disk_n: usize,
    rings: usize,
    measure: &'static str,
    gamma: &'static str,
}

fn measure_name(m: MeasureArg) -> &'static str {
    match m {
        MeasureArg::Arclength => "arclength",
        MeasureArg::Selfsimilar => "selfsimilar",
    }
}

fn gamma_name(g: GammaArg) -> &'static str {
    match g {
        GammaArg::Full => "full",
        GammaArg::Fractal => "fractal",
    }
}

/// Build the mesh and boundary measure for a problem description.
fn build_problem(
    domain: DomainArg,
    generation: u32,
    length: f64,
    refine: u32,
    disk_n: usize,
    rings: usize,
    measure: MeasureArg,
    gamma: GammaArg,
) -> CliResult<(TriMesh, BoundaryMeasure)> {
    match domain {
        DomainArg::Minkowski => {
            let spec = PrefractalSpec::minkowski(generation).with_base_length(length);
            let polygon = build_domain(&spec)?;
            let mesh = mesh_polyomino(&polygon, refine)?;
            let m = match measure {
                MeasureArg::Arclength => arclength_measure(&mesh, gamma_tags(gamma))?,
                MeasureArg::Selfsimilar => {
                    if gamma == GammaArg::Full {
                        return Err(CliError::Usage(
                            "the self-similar measure lives on the fractal side; use --gamma fractal"
                                .into(),
                        ));
                    }
                    selfsimilar_measure(&spec, &mesh, 1.0)?
                }
            };
            Ok((mesh, m))
        }
        DomainArg::Disk => {
            if measure == MeasureArg::Selfsimilar {
                return Err(CliError::Usage(
                    "the self-similar measure needs a prefractal boundary".into(),
                ));
            }
            let mesh = mesh_disk(disk_n, rings)?;
            let m = arclength_measure(&mesh, &[BoundaryTag::Fractal])?;
            Ok((mesh, m))
        }
    }
}

#[derive(Serialize)]
struct SolveConfig {
    bc: &'static str,
    alpha: f64,
    k: f64,
    eigs: usize,
    problem: ProblemConfig,
    pgm_size: usize,
    seed: u64,
}

fn cmd_solve(args: &SolveArgs) -> CliResult<()> {
    ensure_dir(&args.out_dir)?;
    let seed = args.run.seed.unwrap_or(DEFAULT_SEED);
    let threads = resolve_threads(args.run.threads);
    let cfg = SolveConfig {
        bc: match args.bc {
            BcArg::Dirichlet => "dirichlet",
            BcArg::Neumann => "neumann",
            BcArg::Robin => "robin",
        },
        alpha: args.alpha,
        k: args.k,
        eigs: args.eigs,
        problem: ProblemConfig {
            domain: match args.domain {
                DomainArg::Minkowski => "minkowski",
                DomainArg::Disk => "disk",
            },
            generation: args.generation,
            length: args.length,
            refine: args.refine,
            disk_n: args.disk_n,
            rings: args.rings,
            measure: measure_name(args.measure),
            gamma: gamma_name(args.gamma),
        },
        pgm_size: args.pgm_size,
        seed,
    };
    let hash = config_hash(&cfg);
    let mut record = RunRecord::new("solve", cfg, seed, args.run.deterministic, threads);

    let t0 = Instant::now();
    let (mesh, m) = build_problem(
        args.domain,
        args.generation,
        args.length,
        args.refine,
        args.disk_n,
        args.rings,
        args.measure,
        args.gamma,
    )?;
    let ops = assemble(&mesh, &m)?;
    record.time("assemble", t0.elapsed().as_millis() as u64);

    let t1 = Instant::now();
    let mut spectrum = match args.bc {
        BcArg::Dirichlet => dirichlet_spectrum(&ops, args.eigs)?,
        BcArg::Neumann => robin_spectrum_seeded(&ops, 0.0, args.eigs, seed)?,
        BcArg::Robin => robin_spectrum_seeded(&ops, args.alpha, args.eigs, seed)?,
    };
    // Reported for -Delta + k: the M-pencil shifts rigidly by k.
    if args.k != 0.0 {
        for ev in &mut spectrum.eigenvalues {
            *ev += args.k;
        }
    }
    record.time("eigensolve", t1.elapsed().as_millis() as u64);
    let worst_resid = spectrum.residual_norms.iter().cloned().fold(0.0, f64::max);
    record
        .residual_summary
        .insert("max_eig_residual".into(), worst_resid);

    let csv_path = args.out_dir.join("spectrum.csv");
    formats::write_spectrum_csv(&csv_path, &spectrum, &hash)?;
    record.artifacts.push(artifact(&csv_path));

    if args.dump_mesh {
        let p = args.out_dir.join("mesh.json");
        formats::write_json(&p, &formats::mesh_doc(&mesh, &hash))?;
        record.artifacts.push(artifact(&p));
    }

    if args.dump_operators {
        for (name, mat) in [
            ("stiffness.mtx", &ops.stiffness),
            ("mass.mtx", &ops.mass),
            ("boundary_mass.mtx", &ops.boundary_mass),
        ] {
            let p = args.out_dir.join(name);
            formats::write_matrix_market_sparse(&p, mat, &hash)?;
            record.artifacts.push(artifact(&p));
        }
    }

    if let Some(vecs) = spectrum.eigenvectors.as_ref() {
        let locator = PointLocator::new(&mesh);
        if !args.no_pgm {
            for (i, v) in vecs.iter().enumerate() {
                let p = args.out_dir.join(format!("mode_{i:03}.pgm"));
                formats::write_pgm(
                    &p,
                    &mesh,
                    &locator,
                    &Field::Real(v.clone()),
                    args.pgm_size,
                    &hash,
                )?;
                record.artifacts.push(artifact(&p));
            }
        }
        if !args.no_vtk {
            let fields: Vec<(String, Vec<f64>)> = vecs
                .iter()
                .enumerate()
                .map(|(i, v)| (format!("mode_{i:03}"), v.clone()))
                .collect();
            let p = args.out_dir.join("modes.vtk");
            formats::write_vtk(&p, &mesh, &fields, &hash, args.run.deterministic)?;
            record.artifacts.push(artifact(&p));
        }
    }

    let rr = args.out_dir.join("run.json");
    formats::write_json(&rr, &record)?;
    println!(
        "solve: {} eigenpairs, max residual {:.3e}, outputs in {}",
        spectrum.len(),
        worst_resid,
        path_str(&args.out_dir)
    );
    Ok(())
}

// --------------------------------------------------------------------- dtn

#[derive(Serialize)]
struct DtnConfig {
    k: f64,
    eigs: usize,
    s_values: Vec<f64>,
    problem: ProblemConfig,
    seed: u64,
}

fn cmd_dtn(args: &crate::cli::DtnArgs) -> CliResult<()> {
    ensure_dir(&args.out_dir)?;
    let seed = args.run.seed.unwrap_or(DEFAULT_SEED);
    let threads = resolve_threads(args.run.threads);
    let cfg = DtnConfig {
        k: args.k,
        eigs: args.eigs,
        s_values: args.s_values.clone(),
        problem: ProblemConfig {
            domain: match args.shape {
                DomainArg::Minkowski => "minkowski",
                DomainArg::Disk => "disk",
            },
            generation: args.generation,
            length: 1.0,
            refine: args.refine,
            disk_n: args.disk_n,
            rings: args.rings,
            measure: measure_name(args.measure),
            gamma: gamma_name(args.gamma),
        },
        seed,
    };
    let hash = config_hash(&cfg);
    let mut record = RunRecord::new("dtn", cfg, seed, args.run.deterministic, threads);

    let t0 = Instant::now();
    let (mesh, m) = build_problem(
        args.shape,
        args.generation,
        1.0,
        args.refine,
        args.disk_n,
        args.rings,
        args.measure,
        args.gamma,
    )?;
    let ops = assemble(&mesh, &m)?;
    let st = build_steklov(&ops, args.k)?;
    record.time("schur", t0.elapsed().as_millis() as u64);

    let ng = st.gamma.len();
    let count = args.eigs.min(ng).max(1);
    let spectrum = steklov_spectrum(&st, count)?;
    let csv_path = args.out_dir.join("steklov_spectrum.csv");
    formats::write_spectrum_csv(&csv_path, &spectrum, &hash)?;
    record.artifacts.push(artifact(&csv_path));

    // Resolvent identity between the complex Robin route and the dense
    // Schur route, on seeded random data.
    let mut rng = SplitMix64::new(seed ^ 0xd7);
    let mut resolvent = Vec::new();
    for &s in &args.s_values {
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let h: Vec<f64> = (0..ng).map(|_| rng.next_symmetric()).collect();
            worst = worst.max(resolvent_check(&st, &ops, s, &h)?);
        }
        resolvent.push(json!({ "s": s, "max_relative_error": worst }));
        record
            .residual_summary
            .insert(format!("resolvent_s_{s}"), worst);
    }

    // Two-route consistency: B^{-1} S f against the weak normal derivative
    // of the k-harmonic extension.
    let mut two_route = 0.0f64;
    for _ in 0..5 {
        let f: Vec<f64> = (0..ng).map(|_| rng.next_symmetric()).collect();
        let psi_schur = apply_dtn(&st, &f)?;
        let mut f_full = vec![0.0f64; ops.n()];
        for (&dof, &val) in st.gamma.iter().zip(&f) {
            f_full[dof] = val;
        }
        let u = solve_dirichlet(&ops, args.k, &f_full, None)?;
        let nd = normal_derivative(&ops, &u, args.k, None)?;
        let psi = nd.psi.ok_or_else(|| {
            CliError::Usage("normal derivative has no L2 representative off Gamma".into())
        })?;
        let num: f64 = psi_schur
            .iter()
            .zip(&psi)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let den: f64 = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
        two_route = two_route.max(num / den.max(1e-300));
    }
    record
        .residual_summary
        .insert("two_route_max".into(), two_route);

    let symmetry = st.s.asymmetry() / st.s.max_abs().max(1e-300);
    let report = json!({
        "version": 1,
        "k": args.k,
        "boundary_dofs": st.boundary.len(),
        "gamma_dofs": ng,
        "schur_symmetry_rel": symmetry,
        "lowest_eigenvalues": spectrum.eigenvalues.iter().take(5).collect::<Vec<_>>(),
        "resolvent": resolvent,
        "two_route_max_relative_gap": two_route,
        "config_hash": hash,
    });
    let report_path = args.out_dir.join("dtn_report.json");
    formats::write_json(&report_path, &report)?;
    record.artifacts.push(artifact(&report_path));

    if args.dump_matrix {
        let p = args.out_dir.join("steklov.mtx");
        formats::write_matrix_market_dense(&p, &st.s, &hash)?;
        record.artifacts.push(artifact(&p));
        if let Some(&s) = args.s_values.first() {
            let sg = st.s_gamma();
            let bg = st.b_gamma.clone();
            let mut bdense = steklov_core::dense::DenseMat::zeros(ng, ng);
            for (i, j, v) in bg.upper_entries() {
                bdense.set(i, j, v);
                if i != j {
                    bdense.set(j, i, v);
                }
            }
            let p = args.out_dir.join("resolvent.mtx");
            formats::write_matrix_market_dense_complex(
                &p,
                ng,
                |i, j| (-sg.get(i, j), s * bdense.get(i, j)),
                &hash,
            )?;
            record.artifacts.push(artifact(&p));
        }
    }

    let rr = args.out_dir.join("run.json");
    formats::write_json(&rr, &record)?;
    println!(
        "dtn: lowest Steklov eigenvalue {:.6}, two-route gap {:.3e}, outputs in {}",
        spectrum.eigenvalues.first().copied().unwrap_or(f64::NAN),
        two_route,
        path_str(&args.out_dir)
    );
    Ok(())
}

// ---------------------------------------------------------------- converge

#[derive(Serialize)]
struct ConvergeConfig {
    generations: Vec<u32>,
    alpha: f64,
    measure: &'static str,
    gamma: &'static str,
    target_h: f64,
    eigs: usize,
    cutoff: Option<f64>,
    sample_grid: usize,
    seed: u64,
}

pub fn parse_generations(text: &str) -> CliResult<Vec<u32>> {
    let bad = || {
        CliError::Usage(format!(
            "cannot parse generations '{text}' (use a:b or a,b,c)"
        ))
    };
    if let Some((lo, hi)) = text.split_once(':') {
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        if hi < lo {
            return Err(bad());
        }
        Ok((lo..=hi).collect())
    } else {
        text.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect()
    }
}

fn study_config(args: &ConvergeArgs, seed: u64) -> CliResult<StudyConfig> {
    let generations = parse_generations(&args.gens)?;
    Ok(StudyConfig {
        generations,
        alpha: args.alpha,
        measure: match args.measure {
            MeasureArg::Arclength => MeasureKind::Arclength,
            MeasureArg::Selfsimilar => MeasureKind::SelfSimilar,
        },
        gamma: match args.gamma {
            GammaArg::Full => GammaChoice::FullBoundary,
            GammaArg::Fractal => GammaChoice::FractalSide,
        },
        target_h: args.target_h,
        eig_count: args.eigs,
        cutoff: args.cutoff.unwrap_or(f64::INFINITY),
        sample_grid: args.sample_grid,
        seed,
        max_cells: steklov_core::mesh::MAX_CELLS,
    })
}

fn cmd_converge(args: &ConvergeArgs) -> CliResult<()> {
    ensure_dir(&args.out_dir)?;
    let seed = args.run.seed.unwrap_or(DEFAULT_SEED);
    let threads = resolve_threads(args.run.threads);
    let study = study_config(args, seed)?;
    let cfg = ConvergeConfig {
        generations: study.generations.clone(),
        alpha: study.alpha,
        measure: measure_name(args.measure),
        gamma: gamma_name(args.gamma),
        target_h: study.target_h,
        eigs: study.eig_count,
        cutoff: args.cutoff,
        sample_grid: study.sample_grid,
        seed,
    };
    let hash = config_hash(&cfg);
    let mut record = RunRecord::new("converge", cfg, seed, args.run.deterministic, threads);

    let t0 = Instant::now();
    let report = convergence_study(&study)?;
    record.time("study", t0.elapsed().as_millis() as u64);

    // Per-generation spectra as standalone CSV files.
    for gen in &report.generations {
        let p = args
            .out_dir
            .join(format!("spectrum_gen{}.csv", gen.generation));
        formats::write_spectrum_csv(&p, &gen.spectrum, &hash)?;
        record.artifacts.push(artifact(&p));
    }

    if args.modes {
        for gen in &report.generations {
            let spec = PrefractalSpec::minkowski(gen.generation);
            let domain = build_domain(&spec)?;
            let mesh = mesh_polyomino(&domain, gen.refinement)?;
            let locator = PointLocator::new(&mesh);
            if let Some(vecs) = gen.spectrum.eigenvectors.as_ref() {
                let mut fields = Vec::new();
                for (i, v) in vecs.iter().enumerate() {
                    let p = args
                        .out_dir
                        .join(format!("mode_g{}_{i:03}.pgm", gen.generation));
                    formats::write_pgm(
                        &p,
                        &mesh,
                        &locator,
                        &Field::Real(v.clone()),
                        args.pgm_size,
                        &hash,
                    )?;
                    record.artifacts.push(artifact(&p));
                    fields.push((format!("mode_{i:03}"), v.clone()));
                }
                let p = args.out_dir.join(format!("modes_g{}.vtk", gen.generation));
                formats::write_vtk(&p, &mesh, &fields, &hash, args.run.deterministic)?;
                record.artifacts.push(artifact(&p));
            }
        }
    }

    let config_echo = serde_json::to_value(&record.config).expect("config serializes");
    let doc = report_doc(&report, config_echo, &hash);
    let report_path = args.out_dir.join("report.json");
    formats::write_json(&report_path, &doc)?;
    record.artifacts.push(artifact(&report_path));

    let worst_resid = report
        .generations
        .iter()
        .flat_map(|g| g.spectrum.residual_norms.iter())
        .cloned()
        .fold(0.0, f64::max);
    record
        .residual_summary
        .insert("max_eig_residual".into(), worst_resid);

    let rr = args.out_dir.join("run.json");
    formats::write_json(&rr, &record)?;
    println!(
        "converge: {} generations, outputs in {}",
        report.generations.len(),
        path_str(&args.out_dir)
    );
    Ok(())
}

// ----------------------------------------------------------------- measure

#[derive(Serialize)]
struct MeasureConfig {
    kind: &'static str,
    generation: u32,
    refine: u32,
    gamma: &'static str,
    d: f64,
    radii: Vec<f64>,
}

fn cmd_measure(args: &MeasureArgs) -> CliResult<()> {
    let d = args.d.unwrap_or(match args.kind {
        MeasureArg::Arclength => 1.0,
        MeasureArg::Selfsimilar => 1.5,
    });
    let radii = args
        .radii
        .clone()
        .unwrap_or_else(|| vec![0.25, 0.125, 0.0625, 0.03125, 0.015625]);
    let cfg = MeasureConfig {
        kind: measure_name(args.kind),
        generation: args.generation,
        refine: args.refine,
        gamma: gamma_name(args.gamma),
        d,
        radii: radii.clone(),
    };
    let hash = config_hash(&cfg);

    let spec = PrefractalSpec::minkowski(args.generation);
    let m = match args.kind {
        MeasureArg::Selfsimilar => {
            let chain = generate_minkowski(&spec)?;
            selfsimilar_measure_on_chain(&spec, &chain, 1.0)?
        }
        MeasureArg::Arclength => {
            let domain = build_domain(&spec)?;
            let mesh = mesh_polyomino(&domain, args.refine)?;
            arclength_measure(&mesh, gamma_tags(args.gamma))?
        }
    };
    let report = check_upper_regularity(&m, d, &radii, CenterRule::VerticesAndMidpoints)?;
    let kind = match args.kind {
        MeasureArg::Arclength => MeasureKind::Arclength,
        MeasureArg::Selfsimilar => MeasureKind::SelfSimilar,
    };
    formats::write_json(&args.out, &formats::regularity_doc(&report, kind, &hash))?;
    if let Some(mp) = &args.out_measure {
        formats::write_json(mp, &formats::measure_doc(&m, &hash))?;
    }
    println!(
        "measure: d = {d}, c_d = {:.6} (worst at ({:.4}, {:.4}), r = {})",
        report.c_d, report.worst_center.x, report.worst_center.y, report.worst_radius
    );
    Ok(())
}
