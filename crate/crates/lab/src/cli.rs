//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "steklov-lab",
    version,
    about = "Boundary-value and Steklov eigenproblems on prefractal domains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a prefractal boundary curve or the domain it bounds.
    Geometry(GeometryArgs),
    /// Mesh a domain and solve an eigenvalue problem; emit spectrum CSV,
    /// VTK fields and PGM heatmaps of the eigenfunction moduli.
    Solve(SolveArgs),
    /// Build the Poincare-Steklov (Dirichlet-to-Neumann) operator; emit its
    /// spectrum and the resolvent / two-route consistency report.
    Dtn(DtnArgs),
    /// Cross-generation spectral-stability study.
    Converge(ConvergeArgs),
    /// Boundary-measure regularity report (d-upper-regularity constant).
    Measure(MeasureArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FractalArg {
    Minkowski,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeomShapeArg {
    Domain,
    Chain,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BcArg {
    Dirichlet,
    Neumann,
    Robin,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureArg {
    Arclength,
    Selfsimilar,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaArg {
    /// Measure on the whole boundary.
    Full,
    /// Measure on the prefractal side only.
    Fractal,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainArg {
    Minkowski,
    Disk,
}

#[derive(Args, Debug)]
pub struct GeometryArgs {
    #[arg(long, value_enum, default_value = "minkowski")]
    pub fractal: FractalArg,
    /// Prefractal generation (0 gives the straight side).
    #[arg(long = "gen")]
    pub generation: u32,
    /// Base side length.
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    /// Emit the bounded domain polygon or the open boundary chain.
    #[arg(long, value_enum, default_value = "domain")]
    pub shape: GeomShapeArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct RunFlags {
    /// Eigensolver start-vector seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker cap (falls back to STEKLOV_LAB_THREADS; execution is
    /// sequential and deterministic either way).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Suppress timestamps and timings so outputs are byte-reproducible.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub bc: BcArg,
    /// Robin coefficient.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Shift: eigenvalues reported for -Delta + k with the chosen condition.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, value_enum, default_value = "arclength")]
    pub measure: MeasureArg,
    #[arg(long, value_enum, default_value = "full")]
    pub gamma: GammaArg,
    /// Number of eigenpairs.
    #[arg(long)]
    pub eigs: usize,
    #[arg(long, value_enum, default_value = "minkowski")]
    pub domain: DomainArg,
    #[arg(long = "gen", default_value_t = 0)]
    pub generation: u32,
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    /// Uniform refinement of the dyadic boundary grid.
    #[arg(long, default_value_t = 0)]
    pub refine: u32,
    /// Disk boundary polygon order (with --domain disk).
    #[arg(long, default_value_t = 256)]
    pub disk_n: usize,
    /// Disk radial rings (with --domain disk).
    #[arg(long, default_value_t = 64)]
    pub rings: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Heatmap resolution (pixels per side).
    #[arg(long, default_value_t = 256)]
    pub pgm_size: usize,
    /// Skip PGM heatmaps.
    #[arg(long)]
    pub no_pgm: bool,
    /// Skip the VTK field file.
    #[arg(long)]
    pub no_vtk: bool,
    /// Dump assembled K, M, B in Matrix Market format.
    #[arg(long)]
    pub dump_operators: bool,
    /// Write the mesh as a versioned JSON document.
    #[arg(long)]
    pub dump_mesh: bool,
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Args, Debug)]
pub struct DtnArgs {
    #[arg(long, value_enum, default_value = "disk")]
    pub shape: DomainArg,
    #[arg(long = "gen", default_value_t = 1)]
    pub generation: u32,
    #[arg(long, default_value_t = 0)]
    pub refine: u32,
    /// Shift of the Schur complement `K + k M`.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long, value_enum, default_value = "arclength")]
    pub measure: MeasureArg,
    #[arg(long, value_enum, default_value = "full")]
    pub gamma: GammaArg,
    #[arg(long, default_value_t = 10)]
    pub eigs: usize,
    #[arg(long, default_value_t = 256)]
    pub disk_n: usize,
    #[arg(long, default_value_t = 64)]
    pub rings: usize,
    /// Resolvent probe frequencies (comma separated).
    #[arg(long, default_value = "0.1,1,10", value_delimiter = ',')]
    pub s_values: Vec<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Dump the Steklov matrix (and the first resolvent matrix) in Matrix
    /// Market format.
    #[arg(long)]
    pub dump_matrix: bool,
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    /// Generations, e.g. `1:4` or `1,2,4`.
    #[arg(long, default_value = "1:4")]
    pub gens: String,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "selfsimilar")]
    pub measure: MeasureArg,
    #[arg(long, value_enum, default_value = "fractal")]
    pub gamma: GammaArg,
    /// Target mesh pitch.
    #[arg(long, default_value_t = 0.015625)]
    pub target_h: f64,
    #[arg(long, default_value_t = 20)]
    pub eigs: usize,
    /// Spectral Hausdorff truncation (defaults to no truncation).
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long, default_value_t = 96)]
    pub sample_grid: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Also render per-mode PGM heatmaps and VTK fields per generation.
    #[arg(long)]
    pub modes: bool,
    #[arg(long, default_value_t = 256)]
    pub pgm_size: usize,
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[arg(long, value_enum)]
    pub kind: MeasureArg,
    #[arg(long = "gen")]
    pub generation: u32,
    /// Refinement of the mesh carrying an arclength measure.
    #[arg(long, default_value_t = 0)]
    pub refine: u32,
    #[arg(long, value_enum, default_value = "fractal")]
    pub gamma: GammaArg,
    /// Regularity exponent (defaults to 1 for arclength, 3/2 self-similar).
    #[arg(long)]
    pub d: Option<f64>,
    /// Ball radii (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Regularity report path.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional measure-file path.
    #[arg(long)]
    pub out_measure: Option<PathBuf>,
}
