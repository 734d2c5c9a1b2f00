//! `hlk`: generate, verify and classify hypersurfaces whose mean curvature is
//! an affine function of the vertical normal component.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hlk_core::orbits::{Direction, OrbitOptions};
use hlk_core::ModelParams;

#[derive(Parser, Debug)]
#[command(name = "hlk", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Base curve of a cylinder over a planar curve, optionally checked
    /// against the closed forms.
    Cylinder(CylinderArgs),
    /// Trace one orbit of the rotational phase plane.
    Trace(TraceArgs),
    /// Classify the rotational surface generated by a seed.
    Classify(ClassifyArgs),
    /// Revolve a profile curve (n = 2) into a triangulated OBJ mesh.
    ExportMesh(MeshArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Dimension of the hypersurface (ambient space R^{n+1}).
    #[arg(long)]
    n: u32,
    /// Prescribed constant lambda.
    #[arg(long)]
    lambda: f64,
}

#[derive(Args, Debug, Clone)]
struct NumericArgs {
    /// Local error tolerance of the integrator.
    #[arg(long, default_value = "1e-10")]
    tol: f64,
    /// Arc-length budget.
    #[arg(long, default_value_t = 500.0)]
    s_max: f64,
    /// Escape radius [default: 1000 (n-1)/(lambda n)].
    #[arg(long)]
    x_max: Option<f64>,
    /// Radius of the ball around the equilibrium counted as convergence.
    #[arg(long, default_value = "1e-4")]
    e0_radius: f64,
    /// Stop after this many half-turns around the equilibrium.
    #[arg(long, default_value_t = 12)]
    winding_cap: u32,
    /// Arc-length spacing of the output samples.
    #[arg(long, default_value = "1e-3")]
    sample_step: f64,
}

impl NumericArgs {
    fn options(&self, direction: Direction) -> OrbitOptions {
        OrbitOptions {
            tol: self.tol,
            s_max: self.s_max,
            x_max: self.x_max,
            e0_radius: self.e0_radius,
            winding_cap: self.winding_cap,
            sample_step: self.sample_step,
            direction,
            ..OrbitOptions::default()
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum CaseArg {
    Auto,
    LambdaGreater,
    LambdaEqual,
    LambdaLess0,
    LambdaLessPi,
}

#[derive(Args, Debug)]
struct CylinderArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Last component of the unit density vector.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    v: f64,
    #[arg(long, value_enum, default_value_t = CaseArg::Auto)]
    case: CaseArg,
    /// Arc-length interval `a:b` containing 0.
    #[arg(long, default_value = "-5:5", allow_hyphen_values = true)]
    s_span: String,
    #[arg(long, default_value = "1e-10")]
    tol: f64,
    #[arg(long, default_value = "1e-3")]
    sample_step: f64,
    /// Compare the integrated curve with the closed forms and emit the report
    /// as JSON (stdout when --out is given, stderr otherwise).
    #[arg(long)]
    verify: bool,
    /// Curve CSV destination [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum PrescribedArg {
    Linear,
    Cosine,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// `axis-up`, `axis-down` or `interior:x0,y0,eps`.
    #[arg(long, allow_hyphen_values = true)]
    seed: String,
    #[arg(long, value_enum, default_value_t = PrescribedArg::Linear)]
    prescribed: PrescribedArg,
    /// Integration direction for interior seeds.
    #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
    direction: DirectionArg,
    #[command(flatten)]
    numeric: NumericArgs,
    /// Trace CSV destination [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Event log JSON destination [default: stdout when --out is given,
    /// stderr otherwise].
    #[arg(long)]
    events: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Dimension(s); a comma-separated list with --grid [default grid: 2,3,4,5].
    #[arg(long, value_delimiter = ',')]
    n: Vec<u32>,
    /// Prescribed constant(s); a comma-separated list with --grid [default
    /// grid: 0.5,1,2].
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// `axis-up`, `axis-down` or `off-axis:x_hat`.
    #[arg(long, default_value = "axis-up", allow_hyphen_values = true)]
    seed: String,
    /// Classify the whole n x lambda grid.
    #[arg(long)]
    grid: bool,
    /// Worker threads for --grid [default: logical processors]. The HLK_JOBS
    /// environment variable takes precedence.
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    numeric: NumericArgs,
    /// Report destination [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MeshArgs {
    /// Profile CSV with `x` and `z` columns (curve or trace format).
    #[arg(long)]
    profile: PathBuf,
    /// Dimension of the profile's surface; only n = 2 is meshable.
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Angular subdivisions.
    #[arg(long, default_value_t = 128)]
    segments: usize,
    /// OBJ destination [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<hlk_core::Error> for Failure {
    fn from(e: hlk_core::Error) -> Self {
        match e {
            hlk_core::Error::StepFailure(_) => Self::numeric(e.to_string()),
            _ => Self::usage(e.to_string()),
        }
    }
}

fn model(m: &ModelArgs, v: f64) -> Result<ModelParams, Failure> {
    Ok(ModelParams::new(m.n, m.lambda, v)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Cylinder(a) => commands::cylinder(a),
        Command::Trace(a) => commands::trace(a),
        Command::Classify(a) => commands::classify(a),
        Command::ExportMesh(a) => commands::export_mesh(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hlk: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
