use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hadamard::config::{FamilySpec, PointsSpec, SpaceDescriptor};
use hadamard::{CliResult, Command, ExperimentConfig, Format};
use hadamard_core::counterexamples::PetruninConfig;
use hadamard_core::{Point, ScalarField};
use serde::de::DeserializeOwned;

/// Numerical experiments on convex sets, gradient flows and circumcenters in
/// nonpositively curved model spaces.
#[derive(Parser)]
#[command(name = "hadamard", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Circumradius against diameter for finite point sets.
    Jung(Flags),
    /// Smallest enclosing ball.
    Circumcenter(Flags),
    /// Exhaustive small-subset reduction of the circumradius.
    Helly(Flags),
    /// Lower bound on the dimension certified by the Jung ratio.
    Dimension(Flags),
    /// Proximal gradient flow of a convex field.
    Flow(Flags),
    /// Nested convex families with empty intersection.
    Filtering(Flags),
    /// The oscillating concave field without a limit direction.
    Petrunin(Flags),
    /// Convergence demos in the space of 1-Lipschitz convex functions.
    C0Demo(Flags),
    /// Curvature constants k_n, s_n(r) and r_n(D).
    Constants(Flags),
    /// Comparison-triangle defects on random triples.
    Comparison(Flags),
    /// Run a JSON experiment config.
    Run {
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config's output format.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Args)]
struct Flags {
    /// `euclidean:3`, `sphere:2`, `hyperbolic:2`, `box:100`, `star:5`, or JSON.
    #[arg(long)]
    space: Option<String>,
    /// CSV file or generator (`simplex:n`, `gaussian:m`, `uniform:m`).
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    dimension: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    min_diameter: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Scalar field as JSON or a path to a JSON file.
    #[arg(long)]
    field: Option<String>,
    /// Start point as comma-separated coordinates or JSON.
    #[arg(long)]
    start: Option<String>,
    /// Nested family as JSON or a path to a JSON file.
    #[arg(long)]
    family: Option<String>,
    /// Petrunin configuration as JSON or a path to a JSON file.
    #[arg(long)]
    petrunin: Option<String>,
    #[arg(long)]
    rays: Option<usize>,
    #[arg(long)]
    kn: Option<usize>,
    #[arg(long)]
    sn: Option<f64>,
    #[arg(long)]
    rn: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; defaults to the number of processors.
    #[arg(long)]
    workers: Option<usize>,
}

/// Inline JSON, or the contents of the named file.
fn json_arg<T: DeserializeOwned>(what: &str, value: &str) -> CliResult<T> {
    let text = if value.trim_start().starts_with(['{', '[']) {
        value.to_string()
    } else {
        std::fs::read_to_string(Path::new(value))
            .map_err(|e| hadamard::error::usage(format!("--{what} '{value}': {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| hadamard::error::usage(format!("--{what}: {e}")))
}

fn start_arg(value: &str) -> CliResult<Point> {
    if value.trim_start().starts_with(['{', '[']) {
        return json_arg("start", value);
    }
    value
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| hadamard::error::usage(format!("--start: '{c}' is not a number"))))
        .collect::<CliResult<Vec<f64>>>()
        .map(Point::Coords)
}

fn space_arg(value: &str) -> CliResult<SpaceDescriptor> {
    if value.trim_start().starts_with('{') {
        Ok(SpaceDescriptor::Full(json_arg("space", value)?))
    } else {
        Ok(SpaceDescriptor::Short(value.to_string()))
    }
}

fn build(command: Command, f: Flags) -> CliResult<ExperimentConfig> {
    let mut c = ExperimentConfig::new(command);
    c.space = f.space.as_deref().map(space_arg).transpose()?;
    c.seed = f.seed;
    c.workers = f.workers;
    c.output.path = f.out;
    c.output.format = f.format;
    let i = &mut c.inputs;
    i.points = f.points.map(PointsSpec::Source);
    i.dimension = f.dimension;
    i.delta = f.delta;
    i.min_diameter = f.min_diameter;
    i.radius = f.radius;
    i.trials = f.trials;
    i.step = f.step;
    i.horizon = f.horizon;
    i.field = f.field.as_deref().map(|v| json_arg::<ScalarField>("field", v)).transpose()?;
    i.start = f.start.as_deref().map(start_arg).transpose()?;
    i.family = f.family.as_deref().map(|v| json_arg::<FamilySpec>("family", v)).transpose()?;
    i.petrunin = f.petrunin.as_deref().map(|v| json_arg::<PetruninConfig>("petrunin", v)).transpose()?;
    i.rays = f.rays;
    i.kn = f.kn;
    i.sn = f.sn;
    i.rn = f.rn;
    Ok(c)
}

fn config(cli: Cli) -> CliResult<ExperimentConfig> {
    let (command, flags) = match cli.command {
        Cmd::Run { config, out, format, workers } => {
            let mut c = ExperimentConfig::from_file(&config)?;
            if out.is_some() {
                c.output.path = out;
            }
            if let Some(f) = format {
                c.output.format = f;
            }
            if workers.is_some() {
                c.workers = workers;
            }
            return Ok(c);
        }
        Cmd::Jung(f) => (Command::Jung, f),
        Cmd::Circumcenter(f) => (Command::Circumcenter, f),
        Cmd::Helly(f) => (Command::Helly, f),
        Cmd::Dimension(f) => (Command::Dimension, f),
        Cmd::Flow(f) => (Command::Flow, f),
        Cmd::Filtering(f) => (Command::Filtering, f),
        Cmd::Petrunin(f) => (Command::Petrunin, f),
        Cmd::C0Demo(f) => (Command::C0Demo, f),
        Cmd::Constants(f) => (Command::Constants, f),
        Cmd::Comparison(f) => (Command::Comparison, f),
    };
    build(command, flags)
}

fn main() -> ExitCode {
    // clap reports bad arguments with status 2, which is reserved here for
    // failed checks.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match config(cli).and_then(|c| hadamard::run(&c)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hadamard: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
