//! Dispatch of an [`ExperimentConfig`] to the library and report writing.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

use hadamard_core::ToleranceProfile;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::commands;
use crate::config::{Command, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::report::{Outcome, Report};

/// Exit status when the run completed but a predicted property failed.
pub const ASSERTION_FAILED: u8 = 2;

/// Shared state of one run.
pub struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub tol: ToleranceProfile,
    pool: rayon::ThreadPool,
}

impl<'a> Context<'a> {
    pub fn new(config: &'a ExperimentConfig) -> CliResult<Self> {
        let tol = config.tolerance_profile()?;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = config.workers {
            builder = builder.num_threads(n.max(1));
        }
        let pool = builder.build()?;
        Ok(Self { config, tol, pool })
    }

    /// Generator for instance `stream`; independent of the worker count.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(stream);
        rng
    }

    /// Runs `job` over `items` on the worker pool, keeping input order.
    pub fn map<T, R, F>(&self, items: Vec<T>, job: F) -> CliResult<Vec<R>>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> CliResult<R> + Sync + Send,
    {
        self.pool.install(|| items.into_par_iter().map(job).collect())
    }
}

pub fn statements(command: Command) -> Vec<&'static str> {
    match command {
        Command::Jung => vec!["thm:raddiam"],
        Command::Circumcenter => vec!["sec:Jung:cat0"],
        Command::Helly => vec!["lem:nplus"],
        Command::Dimension => vec!["thm:dimension"],
        Command::Flow => vec!["sec:gradient", "prop:karlsson"],
        Command::Filtering => vec!["thm:filtering", "lem:gradient", "lem:nested", "lem:eberle", "ex:Hilbert"],
        Command::Petrunin => vec!["ex:Petrunin", "prop:karlsson"],
        Command::C0Demo => vec!["spacefunction"],
        Command::Constants => vec!["sec:Jung:cat0"],
        Command::Comparison => vec!["sec:Jung:cat0"],
    }
}

pub fn execute(config: &ExperimentConfig) -> CliResult<Report> {
    let started = Instant::now();
    let ctx = Context::new(config)?;
    let outcome: Outcome = match config.command {
        Command::Jung => commands::geometry::jung(&ctx)?,
        Command::Circumcenter => commands::geometry::circumcenter(&ctx)?,
        Command::Helly => commands::geometry::helly(&ctx)?,
        Command::Dimension => commands::geometry::dimension(&ctx)?,
        Command::Comparison => commands::geometry::comparison(&ctx)?,
        Command::Constants => commands::geometry::constants(&ctx)?,
        Command::Flow => commands::flow::flow(&ctx)?,
        Command::Filtering => commands::filtering::filtering(&ctx)?,
        Command::Petrunin => commands::examples::petrunin(&ctx)?,
        Command::C0Demo => commands::examples::c0_demo(&ctx)?,
    };
    let tol = ctx.tol;
    Ok(Report::new(config.clone(), tol, statements(config.command), outcome, started.elapsed().as_secs_f64()))
}

/// Executes the config, writes the report where the config says, and
/// returns the process exit status.
pub fn run(config: &ExperimentConfig) -> CliResult<u8> {
    let report = execute(config)?;
    match &config.output.path {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            report.write(config.output.format, &mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            report.write(config.output.format, &mut lock)?;
            lock.flush()?;
        }
    }
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAILED {} ({}): {}", c.name, c.statement, c.detail);
    }
    Ok(if report.passed { 0 } else { ASSERTION_FAILED })
}

impl From<rayon::ThreadPoolBuildError> for CliError {
    fn from(e: rayon::ThreadPoolBuildError) -> Self {
        crate::error::usage(format!("worker pool: {e}"))
    }
}
