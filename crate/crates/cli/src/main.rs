mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{Format, RunResult};
use config::JobConfig;
use okounkov::Error;

#[derive(Parser, Debug)]
#[command(name = "okounkov", version, about = "Exact Okounkov bodies, test curves and toric Chebyshev transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON job configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    k_max: Option<u32>,
    /// Float tolerance, used only where floats are compared
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write every artifact of the run into this directory
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// What to print on stdout
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Okounkov body of a graded series under a flag
    Body,
    /// Mixed volume of bodies, optionally against an intersection number
    Mixedvol,
    /// Intersection number of toric line bundles
    Intersection,
    /// Duistermaat-Heckman measure of a test function
    Dh,
    /// Convergence of jumping-number spectra to the DH measure
    Bc,
    /// Riemann sums of toric Chebyshev transforms against the exact integral
    Chebyshev,
    /// Per-level distances between two graded series
    SeriesDistance,
    /// Run a seeded property suite
    Proptest {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        iterations: Option<u32>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoSections(_)
        | Error::EmptyLinearSystem
        | Error::EmptyHull
        | Error::NotBig
        | Error::Unbounded
        | Error::DegenerateBody
        | Error::ZeroVolume
        | Error::ZeroSection
        | Error::FlagDegeneracy => 2,
        _ => 4,
    }
}

fn load(cli: &Cli) -> Result<JobConfig, (u8, String)> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let src = std::fs::read_to_string(path).map_err(|e| (4, format!("{}: {e}", path.display())))?;
            JobConfig::parse(&src).map_err(|e| (4, e.to_string()))?
        }
        None => JobConfig::default(),
    };
    if cli.k_max.is_some() {
        cfg.k_max = cli.k_max;
    }
    if cli.tolerance.is_some() {
        cfg.tolerance = cli.tolerance;
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Command::Proptest { suite, iterations } = &cli.command {
        if suite.is_some() {
            cfg.suite = suite.clone();
        }
        if iterations.is_some() {
            cfg.iterations = *iterations;
        }
    }
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &JobConfig) -> okounkov::Result<RunResult> {
    match cli.command {
        Command::Body => commands::cmd_body(cfg),
        Command::Mixedvol => commands::cmd_mixedvol(cfg),
        Command::Intersection => commands::cmd_intersection(cfg),
        Command::Dh => commands::cmd_dh(cfg),
        Command::Bc => commands::cmd_bc(cfg),
        Command::Chebyshev => commands::cmd_chebyshev(cfg),
        Command::SeriesDistance => commands::cmd_series_distance(cfg),
        Command::Proptest { .. } => commands::cmd_proptest(cfg),
    }
}

fn emit(cli: &Cli, result: &RunResult) -> Result<(), (u8, String)> {
    if let Some(dir) = &cli.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| (1, format!("{}: {e}", dir.display())))?;
        for a in &result.artifacts {
            let path = dir.join(format!("{}.{}", a.stem, a.format.extension()));
            std::fs::write(&path, &a.content).map_err(|e| (1, format!("{}: {e}", path.display())))?;
        }
    }
    match result.artifact(cli.format) {
        Some(a) => {
            print!("{}", a.content);
            Ok(())
        }
        None => Err((4, format!("no {} output for this command", cli.format.extension()))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("OKOUNKOV_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let start = Instant::now();
    let outcome = load(&cli).and_then(|cfg| {
        let result = run(&cli, &cfg).map_err(|e| (exit_code(&e), e.to_string()))?;
        for line in &result.notes {
            eprintln!("{line}");
        }
        emit(&cli, &result)?;
        Ok(result)
    });
    match outcome {
        Ok(result) => {
            eprintln!("time: {:.3}s", start.elapsed().as_secs_f64());
            match result.violation {
                Some(v) => {
                    eprintln!("property violation: {v}");
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
