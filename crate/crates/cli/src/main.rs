mod commands;
mod error;
mod grid;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Report;
use error::{CliError, EXIT_OK, EXIT_SUITE_FAILURE, EXIT_VALIDATION};
use grid::Grid;

#[derive(Parser)]
#[command(name = "cekit", version, about = "Unified-entropy concentratable entanglement toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the measure for pure-state recipes over an (alpha, beta) grid.
    Compute {
        /// Recipe such as ghz:3, w:4, dicke:4:2, star:pi/4, haar:4:7, or JSON. Repeatable.
        #[arg(long = "state", required = true)]
        states: Vec<String>,
        /// Comma-separated 1-based labels; defaults to every subsystem.
        #[arg(long = "s")]
        subset: Option<String>,
        /// A number or a:b:steps.
        #[arg(long, default_value = "1")]
        alpha: Grid,
        #[arg(long, default_value = "1")]
        beta: Grid,
        /// Only the four named measures, one row per state.
        #[arg(long)]
        named: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// GHZ minus W for each named measure over n and |s|.
    GhzWSweep {
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// Comma-separated subset sizes; defaults to 1..=n.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Named measures of the four-party star network over an angle grid.
    StarSweep {
        #[arg(long, default_value = "0:pi/2:100")]
        grid: Grid,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Named measures of the Dicke states D(n, k) for k = 0..=n.
    DickeTable {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a randomized property suite (or `all`).
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
        /// Rerun a single trial from its reported seed.
        #[arg(long)]
        trial_seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulate the parallel SWAP test and a finite-shot estimate.
    Swaptest {
        #[arg(long)]
        state: String,
        #[arg(long = "s")]
        subset: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Convex-roof upper bound for a (possibly mixed) state.
    Roof {
        #[arg(long)]
        state: String,
        #[arg(long = "s")]
        subset: Option<String>,
        #[arg(long, default_value = "1", value_parser = grid::parse_number)]
        alpha: f64,
        #[arg(long, default_value = "1", value_parser = grid::parse_number)]
        beta: f64,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        iterations: usize,
        #[arg(long)]
        mixer_size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("CEKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("CEKIT_THREADS must be a positive integer, got '{text}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn emit(report: &Report, output: &OutputArgs) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match &output.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match output.format {
        Format::Csv => report.table.write_csv(&mut sink)?,
        Format::Json => {
            match &report.json {
                Some(v) => serde_json::to_writer_pretty(&mut sink, v)?,
                None => serde_json::to_writer_pretty(&mut sink, &report.table)?,
            }
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let (report, output) = match &cli.command {
        Command::Compute {
            states,
            subset,
            alpha,
            beta,
            named,
            output,
        } => (
            commands::compute(states, subset.as_deref(), alpha, beta, *named)?,
            output,
        ),
        Command::GhzWSweep {
            n_min,
            n_max,
            sizes,
            output,
        } => (commands::ghz_w_sweep(*n_min, *n_max, sizes.as_deref())?, output),
        Command::StarSweep { grid, output } => (commands::star_sweep(grid)?, output),
        Command::DickeTable { n, output } => (commands::dicke_table(*n)?, output),
        Command::Verify {
            suite,
            seed,
            trials,
            trial_seed,
            output,
        } => (commands::verify(suite, *seed, *trials, *trial_seed)?, output),
        Command::Swaptest {
            state,
            subset,
            shots,
            seed,
            output,
        } => (commands::swaptest(state, subset.as_deref(), *shots, *seed)?, output),
        Command::Roof {
            state,
            subset,
            alpha,
            beta,
            restarts,
            iterations,
            mixer_size,
            seed,
            output,
        } => (
            commands::roof(
                state,
                subset.as_deref(),
                *alpha,
                *beta,
                *restarts,
                *iterations,
                *mixer_size,
                *seed,
            )?,
            output,
        ),
    };
    emit(&report, output)?;
    if !report.ok {
        eprintln!("assertion failed: see rows above");
    }
    Ok(report.ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::from(EXIT_OK as u8),
        Ok(false) => ExitCode::from(EXIT_SUITE_FAILURE as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
