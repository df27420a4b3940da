//! Command-line front end: argument parsing, exit codes and output routing.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use lpsi::Error;

mod commands;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "LPSI_THREADS";

#[derive(Debug, Parser)]
#[command(name = "lpsi", version, about = "Sparsest ReLU interpolation through minimum lp path norms")]
pub struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall-clock time in the result (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PatternsArg {
    All,
    Realizable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NdMethod {
    /// Exhaustive extreme-point search.
    Exact,
    /// Iteratively reweighted l1 with random restarts.
    Irl1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Grid,
    Restart,
    Partition,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal V_p interpolant of univariate data.
    #[command(group(ArgGroup::new("arith").args(["exact", "float"])))]
    Solve1d {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        p: f64,
        /// Rational arithmetic (default).
        #[arg(long)]
        exact: bool,
        /// Double precision arithmetic.
        #[arg(long)]
        float: bool,
    },
    /// Threshold below which minimal interpolants are sparsest.
    Pstar {
        #[arg(long)]
        data: PathBuf,
        /// Grid points scanned before bisection.
        #[arg(long, default_value_t = 512)]
        pstar_grid: usize,
    },
    /// Fewest knots of any interpolant.
    L0 {
        #[arg(long)]
        data: PathBuf,
    },
    /// Multivariate interpolation through activation patterns.
    SolveNd {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        p: f64,
        /// Box radius on the lifted variables.
        #[arg(long = "R")]
        radius: Option<f64>,
        #[arg(long, value_enum)]
        patterns: Option<PatternsArg>,
        /// Largest support searched; defaults to one more than the sparsest support.
        #[arg(long)]
        support_cap: Option<usize>,
        #[arg(long)]
        no_bias_penalty: bool,
        #[arg(long, value_enum, default_value_t = NdMethod::Exact)]
        method: NdMethod,
        /// Restarts of the reweighted solver.
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        #[arg(long, required_if_eq("method", "irl1"))]
        seed: Option<u64>,
    },
    /// Brute-force probes of the univariate solver.
    Oracle {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, required_if_eq_any([("kind", "grid"), ("kind", "restart")]))]
        p: Option<f64>,
        #[arg(long, value_enum)]
        kind: OracleKind,
        #[arg(long, required_if_eq("kind", "restart"))]
        seed: Option<u64>,
        /// Grid resolution per slope coordinate.
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
    },
    /// Gradient training with a smoothed lp penalty.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// JSON training configuration; missing fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        /// Also write the full trajectory as CSV.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Re-checks a stored result against its data.
    Verify {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        result: PathBuf,
    },
    /// Samples a stored function as CSV.
    Plot {
        #[arg(long)]
        result: PathBuf,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        range: Vec<f64>,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
}

/// Failure of a command, with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    /// Output to emit even though the command failed.
    pub output: Option<String>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string(), output: None }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidDataset(_)
        | Error::DuplicateAbscissa { .. }
        | Error::Domain(_)
        | Error::Format(_)
        | Error::Json(_)
        | Error::Io(_) => EXIT_VALIDATION,
        Error::ResourceCap(_) => EXIT_RESOURCE,
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Internal(_) | Error::Divergence { .. } => EXIT_FAILURE,
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| Failure {
        code: EXIT_USAGE,
        message: format!("{THREADS_VAR} must be a positive integer, got {v:?}"),
        output: None,
    })?;
    // A pool built earlier in this process wins; that only happens in tests.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code. Results go to `stdout` unless `--out` is given.
pub fn run_cli<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = configure_threads().and_then(|()| commands::run(&cli));
    let (code, output) = match result {
        Ok(out) => (EXIT_OK, Some(out)),
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            (f.code, f.output)
        }
    };
    if let Some(text) = output {
        let written = match &cli.out {
            Some(path) => std::fs::write(path, text),
            None => stdout.write_all(text.as_bytes()),
        };
        if let Err(e) = written {
            let _ = writeln!(stderr, "error: cannot write output: {e}");
            return EXIT_FAILURE;
        }
    }
    code
}
