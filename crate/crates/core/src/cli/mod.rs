//! The `koopman` command line: parse a system file, run one stage of the
//! pipeline, print a report and write result files next to the input.

mod commands;
mod report;

pub use report::{CheckBlock, EigenLine, ManifoldLine, RunReport, SolutionBlock};

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_NO_PAIR: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("{0}")]
    NoPair(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Verify(_) => EXIT_VERIFY,
            CliError::NoPair(_) => EXIT_NO_PAIR,
            CliError::Other(_) => EXIT_OTHER,
        }
    }
}

macro_rules! other_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Other(e.to_string())
            }
        }
    )*};
}

other_from!(
    std::io::Error,
    crate::algebra::AlgebraError,
    crate::manifold::ManifoldError,
    crate::eigen::EigenError,
    crate::numerics::NumericsError,
    crate::koopman1d::Koopman1dError,
    crate::koopman2d::Koopman2dError
);

#[derive(Parser, Debug)]
#[command(name = "koopman", version, about = "Koopman eigenfunctions and closed-form solutions of polynomial ODEs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// System file.
    pub file: PathBuf,
    /// Print the report as `key=value` lines.
    #[arg(long)]
    pub kv: bool,
    /// Directory for written files (default: next to the input).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct DiscoverArgs {
    /// Largest manifold degree searched by the ansatz.
    #[arg(long, default_value_t = 2)]
    pub max_deg: u32,
    /// Random starts per degree.
    #[arg(long, default_value_t = 48)]
    pub attempts: usize,
    /// RNG seed for the ansatz starts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check every `manifold` line and print its cofactor N.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Search for invariant manifolds (eigenvector lines and polynomial ansatz).
    Discover {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: DiscoverArgs,
    },
    /// Eigenfunctions from constant cofactor combinations.
    Eigen {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: DiscoverArgs,
    },
    /// Closed-form solution of a planar system.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: DiscoverArgs,
        /// Initial condition `x,y`; overrides the file's `ic` lines.
        #[arg(long, allow_hyphen_values = true)]
        ic: Vec<String>,
    },
    /// Compare the closed form with the adaptive integrator and write CSV.
    Check {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: DiscoverArgs,
        /// Initial conditions `x,y`, repeatable; overrides the file's `ic` lines.
        #[arg(long, allow_hyphen_values = true)]
        ics: Vec<String>,
        /// End time; overrides the file's `horizon` (default 1).
        #[arg(long)]
        horizon: Option<f64>,
        /// Grid intervals on [0, horizon].
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
    /// One-dimensional pipeline.
    Solve1d {
        #[command(flatten)]
        common: Common,
        /// Eigenvalue, an exact constant such as `-1` or `1/2`.
        #[arg(long, default_value = "-1", allow_hyphen_values = true)]
        lambda: String,
        /// Initial value, repeatable; overrides the file's `ic` lines.
        #[arg(long, allow_hyphen_values = true)]
        ic: Vec<String>,
        /// End time; overrides the file's `horizon` (default 1).
        #[arg(long)]
        horizon: Option<f64>,
        /// Grid intervals on [0, horizon].
        #[arg(long, default_value_t = 200)]
        grid: usize,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Verify { common }
            | Command::Discover { common, .. }
            | Command::Eigen { common, .. }
            | Command::Solve { common, .. }
            | Command::Check { common, .. }
            | Command::Solve1d { common, .. } => common,
        }
    }
}

/// `dir/stem.suffix`, next to `input` unless `out_dir` is given.
pub(crate) fn derived_path(input: &Path, out_dir: Option<&Path>, suffix: &str) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "system".into());
    let dir = out_dir.map(Path::to_path_buf).or_else(|| input.parent().map(Path::to_path_buf)).unwrap_or_default();
    dir.join(format!("{stem}.{suffix}"))
}

/// Run a parsed command; the report is written to `out` even on failure.
pub fn execute(cmd: &Command, out: &mut dyn Write) -> i32 {
    let common = cmd.common();
    let mut report = RunReport::new(
        match cmd {
            Command::Verify { .. } => "verify",
            Command::Discover { .. } => "discover",
            Command::Eigen { .. } => "eigen",
            Command::Solve { .. } => "solve",
            Command::Check { .. } => "check",
            Command::Solve1d { .. } => "solve1d",
        },
        &common.file.display().to_string(),
    );
    let result = commands::dispatch(cmd, &mut report);
    let code = match &result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            report.verdict("error", e.to_string());
            e.exit_code()
        }
    };
    let text = if common.kv { report.to_kv() } else { report.to_text() };
    let _ = out.write_all(text.as_bytes());
    code
}

/// Parse `args` (including the program name) and run.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli.command, out),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = write!(err, "{e}");
            code
        }
    }
}

pub fn main_exit() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
