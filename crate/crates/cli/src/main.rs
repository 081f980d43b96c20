mod commands;
mod data;
mod svg;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit codes: 0 accept, 3 reject, 1 usage error, 2 data error.
pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_REJECT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ccurves",
    version,
    about = "Two-sample comparison curves, B-plots, and min-type stochastic dominance tests",
    after_help = "Exit codes: 0 accept, 3 reject, 1 usage error, 2 data error."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run test statistics on two samples and write JSON reports
    Test(commands::test::TestArgs),
    /// Emit the B-plot (bars, buckets, barriers) as CSV and SVG
    Bplot(commands::bplot::BplotArgs),
    /// Dump theoretical, Monte Carlo, or empirical comparison curves as CSV
    Curves(commands::curves::CurvesArgs),
    /// Simulate null distributions into the cache and print critical values
    Nullsim(commands::nullsim::NullsimArgs),
    /// Estimate rejection rates of the tests against built-in model pairs
    Power(commands::power::PowerArgs),
}

/// Input data: two per-line value files, or one CSV with value,group rows.
#[derive(Args, Debug)]
pub struct DataArgs {
    /// Reference sample (group x), one value per line
    #[arg(long, value_name = "FILE")]
    pub x: Option<PathBuf>,
    /// Comparison sample (group y), one value per line
    #[arg(long, value_name = "FILE")]
    pub y: Option<PathBuf>,
    /// Single CSV with columns value,group (group in {x, y})
    #[arg(long, value_name = "FILE", conflicts_with_all = ["x", "y"])]
    pub csv: Option<PathBuf>,
    /// Ties policy for the pooled sample
    #[arg(long, value_enum, default_value_t = TiesArg::Reject)]
    pub ties: TiesArg,
    /// Seed for the jitter ties policy
    #[arg(long, default_value_t = 0)]
    pub jitter_seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TiesArg {
    Reject,
    Jitter,
}

/// Grid selection: a named cap or an explicit resolution.
#[derive(Args, Debug)]
pub struct GridArgs {
    /// Grid size policy: 127 (the default working grid), largest (largest
    /// dyadic size not exceeding N), or ustar (consistency cap N/ln^3 N - 1)
    #[arg(long, value_enum, default_value_t = GridCapArg::G127, conflicts_with = "s")]
    pub grid: GridCapArg,
    /// Explicit resolution s (grid size 2^(s+1) - 1)
    #[arg(long)]
    pub s: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GridCapArg {
    #[value(name = "127")]
    G127,
    Largest,
    Ustar,
}

impl GridArgs {
    pub fn choice(&self) -> ccurves::inference::GridChoice {
        use ccurves::inference::GridChoice;
        use ccurves::GridCap;
        match self.s {
            Some(s) => GridChoice::Resolution(s),
            None => GridChoice::Cap(match self.grid {
                GridCapArg::G127 => GridCap::MainBody,
                GridCapArg::Largest => GridCap::Largest,
                GridCapArg::Ustar => GridCap::UStar,
            }),
        }
    }
}

/// Monte Carlo settings shared by the commands.
#[derive(Args, Debug)]
pub struct McArgs {
    /// Monte Carlo replicates (null simulation) or runs (power study)
    #[arg(long, default_value_t = 10_000)]
    pub runs: usize,
    /// RNG seed; every artifact records it
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct OutArgs {
    /// Output directory for artifacts
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

impl OutArgs {
    pub fn prepare(&self) -> std::io::Result<()> {
        std::fs::create_dir_all(&self.out)
    }

    /// Cache directory: $CCURVES_CACHE_DIR if set, else .ccurves-cache under
    /// the output directory.
    pub fn cache_dir(&self) -> PathBuf {
        match std::env::var_os("CCURVES_CACHE_DIR") {
            Some(d) => PathBuf::from(d),
            None => self.out.join(".ccurves-cache"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Cmd::Test(args) => commands::test::run(args),
        Cmd::Bplot(args) => commands::bplot::run(args),
        Cmd::Curves(args) => commands::curves::run(args),
        Cmd::Nullsim(args) => commands::nullsim::run(args),
        Cmd::Power(args) => commands::power::run(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_data_error() { EXIT_DATA } else { EXIT_USAGE })
        }
    }
}
