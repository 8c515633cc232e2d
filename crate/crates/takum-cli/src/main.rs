//! `takum`: codec utilities and dataset reports.

mod codec;
mod output;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "takum", version, about = "Takum codec utilities and evaluation reports")]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect and convert single values.
    #[command(subcommand)]
    Codec(CodecCmd),
    /// Write CSV datasets.
    Report(ReportArgs),
}

#[derive(Subcommand)]
pub enum CodecCmd {
    /// Field dump and value of a payload.
    Decode { format: String, payload: String },
    /// Payload of a decimal that the format represents exactly.
    Encode {
        format: String,
        #[arg(allow_hyphen_values = true)]
        value: String,
    },
    /// Rounds decimals; prints each payload and value at the input's digit count.
    Round {
        format: String,
        #[arg(allow_hyphen_values = true, required = true)]
        values: Vec<String>,
    },
    /// Payload of the negated value.
    Negate { format: String, payload: String },
    /// Payload of the reciprocal (takums only).
    Invert { format: String, payload: String },
    /// Converts a takum to another width.
    Resize {
        format: String,
        payload: String,
        #[arg(short = 'n', long)]
        width: u32,
    },
    /// Orders two payloads: prints less, equal, greater or unordered.
    Compare { format: String, a: String, b: String },
}

#[derive(Args)]
pub struct ReportArgs {
    #[command(subcommand)]
    pub target: ReportTarget,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Subcommand)]
pub enum ReportTarget {
    /// IEEE and posit waste ratios (waste.csv).
    Waste,
    /// Exponent coding costs for 0..=254 (cost.csv).
    Cost,
    /// Smallest and largest values per width (dynamic_range.csv).
    Dynrange,
    /// Relative error bounds over magnitude (error_bounds.csv).
    Bounds {
        /// Bit width of the default column set.
        #[arg(short = 'n', long)]
        width: Option<u32>,
        /// Explicit column formats (repeatable).
        #[arg(long)]
        format: Vec<String>,
        /// Spacing of the log10(x) samples.
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Physical constants rounded into each format.
    Constants {
        /// Print aligned text to stdout instead of writing CSV.
        #[arg(long)]
        text: bool,
    },
    /// Exhaustive closure sweeps: curves, matrices and a summary.
    Closure {
        /// Operations (repeatable; default all seven).
        #[arg(long)]
        op: Vec<String>,
        /// Formats (repeatable; default the 8- and 16-bit set).
        #[arg(long)]
        format: Vec<String>,
        /// Run 16-bit binary sweeps exhaustively instead of strided.
        #[arg(long)]
        full: bool,
        /// Operand stride for every sweep (overrides the default sampling).
        #[arg(long)]
        stride: Option<usize>,
        /// Write the matrix even when it exceeds 2^24 records.
        #[arg(long)]
        matrix: bool,
    },
}

/// Failure of a command, with its exit status.
#[derive(Debug)]
pub enum Failure {
    Lib(takum::Error),
    Io(std::io::Error),
    Usage(String),
}

impl From<takum::Error> for Failure {
    fn from(e: takum::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        use takum::Error::*;
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 1,
            Failure::Lib(e) => match e {
                Parse(_) | UnknownFormat(_) | UnknownConstant(_) | InvalidWidth(_)
                | PayloadTooWide { .. } | WidthMismatch(..) => 2,
                OutOfRange | NotFinite | IsNaR | Domain(_) | UnsupportedFormat(_) => 3,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
            Failure::Usage(m) => f.write_str(m),
        }
    }
}

/// Prints one line to stdout; a closed pipe ends the process quietly.
pub fn emit(line: impl std::fmt::Display) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{line}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("takum: {e}");
        std::process::exit(1);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("takum: {e}");
            return ExitCode::from(2);
        }
    }
    let res = match cli.command {
        Command::Codec(c) => codec::run(c),
        Command::Report(r) => report::run(r),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("takum: {e}");
            ExitCode::from(e.code())
        }
    }
}
