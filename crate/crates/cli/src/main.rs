//! `finesteer`: sweeps and checks for the fine-grained steering inequality.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use finesteer_core::measure::{Direction, Outcome};

use output::Format;

#[derive(Debug)]
pub enum CliError {
    /// Bad user input; exit code 2.
    Invalid(String),
    /// Numerical failure or a violated internal bound; exit code 3.
    Numerical(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid argument: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<finesteer_core::Error> for CliError {
    fn from(e: finesteer_core::Error) -> Self {
        match e {
            finesteer_core::Error::InvalidArgument(m) => CliError::Invalid(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "finesteer", version, about = "Fine-grained EPR-steering sweeps and checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Slack added to the bound before a verdict counts as steerable.
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub tolerance: f64,
    /// Master seed for randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Also write the output to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Maximum of the single-qubit uncertainty game.
    Fur {
        /// Axis: x, y, z (optionally signed) or "theta,phi" in radians.
        #[arg(long, value_parser = parse_axis, default_value = "z", allow_hyphen_values = true)]
        p: Direction,
        #[arg(long, value_parser = parse_axis, default_value = "x", allow_hyphen_values = true)]
        q: Direction,
        /// Winning outcome bit.
        #[arg(long, value_parser = parse_outcome, default_value = "0")]
        win: Outcome,
    },
    /// Werner-state sweep with Bob on σz/σx.
    Werner {
        #[arg(long, default_value_t = 0.0)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        /// Number of intervals; steps + 1 points are emitted.
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Sweep of √α|00⟩ + √(1−α)|11⟩.
    Pure {
        #[arg(long, default_value_t = 0.0)]
        alpha_min: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = PureMode::Optimal)]
        mode: PureMode,
    },
    /// Monogamy of the functional over three-qubit states.
    Monogamy {
        #[arg(long, value_enum)]
        family: MonogamyFamily,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = ConditioningArg::Averaged)]
        conditioning: ConditioningArg,
    },
    /// Key-rate lower bounds from a violation k, or for a three-qubit state.
    Keyrate {
        /// Violation k of the steering bound.
        #[arg(long, conflicts_with = "state")]
        k: Option<f64>,
        #[arg(long, value_enum, required_unless_present = "k")]
        state: Option<KeyState>,
        /// Schmidt weight for `--state product`.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Bell weight for `--state dephased`.
        #[arg(long, default_value_t = 0.9)]
        q: f64,
        #[arg(long, value_enum, default_value_t = CharlieArg::Worst)]
        charlie: CharlieArg,
    },
    /// Linear n-setting steering bound C_n.
    Saunders {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PureMode {
    Optimal,
    Samebasis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MonogamyFamily {
    Ghz,
    W,
    Product,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConditioningArg {
    Averaged,
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KeyState {
    Ghz,
    W,
    Product,
    Dephased,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CharlieArg {
    /// Charlie measures σz and σx like everyone else.
    Copy,
    /// Charlie's most informative axes found by grid search.
    Worst,
}

fn parse_axis(s: &str) -> Result<Direction, String> {
    let (sign, name) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    let unit = match name {
        "x" => Some([1.0, 0.0, 0.0]),
        "y" => Some([0.0, 1.0, 0.0]),
        "z" => Some([0.0, 0.0, 1.0]),
        _ => None,
    };
    if let Some(u) = unit {
        return Direction::from_vector(u.map(|c| sign * c)).map_err(|e| e.to_string());
    }
    let (t, p) = s.split_once(',').ok_or_else(|| format!("unknown axis {s:?}"))?;
    let t: f64 = t.trim().parse().map_err(|_| format!("bad theta in {s:?}"))?;
    let p: f64 = p.trim().parse().map_err(|_| format!("bad phi in {s:?}"))?;
    Direction::new(t, p).map_err(|e| e.to_string())
}

fn parse_outcome(s: &str) -> Result<Outcome, String> {
    let bit: u8 = s.parse().map_err(|_| format!("outcome must be 0 or 1, got {s:?}"))?;
    Outcome::from_bit(bit).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("finesteer: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
