mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use output::Format;
use ptau::{Error, PrecisionContext};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "ptau", version, about = "Toeplitz determinants of the Painleve VI weight via discrete Painleve recurrences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Toeplitz determinants I_N for N = 0..n-max
    Tau(WeightArgs),
    /// Reflection coefficients r_N, rbar_N
    Reflections(WeightArgs),
    /// Gap probability generating function of an arc for CUE
    CueGap(CueGapArgs),
    /// Averages of |u + z|^{2 mu} over CUE
    CueMoment(CueMomentArgs),
    /// Diagonal spin-spin correlations of the square lattice Ising model
    Ising(IsingArgs),
    /// The partition-indexed 2F1 at N equal arguments
    Hyp2f1(Hyp2f1Args),
    /// Cross-validation matrix on the built-in panel
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// decimal digits of working precision
    #[arg(long, env = "PT_DIGITS", default_value_t = 60)]
    pub digits: u32,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// write the table here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    #[value(name = "recurrence-22")]
    Recurrence22,
    #[value(name = "recurrence-21")]
    Recurrence21,
    DpvProp,
    DpvL01,
    DpvL14,
    Hyp,
    DetOracle,
    All,
}

impl MethodArg {
    pub fn name(&self) -> &'static str {
        match self {
            MethodArg::Recurrence22 => "recurrence-22",
            MethodArg::Recurrence21 => "recurrence-21",
            MethodArg::DpvProp => "dpv-prop",
            MethodArg::DpvL01 => "dpv-l01",
            MethodArg::DpvL14 => "dpv-l14",
            MethodArg::Hyp => "hyp",
            MethodArg::DetOracle => "det-oracle",
            MethodArg::All => "all",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct WeightArgs {
    /// complex numbers are written re or re,im
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub omega1: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub omega2: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub xi: String,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "phi", required_unless_present = "phi")]
    pub t: Option<String>,
    /// t = e^{i phi}
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value = "recurrence-22")]
    pub method: MethodArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct CueGapArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    /// arc length of the excluded interval
    #[arg(long, allow_hyphen_values = true)]
    pub phi: String,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value = "recurrence-22")]
    pub method: MethodArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct CueMomentArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value = "recurrence-22")]
    pub method: MethodArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhaseArg {
    Low,
    High,
}

#[derive(Args, Debug, Clone)]
pub struct IsingArgs {
    /// elliptic modulus; inf and 0 give the temperature extremes
    #[arg(long)]
    pub k: String,
    #[arg(long, value_enum)]
    pub phase: PhaseArg,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value = "recurrence-22")]
    pub method: MethodArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Hyp2f1Args {
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, allow_hyphen_values = true)]
    pub c: String,
    #[arg(long, allow_hyphen_values = true)]
    pub t: String,
    /// largest number of variables
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// default, core, dpv, hyp, cue, ising-only, structure
    #[arg(long, default_value = "default")]
    pub panel: String,
    /// worker threads; all cores when absent
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Disagreement(_) => 4,
        Error::Precondition(_)
        | Error::Phase(_)
        | Error::BranchAmbiguity(_)
        | Error::DegenerateParameter(_)
        | Error::SingularModulus(_) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> ptau::Result<()> {
    let digits = match &cli.command {
        Command::Tau(a) | Command::Reflections(a) => a.common.digits,
        Command::CueGap(a) => a.common.digits,
        Command::CueMoment(a) => a.common.digits,
        Command::Ising(a) => a.common.digits,
        Command::Hyp2f1(a) => a.common.digits,
        Command::Verify(a) => a.common.digits,
    };
    let ctx = PrecisionContext::with_digits(digits)?;
    match cli.command {
        Command::Tau(a) => commands::weight(&a, true, &ctx),
        Command::Reflections(a) => commands::weight(&a, false, &ctx),
        Command::CueGap(a) => commands::cue_gap(&a, &ctx),
        Command::CueMoment(a) => commands::cue_moment(&a, &ctx),
        Command::Ising(a) => commands::ising(&a, &ctx),
        Command::Hyp2f1(a) => commands::hyp2f1(&a, &ctx),
        Command::Verify(a) => commands::verify(&a, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ptau: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
