mod commands;
mod input;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lop_core::Calculus;

use input::TermInput;

/// Probabilistic λ-calculi over multidistributions.
#[derive(Parser, Debug)]
#[command(name = "lop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a term toward its limit distribution.
    Eval(EvalArgs),
    /// Show the redexes of a multidistribution and contract one.
    Step(StepArgs),
    /// Print the image of a term under a translation.
    Translate(TranslateArgs),
    /// Run a property suite and stream JSON-lines reports.
    Check(CheckArgs),
}

fn calculus(s: &str) -> Result<Calculus, String> {
    s.parse().map_err(|e: lop_core::Error| e.to_string())
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_parser = calculus, default_value = "cbv")]
    calculus: Calculus,

    /// full-surface, full-left, full-head, full-any, leftmost-any or
    /// random(SEED).
    #[arg(long, default_value = "full-surface")]
    strategy: String,

    /// Observation set; defaults to the calculus' own observations.
    #[arg(long)]
    obs: Option<String>,

    #[arg(long, default_value_t = lop_core::asymptotics::DEFAULT_MAX_STEPS)]
    max_steps: usize,

    /// Stop once the unobserved mass is at most this rational.
    #[arg(long, value_name = "P/Q", default_value = "1/1048576")]
    epsilon: String,

    /// Join fuel for classes taken up to β.
    #[arg(long, default_value_t = lop_core::asymptotics::DEFAULT_JOIN_FUEL)]
    join_fuel: usize,

    /// Write the evaluation trace as JSON.
    #[arg(long, value_name = "FILE")]
    trace_out: Option<std::path::PathBuf>,

    #[arg(long)]
    json: bool,

    #[command(flatten)]
    input: TermInput,
}

#[derive(Args, Debug)]
struct StepArgs {
    /// Calculus of a new input; a loaded trace keeps its own.
    #[arg(long, value_parser = calculus)]
    calculus: Option<Calculus>,

    /// List the redexes with their flags.
    #[arg(long)]
    show_redexes: bool,

    /// Contract the redex with this number (as listed, counting from 0
    /// across all entries).
    #[arg(long, value_name = "N")]
    pick: Option<usize>,

    /// Trace file: continued from its last state when no term is given,
    /// started afresh otherwise; the step is appended.
    #[arg(long, value_name = "FILE")]
    trace: Option<std::path::PathBuf>,

    #[command(flatten)]
    input: TermInput,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    Simple,
    Surface,
}

#[derive(Args, Debug)]
struct TranslateArgs {
    #[arg(long, value_parser = calculus)]
    from: Calculus,

    /// Variant of the cbv translation.
    #[arg(long, value_enum, default_value = "simple")]
    variant: Variant,

    #[arg(long)]
    json: bool,

    #[command(flatten)]
    input: TermInput,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Confluence,
    Diamond,
    Commute,
    Standardize,
    #[value(alias = "postponement")]
    Postpone,
    Parallel,
    Simulate,
    Regressions,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(value_enum)]
    suite: Suite,

    #[arg(long, value_parser = calculus, default_value = "cbv")]
    calculus: Calculus,

    /// Largest AST size; 9 by default (8 for bang).
    #[arg(long)]
    size: Option<usize>,

    #[arg(long, default_value_t = 2)]
    free_vars: usize,

    /// Sample terms at random with this seed instead of enumerating.
    #[arg(long)]
    seed: Option<u64>,

    /// Number of sampled terms (with --seed) or traces (standardize).
    #[arg(long, default_value_t = 1000)]
    count: usize,

    /// Graph nodes per reachability search.
    #[arg(long, default_value_t = lop_core::oracle::DEFAULT_BUDGET)]
    budget: usize,

    /// Longest random trace (standardize).
    #[arg(long, default_value_t = 6)]
    length: usize,

    /// Restrict `simulate` to one translation.
    #[arg(long)]
    translation: Option<String>,

    /// Worker threads; all cores by default.
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Step(a) => commands::step(a),
        Command::Translate(a) => commands::translate(a),
        Command::Check(a) => commands::check(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
