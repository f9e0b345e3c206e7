//! `sepsub`: membership checks, games and axiom generation for separation schemes.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "sepsub", version, about = "Separation subclasses of finite structures")]
struct Cli {
    /// Print the report as one JSON object.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

/// Scheme argument: a scheme file, or `builtin:NAME[:PARAMS]` such as `builtin:colouring:2`.
#[derive(Args)]
struct SchemeArg {
    scheme: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Direct,
    Game,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Sexpr,
    Tptp,
}

#[derive(Subcommand)]
enum Command {
    /// Decide membership of a structure in the class a scheme defines.
    Check {
        structure: PathBuf,
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long)]
        max_index: Option<usize>,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
        /// Largest universe for subset enumeration.
        #[arg(long, default_value_t = sepsub::separation::DEFAULT_SIZE_CAP)]
        size_cap: usize,
    },
    /// Solve the game for one positive rule.
    Game {
        structure: PathBuf,
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 0)]
        rule: usize,
        /// Survive through this round.
        #[arg(long, group = "mode")]
        rounds: Option<u32>,
        /// Survive forever.
        #[arg(long, group = "mode")]
        omega: bool,
        /// Report the longest survival.
        #[arg(long, group = "mode")]
        survival: bool,
        /// Skip the opening round and start at round 1 from the empty position.
        #[arg(long)]
        reduced: bool,
        #[arg(long)]
        max_index: Option<usize>,
        /// Round cap for --survival.
        #[arg(long, default_value_t = sepsub::game::DEFAULT_SURVIVAL_CAP)]
        cap: u32,
    },
    /// Generate the first-order axioms of a scheme.
    Axioms {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        max_index: Option<usize>,
        #[arg(long, value_enum, default_value = "sexpr")]
        format: Format,
        #[arg(long)]
        simplify: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Estimated node cap per sentence.
        #[arg(long, default_value_t = sepsub::axiomgen::DEFAULT_NODE_CAP)]
        node_cap: usize,
    },
    /// Evaluate the sentences of a formula file on a structure.
    Eval {
        structure: PathBuf,
        formulas: PathBuf,
        /// Take the signature from this scheme instead of inferring it from the structure.
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Compare generated axioms with the game solver cell by cell.
    Crosscheck {
        structure: PathBuf,
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        max_index: Option<usize>,
        #[arg(long, default_value_t = sepsub::axiomgen::DEFAULT_NODE_CAP)]
        node_cap: usize,
    },
    /// Emit the first-order theory over the extended signature.
    Pseudo {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long)]
        max_index: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide membership by searching expansions of the extended theory.
    PseudoCheck {
        structure: PathBuf,
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long)]
        max_index: Option<usize>,
        #[arg(long, default_value_t = sepsub::separation::DEFAULT_EXPANSION_BITS)]
        bit_cap: usize,
    },
    /// Export a built-in scheme, e.g. `colouring:2`, `dupa`, `poset:3:omega`.
    Scheme {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Game { .. } => "game",
            Command::Axioms { .. } => "axioms",
            Command::Eval { .. } => "eval",
            Command::Crosscheck { .. } => "crosscheck",
            Command::Pseudo { .. } => "pseudo",
            Command::PseudoCheck { .. } => "pseudo-check",
            Command::Scheme { .. } => "scheme",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    match commands::run(cli.command) {
        Ok(out) => {
            let text = out.report.render(cli.json);
            if out.report_to_stderr {
                eprint!("{text}");
            } else {
                print!("{text}");
            }
            ExitCode::from(out.report.exit as u8)
        }
        Err(e) => {
            let msg = format!("{e:#}");
            eprintln!("error: {msg}");
            if cli.json {
                print!("{}", report::error_report(name, &msg, true));
            }
            ExitCode::from(report::EXIT_ERROR as u8)
        }
    }
}
