//! `gridmso`: model checking, reductions and alternating colouring games
//! from the command line.
//!
//! Exit status is 0 for a true verdict (or plain success), 1 for false and
//! 2 or more for errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "gridmso", version, about = "MSO1 model checking and grid-like reductions")]
struct Cli {
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Log stage sizes and timings to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula file and print it with its statistics.
    Parse { formula: PathBuf },
    /// Evaluate a formula on a graph, digraph or labeled graph.
    Check {
        graph: PathBuf,
        formula: PathBuf,
        /// Plain quantifier expansion without domain restriction or memo.
        #[arg(long)]
        plain: bool,
    },
    /// Reduce (graph, sentence) to a labeled grid-like host and write the bundle.
    Reduce {
        graph: PathBuf,
        formula: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide a written bundle and compare with direct evaluation.
    Verify {
        dir: PathBuf,
        /// Skip the direct evaluation of the source sentence.
        #[arg(long)]
        no_direct: bool,
    },
    /// Alternating precolouring games.
    Sigmacol {
        #[command(subcommand)]
        command: SigmacolCommand,
    },
    /// Greedy strong edge colouring.
    Color { graph: PathBuf },
    /// A rows x cols grid as a grid-like graph.
    Grid { rows: usize, cols: usize },
}

#[derive(Subcommand)]
enum SigmacolCommand {
    /// Reduce a QDIMACS formula to a game instance.
    Reduce {
        qdimacs: PathBuf,
        /// Write the instance here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide a game instance.
    Solve {
        instance: PathBuf,
        /// Decide through the sentence for the instance's k instead.
        #[arg(long)]
        via_formula: bool,
    },
    /// Print the sentence deciding games with k rounds (k odd).
    Formula { k: usize },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::run(&cli) {
        Ok(outcome) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&outcome.json).expect("values serialize"));
            } else {
                print!("{}", outcome.text);
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            if cli.json {
                let doc = serde_json::json!({ "error": format!("{e:#}") });
                println!("{doc}");
            }
            eprintln!("error: {e:#}");
            ExitCode::from(commands::ERROR)
        }
    }
}
