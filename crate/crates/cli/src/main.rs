//! `twoway`: command-line access to the toolkit. Exit status is 0 on
//! success, 1 on an undefined output or a negative verdict, 2 on errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "twoway", version, about = "Two-way transducers, transition monoids and first-order transductions")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    /// First-order look-around transducer.
    Fola,
    /// Star-free look-around transducer.
    Sfla,
    /// Plain two-way transducer.
    Twoway,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run a machine or transduction on one word.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        input: String,
        /// Print the run of a two-way transducer as a table.
        #[arg(long)]
        trace: bool,
    },
    /// The four behaviors of a word on a two-way machine.
    Behaviors {
        file: PathBuf,
        #[arg(long)]
        input: String,
    },
    /// Transition monoid of a two-way machine.
    Monoid {
        file: PathBuf,
        /// Report the class of a word (repeatable).
        #[arg(long = "class")]
        classes: Vec<String>,
        /// Write the monoid artifact to a file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Aperiodicity of a machine's transition monoid, or counter-freeness of a DFA.
    Aperiodic { file: PathBuf },
    /// A sequential transducer followed by a two-way transducer.
    Compose {
        first: PathBuf,
        second: PathBuf,
        /// Read the first stage as right-sequential.
        #[arg(long)]
        right: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// First-order transduction of a two-way transducer.
    ToFot {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Two-way machine of a first-order transduction.
    FromFot {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "twoway")]
        stage: Stage,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Split long productions into single letters.
    Normalize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Machine realizing the same function on reversed inputs.
    Mirror {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Bounded equivalence of two word functions.
    CheckEquiv {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_len: usize,
    },
    /// Truth value of a formula on a word.
    EvalFormula {
        file: PathBuf,
        #[arg(long)]
        input: String,
        /// Position of a free variable, as `x=3` (repeatable).
        #[arg(long = "assign")]
        assignments: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command, cli.json) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            ExitCode::from(if outcome.positive { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
