use std::path::PathBuf;
use std::process::ExitCode;

use circlechar::cli::{run_file, Command, RunOptions};
use clap::{Args, Parser, Subcommand};

/// Build, transform and verify characterizing sequences of circle subgroups.
#[derive(Parser)]
#[command(name = "circlechar", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Run {
    /// TOML run configuration.
    config: PathBuf,
    /// Record wall time in the report (breaks byte-for-byte reproducibility).
    #[arg(long)]
    timing: bool,
    /// Also print the JSON report to stdout.
    #[arg(long)]
    print: bool,
}

#[derive(Subcommand)]
enum Sub {
    /// Run whatever command the config names.
    Run(Run),
    Characterize(Run),
    Verify(Run),
    Thicken(Run),
    Thin(Run),
    Realize(Run),
    Interleave(Run),
    Filter(Run),
    PadicDemo(Run),
    Stats(Run),
}

fn main() -> ExitCode {
    let (command, args) = match Cli::parse().command {
        Sub::Run(a) => (None, a),
        Sub::Characterize(a) => (Some(Command::Characterize), a),
        Sub::Verify(a) => (Some(Command::Verify), a),
        Sub::Thicken(a) => (Some(Command::Thicken), a),
        Sub::Thin(a) => (Some(Command::Thin), a),
        Sub::Realize(a) => (Some(Command::Realize), a),
        Sub::Interleave(a) => (Some(Command::Interleave), a),
        Sub::Filter(a) => (Some(Command::Filter), a),
        Sub::PadicDemo(a) => (Some(Command::PadicDemo), a),
        Sub::Stats(a) => (Some(Command::Stats), a),
    };
    match run_file(&args.config, &RunOptions { command, timing: args.timing }) {
        Ok((out, written)) => {
            if args.print {
                print!("{}", out.json);
            }
            for p in written {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
