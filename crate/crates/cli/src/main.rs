use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::Parser;

mod commands;
mod problem;
mod report;
mod suite;

use commands::{run, Command, Flags};

fn command_names() -> Vec<&'static str> {
    Command::ALL.iter().map(|(_, n)| *n).chain(["suite"]).collect()
}

/// Certificates for unique state extensions, excision and peaking in
/// unital subspaces of M_n.
///
/// Exit codes: 0 ran with a positive or informational verdict, 1 negative
/// verdict, 2 input error, 3 solver shortfall.
#[derive(Parser, Debug)]
#[command(name = "peakstate", version)]
struct Cli {
    /// Operation to run; `suite` takes a manifest instead of a problem.
    #[arg(value_parser = PossibleValuesParser::new(command_names()))]
    command: String,
    /// Problem file (JSON), or the manifest for `suite`.
    input: Option<PathBuf>,
    #[command(flatten)]
    flags: Flags,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Do not print the report on stdout.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = if cli.command == "suite" {
        let Some(path) = &cli.input else {
            eprintln!("error: suite needs a manifest path");
            return ExitCode::from(2);
        };
        suite::run_suite(path, &cli.flags)
    } else {
        let cmd = Command::parse(&cli.command).expect("validated by clap");
        match cli.input.as_deref().map(problem::load_problem).transpose() {
            Ok(p) => {
                if let Some(p) = &p {
                    for w in &p.warnings {
                        eprintln!("warning: {w}");
                    }
                }
                run(cmd, Ok(p.as_ref()), &cli.flags)
            }
            Err(e) => run(cmd, Err(e), &cli.flags),
        }
    };
    if let Some(err) = report.get("error") {
        eprintln!("error: {}", err["message"].as_str().unwrap_or("unknown"));
    }
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    if let Some(out) = &cli.out {
        if let Err(e) = std::fs::write(out, format!("{text}\n")) {
            eprintln!("error: cannot write {}: {e}", out.display());
            return ExitCode::from(2);
        }
    }
    if !cli.quiet {
        // a closed pipe (`| head`) is not an error worth reporting
        let _ = writeln!(std::io::stdout().lock(), "{text}");
    }
    ExitCode::from(code as u8)
}
