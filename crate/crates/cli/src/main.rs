use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tabaudit_cli::commands::{self, InjectArgs, RunArgs};
use tabaudit_cli::server;

#[derive(Parser)]
#[command(name = "tabaudit", version, about = "Active-learning error detection for tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a session to the end, answering queries from ground truth.
    Run(RunArgs),
    /// Corrupt a clean table according to an injection plan.
    Inject(InjectArgs),
    /// Serve labeling sessions over HTTP on localhost.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Persist a snapshot of every session here after each change.
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => commands::run(&args).map(|r| {
            eprintln!(
                "labels used: {}; F1 {:.4} (P {:.4}, R {:.4})",
                r.labels_used,
                r.final_f1.unwrap_or(0.0),
                r.final_precision.unwrap_or(0.0),
                r.final_recall.unwrap_or(0.0)
            );
        }),
        Command::Inject(args) => commands::inject(&args).map(|n| eprintln!("corrupted {n} cells")),
        Command::Serve { port, snapshot_dir } => server::serve(port, snapshot_dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
