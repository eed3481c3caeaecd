use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dbu::cli::{self, Mode};

#[derive(Parser)]
#[command(name = "dbu", version, about = "Dispersive blow-up studies for Schrodinger equations")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the refinement study for one scenario.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "verify")]
        mode: Mode,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Map feasibility over a (p, s) grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match &args.command {
        Command::Run { config, out, mode, threads } => cli::run(config, out, *mode, *threads),
        Command::Sweep { config, out, threads } => cli::run_sweep(config, out, *threads),
    };
    match result {
        Ok(summary) => {
            for line in &summary.messages {
                println!("{line}");
            }
            ExitCode::from(summary.exit_code as u8)
        }
        Err(err) => {
            let code = err.exit_code();
            let path = match &args.command {
                Command::Run { config, .. } | Command::Sweep { config, .. } => config.display().to_string(),
            };
            eprintln!("error: {:#}", anyhow::Error::new(err).context(path));
            ExitCode::from(code as u8)
        }
    }
}
