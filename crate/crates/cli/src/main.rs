use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wavelab::{load, registry, run_config, Overrides};

#[derive(Parser)]
#[command(name = "wavelab", version, about = "Boundary-control wave experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory (overrides output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed (overrides model.seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List registered experiments.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", registry::listing());
            ExitCode::SUCCESS
        }
        Command::Run { config, out, seed, threads } => {
            let overrides = Overrides { out, seed, threads };
            let result = load(&config, &overrides).and_then(|cfg| run_config(&cfg, threads));
            match result {
                Ok(summary) => {
                    for v in summary.report["verdicts"].as_array().into_iter().flatten() {
                        let mark = if v["pass"].as_bool() == Some(true) { "pass" } else { "FAIL" };
                        println!("{mark}  {}", v["check"].as_str().unwrap_or(""));
                    }
                    println!("report: {}", summary.dir.join("report.json").display());
                    println!("hash: {}", summary.report["results_hash"].as_str().unwrap_or(""));
                    if summary.all_pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("wavelab: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
