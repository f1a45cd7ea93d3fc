use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use etl::runner::{self, suite};

#[derive(Parser)]
#[command(name = "etl", version, about = "Ergodic transfer lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one JSON-configured experiment.
    Run {
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a built-in suite: acceptance or smoke.
    Suite {
        name: String,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print the config JSON schema.
    Schema,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let code = match cli.command {
        Command::Run { config, workers, out } => runner::run_file(&config, &out, workers),
        Command::Suite { name, workers, out } => {
            let mut cfg_seed = 0;
            if let Ok(s) = std::env::var(runner::SEED_ENV) {
                match s.trim().parse() {
                    Ok(v) => cfg_seed = v,
                    Err(_) => {
                        eprintln!("etl: {} must be an unsigned integer", runner::SEED_ENV);
                        return ExitCode::from(3);
                    }
                }
            }
            match runner::with_workers(workers, || Ok(suite::emit_suite(&name, &out, cfg_seed))) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("etl: {e}");
                    e.exit_code()
                }
            }
        }
        Command::Schema => {
            println!("{}", runner::schema_json());
            0
        }
    };
    ExitCode::from(code as u8)
}
