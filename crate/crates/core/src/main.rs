use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use morrey_core::cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(outcome.stdout.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(morrey_core::cli::EXIT_NUMERICAL);
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("morrey: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
