use std::process::ExitCode;

use clap::Parser;
use xmanifold_cli::{configure_threads, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli));
    match result {
        Ok(outcomes) => {
            for o in &outcomes {
                for line in &o.summary {
                    println!("{line}");
                }
                for f in &o.files {
                    println!("wrote {}", f.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
