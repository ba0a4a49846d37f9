use clap::Parser;

use ddphase::cli::{exit_code, run, Cli, EXIT_OK};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&outcome.result).expect("serialisable result")
            );
            eprintln!("manifest: {}", outcome.manifest.display());
            std::process::exit(EXIT_OK);
        }
        Err(err) => {
            eprintln!("ddphase: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}
