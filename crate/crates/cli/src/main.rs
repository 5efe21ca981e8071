use std::process::ExitCode;

use clap::Parser;

use lstring_cli::{execute, write_outputs, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match write_outputs(&cli, &outcome, &cli.out) {
        Ok(path) => eprintln!("report: {}", path.display()),
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    println!("{}", outcome.summary);
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        eprintln!("verification FAILED");
        ExitCode::from(1)
    }
}
