use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use mgd::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not worth a panic
            let _ = stdout.write_all(out.stdout.as_bytes());
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("mgd: {e}");
            ExitCode::from(e.code)
        }
    }
}
