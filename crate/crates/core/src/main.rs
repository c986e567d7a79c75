use std::io::{self, BufWriter};
use std::process::ExitCode;

use clap::Parser;
use stabsim::cli::{self, Cli};

fn main() -> ExitCode {
    let args = Cli::parse();
    let stdin = io::stdin();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli::run(&args, &mut stdin.lock(), &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            drop(out);
            eprintln!("stabsim: {e}");
            ExitCode::FAILURE
        }
    }
}
