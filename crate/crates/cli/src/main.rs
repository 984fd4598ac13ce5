use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use trackperf_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = run(&cli);
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(4);
    }
    for line in &out.stderr {
        eprintln!("{line}");
    }
    ExitCode::from(out.code as u8)
}
