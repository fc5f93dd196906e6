use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use inveul_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let status = match run(&cli, &mut out) {
        Ok(s) => s,
        Err(e) => {
            let _ = out.flush();
            eprintln!("inveul: {e}");
            e.status()
        }
    };
    if out.flush().is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(status as u8)
}
