use std::fs;
use std::process::ExitCode;

use clap::Parser;
use toricity_cli::{emit, exit_code, run_batch, Args};

fn main() -> ExitCode {
    let args = Args::parse();
    let config = args.config();
    let paths = match args.inputs() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let rows = run_batch(&paths, &config);
    for r in &rows {
        if let Some(msg) = &r.error {
            eprintln!("error: {}: {msg}", r.model);
        }
    }
    let text = emit(&rows, config.format);
    match &args.output {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(exit_code(&rows) as u8)
}
