use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use uqp_cli::{execute, Cli, OUT_DIR_ENV};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let code = execute(&cli, out_dir.as_deref(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code)
}
