use clap::Parser;
use horse::cli::{execute, Args};

fn main() -> std::process::ExitCode {
    let args = Args::parse();
    std::process::ExitCode::from(execute(&args))
}
