use clap::Parser;
use zfc::cli::{exit_code_for, run, RunConfig};

fn main() {
    let config = RunConfig::parse();
    match run(config) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code_for(&err));
        }
    }
}
