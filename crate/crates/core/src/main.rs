use clap::Parser;

use gme_witness::cli::{commands::error_code, run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    };
    std::process::exit(code);
}
