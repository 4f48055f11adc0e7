use std::io::Write;

use clap::Parser;
use slantsub::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let run = execute(&cli);
    print!("{}", run.stdout);
    eprint!("{}", run.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(run.code);
}
