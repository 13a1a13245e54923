mod dataset;
mod failure;
mod fetch;
mod generate;
mod main_args;
mod output;
mod partition_spec;
mod run;

use clap::Parser;

use failure::Failure;
use main_args::{Cli, Command};

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Fit(args) => run::run_fit(args),
        Command::Bench(args) => run::run_bench(args),
        Command::Gen(command) => generate::run_gen(command),
        Command::Fetch(args) => fetch::run_fetch(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(failure) = dispatch(&cli) {
        eprintln!("{}", failure.to_json());
        std::process::exit(failure.code);
    }
}
