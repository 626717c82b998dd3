use std::process::ExitCode;

use clap::Parser;
use factorboot_cli::args::Cli;

fn main() -> ExitCode {
    factorboot_cli::main_with(Cli::parse())
}
