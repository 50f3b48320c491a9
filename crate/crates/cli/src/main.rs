use std::process::ExitCode;

fn main() -> ExitCode {
    streamcount_cli::cli::main(std::env::args_os())
}
