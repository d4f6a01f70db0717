use std::process::ExitCode;

fn main() -> ExitCode {
    lively_cli::main_with_args(std::env::args_os())
}
