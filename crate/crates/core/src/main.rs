use std::process::ExitCode;

fn main() -> ExitCode {
    twoended::cli::main_with_args(std::env::args_os())
}
