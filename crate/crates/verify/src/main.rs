use std::process::ExitCode;

fn main() -> ExitCode {
    epr_verify::cli::main_with_args(std::env::args_os())
}
