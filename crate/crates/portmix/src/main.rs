use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(portmix::cli::main_with(std::env::args_os()))
}
