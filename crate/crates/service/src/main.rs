use std::process::ExitCode;

fn main() -> ExitCode {
    getgoing_service::cli::main(std::env::args_os())
}
