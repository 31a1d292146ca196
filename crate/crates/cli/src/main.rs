use std::process::ExitCode;

fn main() -> ExitCode {
    loglab::run(std::env::args_os())
}
