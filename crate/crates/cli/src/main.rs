use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(chebcert_cli::run_from(std::env::args_os()))
}
