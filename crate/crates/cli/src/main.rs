use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ctqc_cli::run(std::env::args().collect()))
}
