use std::process::ExitCode;

fn main() -> ExitCode {
    crosstopic::cli::run()
}
