use std::process::ExitCode;

fn main() -> ExitCode {
    hermite_svm::cli::run_cli(std::env::args_os())
}
