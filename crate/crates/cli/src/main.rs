use std::process::ExitCode;

fn main() -> ExitCode {
    qdq_cli::cli_main()
}
