use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(memchan::cli::main_with_args(std::env::args_os()) as u8)
}
