use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(sasaki_herm::main_with_args(std::env::args_os()))
}
