use std::process::ExitCode;

use qudit_tomo::cli;

fn main() -> ExitCode {
    let invocation = match cli::parse_config(std::env::args_os().skip(1)) {
        Ok(inv) => inv,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return ExitCode::from(code as u8);
        }
    };
    match cli::execute(&invocation) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
