use std::io::Write;
use std::process::ExitCode;

use tto_cli::{run, Context};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let response = run(&args, Context::from_process());
    let text = response.rendered();
    let mut stdout = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = stdout.write_all(text.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(response.code as u8)
}
