// SPDX-License-Identifier: MIT OR Apache-2.0

use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = strongseg::cli::main_with(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
