use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use mm1ps_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let res = mm1ps_cli::run(&cli, &mut out);
    let flushed = out.flush();
    match res.and(flushed.map_err(Into::into)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
