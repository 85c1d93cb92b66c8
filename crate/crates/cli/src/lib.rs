//! Command-line driver for `sdnse-core`: file formats, configuration,
//! run manifests and the subcommands behind the `sdnse` binary.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when a
//! check ran and failed or the computation aborted.

use std::ffi::OsString;

use clap::Parser;

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod fieldio;
pub mod manifest;

pub use error::{Failure, Outcome};

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match cli::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.exit_code() == 0 { 0 } else { 1 };
        }
    };
    if let Err(e) = init_threads(cli.threads) {
        eprintln!("{e}");
        return e.exit_code();
    }
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn init_threads(threads: Option<usize>) -> Outcome<()> {
    let Some(n) = threads else {
        return Ok(());
    };
    if n == 0 {
        return Err(anyhow::anyhow!("--threads must be at least 1").into());
    }
    // a second call in the same process (tests) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}
