use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use crate::cli::{Command, NseAction, TestfnsAction};
use crate::error::Outcome;

pub mod monitor;
pub mod nse;
pub mod pipeline;
pub mod sdnorm;
pub mod testfns;
pub mod verify;

pub fn dispatch(command: Command) -> Outcome<()> {
    match command {
        Command::Testfns {
            action: TestfnsAction::Dump(args),
        } => testfns::dump(&args),
        Command::Sdnorm(args) => sdnorm::run(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Nse {
            action: NseAction::Run(args),
        } => nse::run(&args),
        Command::Monitor(args) => monitor::run(&args),
        Command::Pipeline(args) => pipeline::run(&args),
    }
}

/// Pretty JSON to `out`, or to stdout when no path is given.
pub fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Outcome<()> {
    let text = serde_json::to_string_pretty(value).context("cannot serialize report")? + "\n";
    match out {
        Some(path) => {
            std::fs::write(path, text)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}
