//! JSONL records go to `--out` or stdout; summaries go to stderr afterwards.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

pub struct Jsonl {
    w: Box<dyn Write>,
}

impl Jsonl {
    pub fn open(out: Option<&Path>) -> Result<Self, CliError> {
        let w: Box<dyn Write> = match out {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
            )),
            None => Box::new(BufWriter::new(std::io::stdout().lock())),
        };
        Ok(Jsonl { w })
    }

    pub fn emit<T: Serialize>(&mut self, item: &T) -> Result<(), CliError> {
        serde_json::to_writer(&mut self.w, item).map_err(|e| CliError::Config(format!("cannot write output: {e}")))?;
        self.w
            .write_all(b"\n")
            .map_err(|e| CliError::Config(format!("cannot write output: {e}")))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.w
            .flush()
            .map_err(|e| CliError::Config(format!("cannot write output: {e}")))
    }
}
