//! CSV tables with a one-line `#`-prefixed JSON header.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use symgp::rng::SCHEME;

use crate::config::Config;

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip representation, with an exponent for very small or large values.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn nums(vs: &[f64]) -> Vec<String> {
    vs.iter().map(|v| num(*v)).collect()
}

#[derive(Serialize)]
struct Header<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    rng: &'a str,
    config: &'a Config,
}

/// Renders the header line and the CSV body.
pub fn render(command: &str, cfg: &Config, table: &Table) -> Result<Vec<u8>> {
    let header = Header { command, version: env!("CARGO_PKG_VERSION"), seed: cfg.seed, rng: SCHEME, config: cfg };
    let mut buf = Vec::new();
    writeln!(buf, "# {}", serde_json::to_string(&header)?)?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    Ok(buf)
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => match std::io::stdout().write_all(bytes) {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => Ok(r?),
        },
    }
}
