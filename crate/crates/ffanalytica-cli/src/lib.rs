//! Batch driver for ffanalytica: validated configs in, CSV or JSON tables out.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod fnspec;
pub mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

pub use config::{Cli, Command, ExperimentConfig, Format};
pub use error::{CliError, Result};
pub use output::Report;

/// Runs the command inside a pool of the configured size.
pub fn execute(cfg: &ExperimentConfig) -> Result<Report> {
    ffanalytica::par::with_threads(cfg.threads, || commands::execute(cfg))
}

fn residual_path(cfg: &ExperimentConfig) -> Option<std::path::PathBuf> {
    cfg.params.out.as_ref().map(|p| {
        let mut s = p.as_os_str().to_owned();
        s.push(".residuals.json");
        s.into()
    })
}

/// Executes, writes the artifacts and surfaces any deferred failure.
pub fn run(cfg: &ExperimentConfig) -> Result<()> {
    let start = Instant::now();
    let mut report = execute(cfg)?;
    let runtime = start.elapsed().as_secs_f64();
    match (cfg.params.format, &cfg.params.out) {
        (Format::Csv, Some(path)) => {
            report.table.write_csv(BufWriter::new(File::create(path)?))?;
            let mut w = BufWriter::new(File::create(output::schema_path(path))?);
            serde_json::to_writer_pretty(&mut w, &report.schema())?;
            writeln!(w)?;
            eprintln!("{}: {} rows in {runtime:.3}s", report.command, report.table.rows.len());
        }
        (Format::Csv, None) => report.table.write_csv(std::io::stdout().lock())?,
        (Format::Json, out) => {
            let body = serde_json::to_string_pretty(&report.json(runtime))? + "\n";
            match out {
                Some(path) => std::fs::write(path, body)?,
                None => std::io::stdout().lock().write_all(body.as_bytes())?,
            }
        }
    }
    if let Some(err) = report.failure.take() {
        if let CliError::Numeric { dump, .. } = &err {
            let text = serde_json::to_string_pretty(dump)?;
            match residual_path(cfg) {
                Some(p) => std::fs::write(p, text + "\n")?,
                None => eprintln!("{text}"),
            }
        }
        return Err(err);
    }
    Ok(())
}
