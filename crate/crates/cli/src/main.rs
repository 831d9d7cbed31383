mod config;
mod render;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use refocus::analysis::{offset_sweep, robustness_map, timestep_map, SweepSpec};
use refocus::pulse::{levitt3, simple_pi};
use refocus::reference::{EPS_MAX_LEVITT3, EPS_MAX_SIMPLE, EPS_MAX_TYCKO7};
use refocus::sequence::SequenceExpr;
use refocus::table::{table1, Column};

use crate::config::{Cli, Output, RunConfig, ScaleKind};

/// Writes through a temp file in the target directory, then renames.
fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.path {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let dir = path
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("creating temp file in {}", dir.display()))?;
            tmp.write_all(text.as_bytes())?;
            tmp.persist(path)
                .with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
    }
}

fn run(config: RunConfig) -> Result<()> {
    match config {
        RunConfig::Sweep {
            protocol,
            eps,
            output,
        } => {
            let spec = SweepSpec {
                protocol,
                epsilon: eps,
            };
            let result = offset_sweep(&spec);
            let (text, clamped) = render::sweep(&spec.protocol, &result, output.format);
            if clamped > 0 {
                eprintln!(
                    "note: {clamped} row(s) had infidelity below 1e-15; log10_infidelity clamped to {}",
                    render::LOG10_INFIDELITY_FLOOR
                );
            }
            emit(&output, &text)
        }
        RunConfig::Table1 { tycko, output } => {
            let mut columns = vec![
                Column {
                    pulse: simple_pi(),
                    reference: EPS_MAX_SIMPLE,
                },
                Column {
                    pulse: levitt3(),
                    reference: EPS_MAX_LEVITT3,
                },
            ];
            match tycko {
                Some(pulse) => columns.push(Column {
                    pulse,
                    reference: EPS_MAX_TYCKO7,
                }),
                None => eprintln!("note: 7-pulse column skipped (no --tycko-config given)"),
            }
            let rows = table1(&columns)?;
            emit(&output, &render::table1(&rows, output.format))
        }
        RunConfig::Map {
            protocol,
            eps,
            kind,
            scales,
            output,
        } => {
            let result = match kind {
                ScaleKind::Amplitude => robustness_map(&protocol, &eps, &scales)?,
                ScaleKind::Timestep => timestep_map(&protocol, &eps, &scales)?,
            };
            emit(&output, &render::map(&result, kind, output.format))
        }
        RunConfig::Export { sequence } => {
            let text = sequence.to_text();
            let back = SequenceExpr::from_tokens(&text)?;
            anyhow::ensure!(
                back.tokens() == sequence.tokens(),
                "token text did not round-trip"
            );
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match RunConfig::from_cli(&cli) {
        Ok(c) => c,
        Err(refocus::Error::UnknownSequence(s)) => {
            eprintln!("error: unknown sequence `{s}`");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
