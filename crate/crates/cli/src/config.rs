use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use refocus::analysis::{Grid, Protocol};
use refocus::pulse::BasePulse;
use refocus::sequence::SequenceExpr;

#[derive(Debug, Parser)]
#[command(
    name = "refocus",
    version,
    about = "Refocussing sequences for off-resonant spin-1/2"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fidelity and error coefficients versus offset.
    Sweep(SweepArgs),
    /// ε_max and error orders for every canonical sequence.
    Table1(Table1Args),
    /// Fidelity over offset × amplitude or timestep scale.
    Map(MapArgs),
    /// Print the P/Q token string of a sequence.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleKind {
    Amplitude,
    Timestep,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    /// Canonical label (2, 4, …, 256) or a P/Q token string.
    #[arg(long)]
    pub sequence: String,
    /// `simple`, `levitt3`, or a path to a pulse config.
    #[arg(long, default_value = "simple")]
    pub pulse: String,
    /// Delay before each base pulse, in units of 1/ν1.
    #[arg(long, default_value_t = 0.0)]
    pub window: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amp_scale: f64,
    #[arg(long, default_value_t = 1.0)]
    pub time_scale: f64,
}

#[derive(Debug, Args)]
pub struct EpsArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 0.005)]
    pub eps_step: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[command(flatten)]
    pub eps: EpsArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Pulse config for the 7-pulse column; the column is skipped without it.
    #[arg(long)]
    pub tycko_config: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    #[command(flatten)]
    pub eps: EpsArgs,
    #[arg(long, value_enum, default_value = "amplitude")]
    pub scale_kind: ScaleKind,
    #[arg(long, default_value_t = 0.8)]
    pub scale_min: f64,
    #[arg(long, default_value_t = 1.2)]
    pub scale_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub scale_step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub sequence: String,
}

/// A fully validated request; nothing is computed until this exists.
#[derive(Debug)]
pub enum RunConfig {
    Sweep {
        protocol: Protocol,
        eps: Grid,
        output: Output,
    },
    Table1 {
        tycko: Option<BasePulse>,
        output: Output,
    },
    Map {
        protocol: Protocol,
        eps: Grid,
        kind: ScaleKind,
        scales: Grid,
        output: Output,
    },
    Export {
        sequence: SequenceExpr,
    },
}

#[derive(Debug, Clone)]
pub struct Output {
    pub format: Format,
    pub path: Option<PathBuf>,
}

impl From<&OutputArgs> for Output {
    fn from(a: &OutputArgs) -> Self {
        Self {
            format: a.format,
            path: a.out.clone(),
        }
    }
}

impl ProtocolArgs {
    fn build(&self) -> refocus::Result<Protocol> {
        let sequence = SequenceExpr::parse(&self.sequence)?;
        let base = BasePulse::resolve(&self.pulse)?;
        Protocol::new(sequence, base)
            .with_window(self.window)?
            .with_amplitude_scale(self.amp_scale)?
            .with_timestep_scale(self.time_scale)
    }
}

impl EpsArgs {
    fn build(&self) -> refocus::Result<Grid> {
        Grid::new(self.eps_min, self.eps_max, self.eps_step)
    }
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> refocus::Result<Self> {
        Ok(match &cli.command {
            Command::Sweep(a) => RunConfig::Sweep {
                protocol: a.protocol.build()?,
                eps: a.eps.build()?,
                output: (&a.output).into(),
            },
            Command::Table1(a) => RunConfig::Table1 {
                tycko: a
                    .tycko_config
                    .as_ref()
                    .map(|p| BasePulse::resolve(&p.to_string_lossy()))
                    .transpose()?,
                output: (&a.output).into(),
            },
            Command::Map(a) => {
                // every scale on the grid must be a valid pulse scaling
                if a.scale_min.is_nan() || a.scale_min <= 0.0 {
                    return Err(refocus::Error::InvalidScale(a.scale_min));
                }
                RunConfig::Map {
                    protocol: a.protocol.build()?,
                    eps: a.eps.build()?,
                    kind: a.scale_kind,
                    scales: Grid::new(a.scale_min, a.scale_max, a.scale_step)?,
                    output: (&a.output).into(),
                }
            }
            Command::Export(a) => RunConfig::Export {
                sequence: SequenceExpr::parse(&a.sequence)?,
            },
        })
    }
}
