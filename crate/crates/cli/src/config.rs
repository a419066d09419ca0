//! Command-line flags, the optional TOML config file, and the resolved experiment spec.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rabi_core::fockspace::FockTruncation;
use rabi_core::model::{ModelConfig, ModelKind};
use rabi_core::phasespace::QuadratureGrid;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Couplings used for the phase-space panels when no grid is given.
pub const DEFAULT_WIGNER_COUPLINGS: [f64; 6] = [0.0, 0.5, 1.0, 3.0, 7.0, 10.0];

#[derive(Debug, Parser)]
#[command(
    name = "rabi",
    version,
    about = "Quantum Rabi model with and without the diamagnetic A² term",
    long_about = "Spectra, ground-state Wigner functions and qubit-cavity entanglement of the \
quantum Rabi model (QRM) and the QRM with the diamagnetic term D(a+a†)² (QRMA), \
computed by exact diagonalization in a truncated Fock space. Units: ħ = 1 and all \
frequencies in units of the cavity frequency.\n\n\
Precedence: built-in defaults < --config file < command-line flags."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest energy levels against the coupling g.
    Spectrum(Options),
    /// Ground-state Wigner function of the cavity at each coupling.
    Wigner(Options),
    /// Ground-state qubit entropy (bits) of both models against g.
    Entropy(Options),
    /// Minimal gaps between adjacent levels along a coupling sweep.
    Crossings(Options),
    /// Regenerate the full figure data set.
    ReproducePaper(Options),
}

impl Command {
    pub fn options(&self) -> &Options {
        match self {
            Command::Spectrum(o)
            | Command::Wigner(o)
            | Command::Entropy(o)
            | Command::Crossings(o)
            | Command::ReproducePaper(o) => o,
        }
    }

    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Spectrum(_) => CommandKind::Spectrum,
            Command::Wigner(_) => CommandKind::Wigner,
            Command::Entropy(_) => CommandKind::Entropy,
            Command::Crossings(_) => CommandKind::Crossings,
            Command::ReproducePaper(_) => CommandKind::ReproducePaper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Spectrum,
    Wigner,
    Entropy,
    Crossings,
    ReproducePaper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
    Gnuplot,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// TOML file with any of the options below (snake_case keys)
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Cavity frequency ω_c [default: 1]
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub omega_c: Option<f64>,
    /// Qubit transition frequency ω_0 in units of ω_c [default: 1]
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub omega0: Option<f64>,
    /// First coupling of the uniform g grid [default: 0]
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub g_min: Option<f64>,
    /// Last coupling of the uniform g grid [default: 3]
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub g_max: Option<f64>,
    /// Number of grid points [default: 201]
    #[arg(long, value_name = "N")]
    pub g_steps: Option<usize>,
    /// Explicit comma-separated couplings; replaces the uniform grid
    /// [wigner default: 0,0.5,1,3,7,10]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub g_values: Option<Vec<f64>>,
    /// Fock states kept in the cavity basis [default: 15]
    #[arg(long, value_name = "N")]
    pub nmax: Option<usize>,
    /// Include the diamagnetic term D(a+a†)² [default: off]
    #[arg(long, value_name = "on|off")]
    pub diamagnetic: Option<OnOff>,
    /// Fixed diamagnetic constant D instead of g²/ω_c
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub d_override: Option<f64>,
    /// Levels to report (spectrum: all 2·nmax, crossings: 8)
    #[arg(long, value_name = "K")]
    pub levels: Option<usize>,
    /// Phase-space window [−F, F]² for Wigner grids [default: 6]
    #[arg(long, value_name = "F", allow_negative_numbers = true)]
    pub half_width: Option<f64>,
    /// Points per phase-space axis [default: 201]
    #[arg(long, value_name = "N")]
    pub points: Option<usize>,
    /// Output directory [default: out]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,svg,gnuplot
    /// [default: csv,json,svg; wigner and reproduce-paper add gnuplot]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// Worker threads [default: hardware parallelism]
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Switch {
    Bool(bool),
    Word(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    omega_c: Option<f64>,
    omega0: Option<f64>,
    g_min: Option<f64>,
    g_max: Option<f64>,
    g_steps: Option<usize>,
    g_values: Option<Vec<f64>>,
    nmax: Option<usize>,
    diamagnetic: Option<Switch>,
    d_override: Option<f64>,
    levels: Option<usize>,
    half_width: Option<f64>,
    points: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Vec<Format>>,
    threads: Option<usize>,
}

fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
}

fn parse_switch(s: Switch) -> Result<bool, CliError> {
    match s {
        Switch::Bool(b) => Ok(b),
        Switch::Word(w) => match w.as_str() {
            "on" => Ok(true),
            "off" => Ok(false),
            other => Err(CliError::Config(format!(
                "diamagnetic must be on or off, got {other:?}"
            ))),
        },
    }
}

/// Model parameters shared by all commands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub omega_c: f64,
    pub omega_0: f64,
    pub n_max: usize,
    pub diamagnetic: bool,
    pub d_override: Option<f64>,
}

impl ModelParams {
    pub fn config(&self, g: f64) -> Result<ModelConfig, CliError> {
        let cfg = ModelConfig {
            omega_c: self.omega_c,
            omega_0: self.omega_0,
            g,
            include_diamagnetic: self.diamagnetic,
            d_override: self.d_override,
            trunc: FockTruncation::new(self.n_max).map_err(|e| CliError::Config(e.to_string()))?,
        };
        cfg.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn with(&self, n_max: usize, kind: ModelKind) -> Self {
        Self {
            n_max,
            diamagnetic: kind == ModelKind::Qrma,
            ..*self
        }
    }
}

/// Fully resolved run description; echoed into every artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub command: CommandKind,
    pub model: ModelParams,
    pub g_grid: Vec<f64>,
    pub levels: Option<usize>,
    pub quadrature: QuadratureGrid,
    #[serde(skip)]
    pub out: PathBuf,
    pub formats: Vec<Format>,
    /// `None` means hardware parallelism.
    #[serde(skip)]
    pub threads: Option<usize>,
}

fn uniform_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    let h = (hi - lo) / (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i == steps - 1 {
                hi
            } else {
                lo + h * i as f64
            }
        })
        .collect()
}

impl ExperimentSpec {
    pub fn resolve(command: &Command) -> Result<Self, CliError> {
        let cli = command.options();
        let file = match &cli.config {
            Some(path) => load_config(path)?,
            None => ConfigFile::default(),
        };
        let kind = command.kind();

        let diamagnetic = match (cli.diamagnetic, file.diamagnetic) {
            (Some(v), _) => v == OnOff::On,
            (None, Some(s)) => parse_switch(s)?,
            (None, None) => false,
        };
        let model = ModelParams {
            omega_c: cli.omega_c.or(file.omega_c).unwrap_or(1.0),
            omega_0: cli.omega0.or(file.omega0).unwrap_or(1.0),
            n_max: cli.nmax.or(file.nmax).unwrap_or(15),
            diamagnetic,
            d_override: cli.d_override.or(file.d_override),
        };
        // surfaces invalid physics as a config error up front
        model.config(0.0)?;

        let g_min = cli.g_min.or(file.g_min);
        let g_max = cli.g_max.or(file.g_max);
        let g_steps = cli.g_steps.or(file.g_steps);
        let explicit = cli.g_values.clone().or(file.g_values);
        let g_grid = match explicit {
            Some(values) => values,
            None if kind == CommandKind::Wigner
                && g_min.is_none()
                && g_max.is_none()
                && g_steps.is_none() =>
            {
                DEFAULT_WIGNER_COUPLINGS.to_vec()
            }
            None => {
                let steps = g_steps.unwrap_or(201);
                if steps == 0 {
                    return Err(CliError::Config("g-steps must be >= 1".into()));
                }
                uniform_grid(g_min.unwrap_or(0.0), g_max.unwrap_or(3.0), steps)
            }
        };
        if g_grid.is_empty() {
            return Err(CliError::Config("coupling grid is empty".into()));
        }
        if g_grid.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(CliError::Config("couplings must be finite and >= 0".into()));
        }
        let needs_ascending = matches!(kind, CommandKind::Spectrum | CommandKind::Crossings);
        if needs_ascending && g_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config(
                "coupling grid must be strictly ascending".into(),
            ));
        }

        let levels = cli.levels.or(file.levels);
        if let Some(k) = levels {
            if k == 0 || k > 2 * model.n_max {
                return Err(CliError::Config(format!(
                    "levels must lie in 1..={}, got {k}",
                    2 * model.n_max
                )));
            }
        }

        let half_width = cli.half_width.or(file.half_width).unwrap_or(6.0);
        let points = cli.points.or(file.points).unwrap_or(201);
        let quadrature = QuadratureGrid::square(half_width, points);
        quadrature
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;

        let default_formats: &[Format] = match kind {
            CommandKind::Wigner | CommandKind::ReproducePaper => {
                &[Format::Csv, Format::Json, Format::Svg, Format::Gnuplot]
            }
            CommandKind::Crossings => &[Format::Csv, Format::Json],
            _ => &[Format::Csv, Format::Json, Format::Svg],
        };
        let mut formats = cli
            .format
            .clone()
            .or(file.format)
            .unwrap_or_else(|| default_formats.to_vec());
        formats.sort();
        formats.dedup();
        if formats.is_empty() {
            return Err(CliError::Config(
                "at least one output format is required".into(),
            ));
        }

        let threads = cli.threads.or(file.threads);
        if threads == Some(0) {
            return Err(CliError::Config("threads must be >= 1".into()));
        }

        Ok(Self {
            command: kind,
            model,
            g_grid,
            levels,
            quadrature,
            out: cli
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("out")),
            formats,
            threads,
        })
    }

    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}
