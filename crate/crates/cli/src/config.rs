use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use spherelab::transforms::{Preset, SphericalDensity};
use spherelab::verify::Suite;
use spherelab::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Transform,
    Derivative,
    Curvature,
    Lindquist,
    Verify,
    Mesh,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Derivative => "derivative",
            Command::Curvature => "curvature",
            Command::Lindquist => "lindquist",
            Command::Verify => "verify",
            Command::Mesh => "mesh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Derivatives,
    Inversion,
    Convexity,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Derivatives => Suite::Derivatives,
            SuiteArg::Inversion => Suite::Inversion,
            SuiteArg::Convexity => Suite::Convexity,
            SuiteArg::All => Suite::All,
        }
    }
}

/// Transforms, derivatives and curvature of L^p-cosine support functions.
#[derive(Debug, Parser)]
#[command(name = "spherelab", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Ambient dimension n (densities live on S^{n-1}).
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Named density with default parameters.
    #[arg(long, conflicts_with = "density")]
    pub preset: Option<String>,
    /// Density JSON file, or inline JSON starting with '{'.
    #[arg(long)]
    pub density: Option<String>,
    #[arg(long, default_value_t = 32)]
    pub level: usize,
    /// Number of directions for grid-based commands.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    /// Evaluation point, comma separated; may be repeated.
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    pub at: Vec<Vec<f64>>,
    /// Multi-index for `derivative`, comma separated.
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: Option<AlphaArg>,
    /// Tangent vector for `lindquist`.
    #[arg(long, value_parser = parse_tangent, allow_hyphen_values = true)]
    pub x: Option<VectorArg>,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    /// Report path (OBJ path for `mesh`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override the pass tolerance of `derivative`.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

fn parse_vector(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"))).collect()
}

fn parse_tangent(s: &str) -> std::result::Result<VectorArg, String> {
    parse_vector(s).map(VectorArg)
}

fn parse_alpha(s: &str) -> std::result::Result<AlphaArg, String> {
    s.split(',').map(|t| t.trim().parse::<u32>().map_err(|e| format!("'{t}': {e}"))).collect::<std::result::Result<_, _>>().map(AlphaArg)
}

// Newtypes keep clap from reading `Option<Vec<_>>` as a multi-value flag.
#[derive(Debug, Clone)]
pub struct VectorArg(pub Vec<f64>);

#[derive(Debug, Clone)]
pub struct AlphaArg(pub Vec<u32>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum DensitySource {
    /// No density given: commands use the constant density, `verify` uses
    /// each suite's own default.
    Default,
    Preset { name: String },
    File { path: PathBuf },
    Inline { json: serde_json::Value },
}

/// Everything a command needs, validated and serializable into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub density: DensitySource,
    pub dim: usize,
    pub p: Option<f64>,
    pub level: usize,
    pub grid: usize,
    pub at: Vec<Vec<f64>>,
    pub alpha: Option<Vec<u32>>,
    pub x: Option<Vec<f64>>,
    pub suite: Suite,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub tolerance: Option<f64>,
}

impl RunConfig {
    /// Resolves the density source and validates dimensions and ranges.
    /// Returns the loaded density alongside the config.
    pub fn from_cli(cli: Cli) -> Result<(RunConfig, SphericalDensity)> {
        let source = match (cli.preset, cli.density) {
            (_, Some(d)) if d.trim_start().starts_with('{') => DensitySource::Inline {
                json: serde_json::from_str(&d).map_err(|e| Error::InvalidDensity(format!("inline density: {e}")))?,
            },
            (_, Some(d)) => DensitySource::File { path: PathBuf::from(d) },
            (Some(name), None) => DensitySource::Preset { name },
            (None, None) => DensitySource::Default,
        };
        let density = load_density(&source, cli.dim)?;
        let config = RunConfig {
            command: cli.command,
            dim: density.dim(),
            density: source,
            p: cli.p,
            level: cli.level,
            grid: cli.grid,
            at: cli.at,
            alpha: cli.alpha.map(|a| a.0),
            x: cli.x.map(|x| x.0),
            suite: cli.suite.into(),
            out: cli.out,
            seed: cli.seed,
            tolerance: cli.tolerance,
        };
        config.validate()?;
        Ok((config, density))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidDimension(self.dim));
        }
        if self.level == 0 {
            return Err(Error::InvalidLevel(0));
        }
        if let Some(p) = self.p {
            if !p.is_finite() || p < 1.0 {
                return Err(Error::Precondition(format!("p must be a finite number >= 1, got {p}")));
            }
        }
        for x in self.at.iter().chain(self.x.iter()) {
            if x.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
            }
        }
        if let Some(a) = &self.alpha {
            if a.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: a.len() });
            }
        }
        if self.grid == 0 && matches!(self.command, Command::Curvature | Command::Mesh) {
            return Err(Error::Precondition("--grid must be positive".into()));
        }
        if self.command == Command::Mesh && self.dim != 3 {
            return Err(Error::Precondition(format!("mesh needs dim 3, got {}", self.dim)));
        }
        if self.command == Command::Lindquist && self.x.is_some() && self.at.is_empty() {
            return Err(Error::Precondition("--x needs a direction --at".into()));
        }
        Ok(())
    }

    /// `p`, defaulting to 1.
    pub fn p_or_one(&self) -> f64 {
        self.p.unwrap_or(1.0)
    }
}

/// Loads a density. An explicit `dim` must agree with file densities, which
/// carry their own.
pub fn load_density(source: &DensitySource, dim: Option<usize>) -> Result<SphericalDensity> {
    let from_json = |d: SphericalDensity| match dim {
        Some(n) if n != d.dim() => Err(Error::DimensionMismatch { expected: n, got: d.dim() }),
        _ => Ok(d),
    };
    match source {
        DensitySource::Default => SphericalDensity::constant(dim.unwrap_or(3), 1.0),
        DensitySource::Preset { name } => {
            let n = dim.unwrap_or(3);
            if n < 2 {
                return Err(Error::InvalidDimension(n));
            }
            if !Preset::NAMES.contains(&name.as_str()) {
                return Err(Error::InvalidDensity(format!(
                    "unknown preset '{name}' (choose from {})",
                    Preset::NAMES.join(", ")
                )));
            }
            SphericalDensity::named(name, n)
        }
        DensitySource::File { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidDensity(format!("cannot read {}: {e}", path.display())))?;
            from_json(SphericalDensity::from_json(&text)?)
        }
        DensitySource::Inline { json } => from_json(SphericalDensity::from_value(json.clone())?),
    }
}
