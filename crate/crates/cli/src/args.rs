use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rnads_core::{Family, GeometryError, SpacetimeParams};

#[derive(Debug, Parser)]
#[command(
    name = "rnads",
    version,
    about = "Interior geometry of Reissner-Nordstrom-AdS black holes as a warped product"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inner and outer horizons with the extremality margin.
    Horizons(HorizonsArgs),
    /// Tabulate mu = F(r) over the interior.
    Chart(ChartArgs),
    /// Ricci components and scalar curvature on an interior grid or at one radius.
    Curvature(CurvatureArgs),
    /// Run the validation suite and write its JSON report.
    Verify(VerifyArgs),
    /// Compare closed-form curvature before and after dropping a parameter.
    Limits(LimitsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// Family closed forms.
    Closed,
    /// Generic warped-product formulas on chart frames, checked against the closed forms.
    Pipeline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Drop {
    Charge,
    Lambda,
    Both,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Mass m (geometric units).
    #[arg(long, allow_negative_numbers = true)]
    pub mass: f64,
    /// Charge Q; squared internally.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub charge: f64,
    /// AdS radius l, or "inf" for no cosmological constant (the default).
    #[arg(long, value_parser = parse_radius, conflicts_with = "lambda")]
    pub ads_radius: Option<f64>,
    /// AdS curvature 1/l^2 directly.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Truncate the parameters to this family (RNAdS, SchwAdS, RN, Schw).
    #[arg(long)]
    pub family: Option<Family>,
}

impl ParamArgs {
    pub fn params(&self) -> Result<SpacetimeParams, GeometryError> {
        let p = match (self.ads_radius, self.lambda) {
            (Some(l), _) => SpacetimeParams::from_charge_and_radius(self.mass, self.charge, l)?,
            (None, Some(lambda)) => SpacetimeParams::new(self.mass, self.charge * self.charge, lambda)?,
            (None, None) => SpacetimeParams::new(self.mass, self.charge * self.charge, 0.0)?,
        };
        match self.family {
            Some(f) => p.truncate_to(f),
            None => Ok(p),
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HorizonsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ChartArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Table rows, endpoints included.
    #[arg(long, default_value_t = 256, value_parser = parse_samples)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Route::Closed)]
    pub via: Route,
    /// Evaluate at this single interior radius.
    #[arg(long, conflicts_with = "grid")]
    pub at_r: Option<f64>,
    /// Number of interior points, evenly spaced in mu.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..=1_000_000))]
    pub grid: u32,
    /// Also report R_phph at this polar angle.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Chart table size used to place points.
    #[arg(long, default_value_t = 256, value_parser = parse_samples)]
    pub samples: usize,
    /// Tolerance override, e.g. ricci-pipeline-closed-form=1e-6.
    #[arg(long = "tol", value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Families to check; repeat or separate with commas. Defaults to all four.
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<Family>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Tolerance override NAME=VALUE; repeatable.
    #[arg(long = "tol", value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LimitsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Parameter(s) to set to zero.
    #[arg(long, value_enum)]
    pub drop: Drop,
    /// Number of interior radii, evenly spaced over the common interior.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..=1_000_000))]
    pub grid: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_radius(s: &str) -> Result<f64, String> {
    let v = match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => f64::INFINITY,
        other => other.parse::<f64>().map_err(|e| format!("{e}"))?,
    };
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("AdS radius must be positive or \"inf\", got {s}"))
    }
}

fn parse_samples(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < rnads_core::chart::MIN_SAMPLES {
        return Err(format!("at least {} samples are needed", rnads_core::chart::MIN_SAMPLES));
    }
    Ok(n)
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let value: f64 = value.trim().parse().map_err(|e| format!("bad tolerance '{value}': {e}"))?;
    Ok((name.trim().to_string(), value))
}
