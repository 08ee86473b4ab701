//! Run configuration: TOML (or JSON) with every unknown key rejected.

use std::path::Path;

use radlab::inequality::{MeasureOptions, ParamSet, TheoremId};
use radlab::potentials::{DerivMethod, Route};
use radlab::{Grid, QuadratureSpec, RadialProfile};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivative: Option<DerivativeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<BallBlock>,
}

/// A profile shape; floats are fine here, nothing is decided at a boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Gaussian { sigma: f64 },
    SmoothBump { center: f64, width: f64 },
    PowerCutoff { exponent: f64, cutoff: f64 },
    Annulus { inner: f64, outer: f64 },
    Constant { value: f64 },
    Zero,
    /// The `k`-th radial Dirichlet eigenfunction; `ball` command only.
    BallMode { k: usize },
}

impl ProfileConfig {
    pub fn build(&self, n: u32) -> radlab::Result<RadialProfile> {
        match *self {
            ProfileConfig::Gaussian { sigma } => RadialProfile::gaussian(n, sigma),
            ProfileConfig::SmoothBump { center, width } => RadialProfile::smooth_bump(n, center, width),
            ProfileConfig::PowerCutoff { exponent, cutoff } => RadialProfile::power_cutoff(n, exponent, cutoff),
            ProfileConfig::Annulus { inner, outer } => RadialProfile::annulus(n, inner, outer),
            ProfileConfig::Constant { value } => RadialProfile::constant(n, value),
            ProfileConfig::Zero => RadialProfile::zero(n),
            ProfileConfig::BallMode { .. } => Err(radlab::Error::Domain { op: "profile", reason: "ball_mode profiles exist only in the ball command".into() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridConfig {
    /// `points` equally spaced values on `[min, max]`; `min` may be 0 for transforms.
    Linear { min: f64, max: f64, points: usize },
    Log { min: f64, max: f64, points: usize },
    Explicit { values: Vec<f64> },
}

impl GridConfig {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let v: Vec<f64> = match self {
            GridConfig::Linear { min, max, points } => {
                if *points < 2 {
                    return Err(CliError::config("grid needs at least two points"));
                }
                (0..*points).map(|i| min + (max - min) * i as f64 / (*points - 1) as f64).collect()
            }
            GridConfig::Log { min, max, points } => Grid::log_uniform(*min, *max, *points).map_err(|e| CliError::config(e.to_string()))?.radii().to_vec(),
            GridConfig::Explicit { values } => values.clone(),
        };
        if v.is_empty() || v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || v.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::config("grid values must be finite, nonnegative and strictly increasing"));
        }
        Ok(v)
    }

    /// As a [`Grid`] of positive radii.
    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::explicit(self.values()?).map_err(|e| CliError::config(format!("{e} (operators need positive radii)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformBlock {
    pub n: u32,
    pub profiles: Vec<ProfileConfig>,
    pub grid: GridConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    Riesz,
    Bessel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialBlock {
    pub n: u32,
    pub operator: Operator,
    pub s: f64,
    #[serde(default = "default_route")]
    pub route: Route,
    pub profiles: Vec<ProfileConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
}

fn default_route() -> Route {
    Route::Ring
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivativeBlock {
    pub n: u32,
    pub s: f64,
    #[serde(default = "default_method")]
    pub method: DerivMethod,
    pub profiles: Vec<ProfileConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
}

fn default_method() -> DerivMethod {
    DerivMethod::Spectral
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyBlock {
    pub runs: Vec<VerifyRun>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureOptions>,
    /// Relative dilation jitter `λ = exp(jitter·U(-1,1))` applied to every
    /// family member; needs a seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamsConfig {
    Text(String),
    Table(ParamSet),
}

impl ParamsConfig {
    pub fn resolve(&self) -> Result<ParamSet, CliError> {
        match self {
            ParamsConfig::Text(t) => ParamSet::parse(t).map_err(|e| CliError::config(e.to_string())),
            ParamsConfig::Table(p) => Ok(p.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyConfig {
    /// `"default"`: the theorem's default verification family.
    Named(String),
    Profiles(Vec<ProfileConfig>),
}

/// Expected verdict, for golden tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub admissible: bool,
    #[serde(default)]
    pub violated: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyRun {
    pub theorem: TheoremId,
    pub params: ParamsConfig,
    /// Measure ratios; `false` gives a verdict-only record.
    #[serde(default = "yes")]
    pub measure: bool,
    #[serde(default = "default_family")]
    pub family: FamilyConfig,
    /// Measure even when the parameters are inadmissible.
    #[serde(default)]
    pub run_anyway: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
    /// Free-form label copied to the record.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn yes() -> bool {
    true
}

fn default_family() -> FamilyConfig {
    FamilyConfig::Named("default".into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallBlock {
    pub n: u32,
    #[serde(default = "unit")]
    pub radius: f64,
    pub modes: usize,
    pub s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub profiles: Vec<ProfileConfig>,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Toml,
    Json,
}

impl RunConfig {
    /// Parses `text`; JSON when it starts with `{`, TOML otherwise.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim_start().starts_with('{') {
            Self::parse_as(text, Format::Json)
        } else {
            Self::parse_as(text, Format::Toml)
        }
    }

    pub fn parse_as(text: &str, format: Format) -> Result<Self, CliError> {
        match format {
            Format::Json => serde_json::from_str(text).map_err(|e| CliError::Config { line: Some(e.line()), column: Some(e.column()), message: e.to_string() }),
            Format::Toml => toml::from_str(text).map_err(|e| {
                let (line, column) = match e.span() {
                    Some(span) => {
                        let (l, c) = line_col(text, span.start);
                        (Some(l), Some(c))
                    }
                    None => (None, None),
                };
                CliError::Config { line, column, message: e.message().to_string() }
            }),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::parse_as(&text, Format::Json),
            Some("toml") => Self::parse_as(&text, Format::Toml),
            _ => Self::parse(&text),
        }
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        self.quadrature.unwrap_or_default()
    }
}

/// 1-based line and column of byte offset `at`.
fn line_col(text: &str, at: usize) -> (usize, usize) {
    let before = &text[..at.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}
