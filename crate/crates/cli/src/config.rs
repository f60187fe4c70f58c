//! Declarative run configuration (TOML). Unknown keys are rejected.

use std::path::Path;

use mpas_core::illumination::WeightField;
use mpas_core::inequality::{BodyFamily, CheckId, SuiteConfig};
use mpas_core::{BodyModel, Exponent};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub rule_size: Option<usize>,
    pub tolerance: Option<f64>,
    pub output: Option<String>,
    pub format: Option<Format>,
    pub compute: Option<ComputeConfig>,
    pub verify: Option<VerifyConfig>,
    pub illuminate: Option<IlluminateConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A number or one of "inf", "-inf".
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ExponentSpec {
    Number(f64),
    Named(InfName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum InfName {
    #[serde(rename = "inf", alias = "+inf")]
    Pos,
    #[serde(rename = "-inf")]
    Neg,
}

impl From<ExponentSpec> for Exponent {
    fn from(e: ExponentSpec) -> Self {
        match e {
            ExponentSpec::Number(p) => Exponent::from(p),
            ExponentSpec::Named(InfName::Pos) => Exponent::PosInf,
            ExponentSpec::Named(InfName::Neg) => Exponent::NegInf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        dim: usize,
        #[serde(default = "one")]
        radius: f64,
    },
    /// K = T B^n, T given row by row.
    Ellipsoid { matrix: Vec<Vec<f64>> },
    EllipsoidDiag { semi_axes: Vec<f64> },
    Trig {
        #[serde(default = "one")]
        a0: f64,
        a: Vec<f64>,
        b: Vec<f64>,
    },
    RoundedSquare { big_radius: f64, corner_radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    LinearImage { matrix: Vec<Vec<f64>>, base: Box<BodySpec> },
    Polar { base: Box<BodySpec> },
}

fn one() -> f64 {
    1.0
}

fn matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Input("matrix must be square and nonempty".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl Functional {
    pub fn name(self) -> String {
        use clap::ValueEnum;
        self.to_possible_value().expect("no skipped variants").get_name().to_owned()
    }
}

impl BodySpec {
    pub fn build(&self) -> Result<BodyModel, CliError> {
        Ok(match self {
            Self::Ball { dim, radius } => BodyModel::ball(*dim, *radius)?,
            Self::Ellipsoid { matrix: m } => BodyModel::ellipsoid(matrix(m)?)?,
            Self::EllipsoidDiag { semi_axes } => BodyModel::ellipsoid_diag(semi_axes)?,
            Self::Trig { a0, a, b } => BodyModel::trig(*a0, a.clone(), b.clone())?,
            Self::RoundedSquare { big_radius, corner_radius } => BodyModel::rounded_square(*big_radius, *corner_radius)?,
            Self::Polygon { vertices } => BodyModel::polygon(vertices.clone())?,
            Self::LinearImage { matrix: m, base } => base.build()?.linear_image(&matrix(m)?)?,
            Self::Polar { base } => base.build()?.polar_body()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant { value: f64 },
    PiecewiseEdge { values: Vec<f64> },
    QuadrantDisk { values: [f64; 4] },
    /// The quadrant weights under which K^{f,1/64} of the unit disk is not convex.
    NonconvexDisk,
    Gp { p: f64 },
    SqrtKappa,
    Mixed { bodies: Vec<BodySpec>, p: f64 },
}

impl WeightSpec {
    pub fn build(&self) -> Result<WeightField, CliError> {
        Ok(match self {
            Self::Constant { value } => WeightField::Constant(*value),
            Self::PiecewiseEdge { values } => WeightField::PiecewiseEdge(values.clone()),
            Self::QuadrantDisk { values } => WeightField::QuadrantDisk(*values),
            Self::NonconvexDisk => WeightField::nonconvex_disk(),
            Self::Gp { p } => WeightField::GpWeight(*p),
            Self::SqrtKappa => WeightField::SqrtKappa,
            Self::Mixed { bodies, p } => WeightField::MixedWeight {
                bodies: bodies.iter().map(BodySpec::build).collect::<Result<_, _>>()?,
                p: *p,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    LpAffine,
    MixedPAffine,
    IthMixed,
    DualMixedVolume,
    DualMixedVolumeI,
    MixedVolume,
    Volume,
    SurfaceArea,
    MixedMinusN,
    IthMixedMinusN,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputeConfig {
    pub functional: Functional,
    pub bodies: Vec<BodySpec>,
    pub p: Option<ExponentSpec>,
    pub i: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    #[default]
    Standard,
    Equality,
    Empty,
}

/// Overrides on top of a preset suite.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub preset: Preset,
    pub checks: Option<Vec<String>>,
    pub families: Option<Vec<BodyFamily>>,
    pub exponents: Option<Vec<ExponentSpec>>,
    pub triples: Option<Vec<[f64; 3]>>,
    pub indices: Option<Vec<f64>>,
}

impl VerifyConfig {
    pub fn suite(&self, seed: u64) -> Result<SuiteConfig, CliError> {
        let mut cfg = match self.preset {
            Preset::Standard => SuiteConfig::standard(seed),
            Preset::Equality => SuiteConfig::equality_cases(seed),
            Preset::Empty => SuiteConfig::empty(seed),
        };
        if let Some(checks) = &self.checks {
            cfg.checks = checks.iter().map(|c| c.parse::<CheckId>()).collect::<Result<_, _>>()?;
        }
        if let Some(f) = &self.families {
            cfg.families = f.clone();
        }
        if let Some(e) = &self.exponents {
            cfg.exponents = e.iter().map(|x| Exponent::from(*x)).collect();
        }
        if let Some(t) = &self.triples {
            cfg.triples = t.clone();
        }
        if let Some(i) = &self.indices {
            cfg.indices = i.clone();
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IlluminateMode {
    #[default]
    Convergence,
    Membership,
    Trace,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IlluminateConfig {
    #[serde(default)]
    pub mode: IlluminateMode,
    pub body: BodySpec,
    pub weight: WeightSpec,
    /// Decreasing s values (convergence) or the s grid (membership, trace).
    pub s: Vec<f64>,
    /// Membership probe points.
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    /// Ray angles for planar traces.
    #[serde(default)]
    pub angles: Vec<f64>,
    /// Monte Carlo samples for the illuminated measure when n >= 3.
    pub measure_samples: Option<usize>,
}
