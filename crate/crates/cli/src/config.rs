//! Run configuration: a TOML document merged with command-line overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use susywalk::experiment::Waveplate;
use susywalk::walk::Frame;

use crate::CliError;

/// An angle given as a bare number (in the field's default unit) or as text
/// with an explicit `rad` or `deg` suffix.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleUnit {
    Radians,
    Degrees,
}

impl AngleValue {
    pub fn to_radians(&self, default: AngleUnit) -> Result<f64, CliError> {
        let (value, unit) = match self {
            AngleValue::Number(x) => (*x, default),
            AngleValue::Text(s) => parse_angle_text(s, default)?,
        };
        let rad = match unit {
            AngleUnit::Radians => value,
            AngleUnit::Degrees => value.to_radians(),
        };
        if !rad.is_finite() {
            return Err(CliError::Config(format!("angle {self:?} is not finite")));
        }
        Ok(rad)
    }

    pub fn to_degrees(&self, default: AngleUnit) -> Result<f64, CliError> {
        Ok(self.to_radians(default)?.to_degrees())
    }
}

fn parse_angle_text(s: &str, default: AngleUnit) -> Result<(f64, AngleUnit), CliError> {
    let t = s.trim();
    let (num, unit) = if let Some(n) = t.strip_suffix("rad") {
        (n, AngleUnit::Radians)
    } else if let Some(n) = t.strip_suffix("deg") {
        (n, AngleUnit::Degrees)
    } else {
        (t, default)
    };
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("cannot parse angle `{s}`")))?;
    Ok((value, unit))
}

impl std::str::FromStr for AngleValue {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_angle_text(s, AngleUnit::Radians)?;
        Ok(AngleValue::Text(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigKind {
    Bulk,
    Interface,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum LatticeSize {
    Sites(usize),
    Auto(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateSpec {
    pub kind: PlateName,
    pub angle: AngleValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlateName {
    Quarter,
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FrameName {
    Lab,
    Primed,
}

impl From<FrameName> for Frame {
    fn from(f: FrameName) -> Self {
        match f {
            FrameName::Lab => Frame::Lab,
            FrameName::Primed => Frame::Primed,
        }
    }
}

/// Contents of a configuration file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub phi1: Option<AngleValue>,
    pub phi2: Option<AngleValue>,
    pub configuration: Option<ConfigKind>,
    /// `"auto"` or an even ring size.
    pub lattice: Option<LatticeSize>,
    pub steps: Option<usize>,
    pub input_site: Option<i64>,
    pub probe: Option<i64>,
    #[serde(default)]
    pub plates: Vec<PlateSpec>,
    pub resolution: Option<usize>,
    pub scan_points: Option<usize>,
    pub long_steps: Option<usize>,
    pub tolerance: Option<f64>,
    pub output: Option<PathBuf>,
    pub frame: Option<FrameName>,
    pub noise: Option<f64>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

/// Command-line values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub phi1: Option<AngleValue>,
    pub phi2: Option<AngleValue>,
    pub steps: Option<usize>,
    pub resolution: Option<usize>,
    pub output: Option<PathBuf>,
    pub frame: Option<FrameName>,
    pub noise: Option<f64>,
    pub seed: Option<u64>,
    pub lattice: Option<usize>,
}

/// Fully resolved settings shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub phi1: f64,
    pub phi2: f64,
    pub configuration: ConfigKind,
    /// `None` means sized automatically.
    pub ring: Option<usize>,
    pub steps: Option<usize>,
    pub input_site: i64,
    pub probe: Option<i64>,
    pub plates: Vec<Waveplate>,
    pub resolution: Option<usize>,
    pub scan_points: usize,
    pub long_steps: usize,
    pub tolerance: Option<f64>,
    pub output: Option<PathBuf>,
    pub frame: Frame,
    pub noise: f64,
    pub seed: u64,
}

pub const DEFAULT_PHI1: f64 = 1.29;
pub const DEFAULT_PHI2: f64 = 0.17;

impl Settings {
    pub fn resolve(file: RunConfig, cli: Overrides) -> Result<Self, CliError> {
        let angle = |v: Option<AngleValue>, default: f64| -> Result<f64, CliError> {
            v.map_or(Ok(default), |a| a.to_radians(AngleUnit::Radians))
        };
        let ring = match (cli.lattice, file.lattice) {
            (Some(n), _) | (None, Some(LatticeSize::Sites(n))) => Some(n),
            (None, Some(LatticeSize::Auto(s))) if s == "auto" => None,
            (None, Some(LatticeSize::Auto(s))) => {
                return Err(CliError::Config(format!(
                    "lattice must be \"auto\" or a site count, got `{s}`"
                )))
            }
            (None, None) => None,
        };
        let plates = file
            .plates
            .iter()
            .map(|p| {
                let deg = p.angle.to_degrees(AngleUnit::Degrees)?;
                Ok(match p.kind {
                    PlateName::Quarter => Waveplate::quarter(deg),
                    PlateName::Half => Waveplate::half(deg),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let noise = cli.noise.or(file.noise).unwrap_or(0.0);
        if !(noise.is_finite() && noise >= 0.0) {
            return Err(CliError::Config(format!("noise must be a non-negative number, got {noise}")));
        }
        if let Some(t) = file.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Config(format!("tolerance must be positive, got {t}")));
            }
        }
        Ok(Self {
            phi1: angle(cli.phi1.or(file.phi1), DEFAULT_PHI1)?,
            phi2: angle(cli.phi2.or(file.phi2), DEFAULT_PHI2)?,
            configuration: file.configuration.unwrap_or(ConfigKind::Interface),
            ring,
            steps: cli.steps.or(file.steps),
            input_site: file.input_site.unwrap_or(susywalk::experiment::INJECTION_SITE),
            probe: file.probe,
            plates,
            resolution: cli.resolution.or(file.resolution),
            scan_points: file.scan_points.unwrap_or(180),
            long_steps: file.long_steps.unwrap_or(100),
            tolerance: file.tolerance,
            output: cli.output.or(file.output),
            frame: cli.frame.or(file.frame).unwrap_or(FrameName::Primed).into(),
            noise,
            seed: cli.seed.or(file.seed).unwrap_or(0),
        })
    }
}
