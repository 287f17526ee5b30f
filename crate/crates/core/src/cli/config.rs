//! Run configuration: TOML file merged under command-line overrides, then
//! resolved against per-command defaults and validated.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{CrossSectionProfile, ProfileKind, Sector, WidthTable, DEFAULT_ARM_HALFLENGTH};
use crate::numerics::parse_ratio;
use crate::planar::ThresholdMethod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Planar,
    Section,
    Modes,
    Trials,
    Certify,
    Solve3d,
    Sweep,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Planar => "planar",
            Command::Section => "section",
            Command::Modes => "modes",
            Command::Trials => "trials",
            Command::Certify => "certify",
            Command::Solve3d => "solve3d",
            Command::Sweep => "sweep",
            Command::Report => "report",
        }
    }
}

/// A number written either as a float or as an exact ratio such as `"1/64"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    pub fn value(&self) -> Result<f64> {
        match self {
            Number::Float(v) => Ok(*v),
            Number::Text(s) => parse_ratio(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberList {
    One(Number),
    Many(Vec<Number>),
}

impl NumberList {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            NumberList::One(n) => Ok(vec![n.value()?]),
            NumberList::Many(v) => v.iter().map(Number::value).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidthTableConfig {
    pub s: Vec<f64>,
    pub width: Vec<f64>,
    pub alpha: f64,
}

/// Every key accepted in a config file. All optional; unknown keys are errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub kind: Option<String>,
    #[serde(rename = "H")]
    pub elongation: Option<NumberList>,
    #[serde(rename = "L")]
    pub arm_halflength: Option<Number>,
    pub sector: Option<String>,
    pub spacing: Option<Number>,
    pub spacing_z: Option<Number>,
    pub planar_spacing: Option<Number>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub lambda: Option<Number>,
    pub method: Option<String>,
    pub tolerance: Option<f64>,
    pub coarse_check: Option<bool>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub width_table: Option<WidthTableConfig>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::config(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merged(self, over: ConfigFile) -> ConfigFile {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigFile { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            kind,
            elongation,
            arm_halflength,
            sector,
            spacing,
            spacing_z,
            planar_spacing,
            n,
            k,
            lambda,
            method,
            tolerance,
            coarse_check,
            seed,
            out,
            width_table
        )
    }
}

/// Where `Lambda_Pi` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSource {
    FromPlanar,
    Value(f64),
}

/// Fully resolved configuration. Its canonical JSON, without the output
/// directory, is hashed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub kind: ProfileKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width_table: Option<WidthTable>,
    #[serde(rename = "H")]
    pub elongations: Vec<f64>,
    #[serde(rename = "L")]
    pub arm_halflength: f64,
    pub sector: String,
    pub spacing: f64,
    pub spacing_z: Option<f64>,
    /// Finer of the two spacings of the planar estimate.
    pub planar_spacing: f64,
    pub n: usize,
    pub k: usize,
    pub lambda: LambdaSource,
    pub method: ThresholdMethod,
    pub tolerance: Option<f64>,
    pub coarse_check: bool,
    pub seed: u64,
    #[serde(skip)]
    pub out: PathBuf,
}

pub const DEFAULT_PLANAR_SPACING: f64 = 1.0 / 64.0;

/// Defaults that depend on the command, listed in `--help`.
fn default_elongations(command: Command) -> Vec<f64> {
    match command {
        Command::Section => vec![25.0, 50.0, 100.0, 200.0],
        Command::Trials | Command::Certify => vec![50.0, 100.0, 200.0, 400.0],
        Command::Sweep => vec![1.0, 2.0, 4.0, 8.0],
        _ => vec![1.0],
    }
}

fn default_spacing(command: Command) -> f64 {
    match command {
        Command::Planar => DEFAULT_PLANAR_SPACING,
        Command::Section => 1.0 / 32.0,
        _ => 1.0 / 16.0,
    }
}

fn default_kind(command: Command) -> ProfileKind {
    match command {
        Command::Solve3d => ProfileKind::Ellipse,
        _ => ProfileKind::Rhombus,
    }
}

fn default_n(command: Command) -> usize {
    match command {
        Command::Modes => 5,
        _ => 3,
    }
}

impl RunConfig {
    pub fn resolve(command: Command, file: ConfigFile) -> Result<Self> {
        let kind = match &file.kind {
            Some(k) => k.parse()?,
            None => default_kind(command),
        };
        let width_table = match (&file.width_table, kind) {
            (Some(t), ProfileKind::CustomWidth) => Some(WidthTable::new(t.s.clone(), t.width.clone(), t.alpha)?),
            (None, ProfileKind::CustomWidth) => {
                return Err(Error::config("kind = \"custom\" needs a [width_table] block"));
            }
            (Some(_), _) => return Err(Error::config("width_table is only used with kind = \"custom\"")),
            (None, _) => None,
        };
        let num = |n: &Option<Number>, default: f64| n.as_ref().map_or(Ok(default), Number::value);
        let method = match file.method.as_deref() {
            None | Some("channel") => ThresholdMethod::Channel,
            Some("grid") => ThresholdMethod::Grid,
            Some(other) => return Err(Error::config(format!("unknown threshold method {other:?}"))),
        };
        let lambda = match &file.lambda {
            None => LambdaSource::FromPlanar,
            Some(Number::Text(t)) if t == "from-planar" => LambdaSource::FromPlanar,
            Some(n) => LambdaSource::Value(n.value()?),
        };
        let cfg = RunConfig {
            command,
            kind,
            width_table,
            elongations: match &file.elongation {
                Some(l) => l.values()?,
                None => default_elongations(command),
            },
            arm_halflength: num(&file.arm_halflength, DEFAULT_ARM_HALFLENGTH)?,
            sector: file.sector.clone().unwrap_or_else(|| "all".into()),
            spacing: num(&file.spacing, default_spacing(command))?,
            spacing_z: file.spacing_z.as_ref().map(Number::value).transpose()?,
            planar_spacing: num(&file.planar_spacing, DEFAULT_PLANAR_SPACING)?,
            n: file.n.unwrap_or(default_n(command)),
            k: file.k.unwrap_or(2),
            lambda,
            method,
            tolerance: file.tolerance,
            coarse_check: file.coarse_check.unwrap_or(true),
            seed: file.seed.unwrap_or(3),
            out: file.out.clone().unwrap_or_else(|| PathBuf::from("out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("spacing", self.spacing)?;
        positive("planar_spacing", self.planar_spacing)?;
        positive("L", self.arm_halflength)?;
        if let Some(z) = self.spacing_z {
            positive("spacing_z", z)?;
        }
        if let LambdaSource::Value(v) = self.lambda {
            positive("lambda", v)?;
        }
        if self.elongations.is_empty() {
            return Err(Error::config("H list is empty"));
        }
        for &h in &self.elongations {
            positive("H", h)?;
        }
        if self.n == 0 || self.k == 0 {
            return Err(Error::config("n and k must be at least 1"));
        }
        if self.command == Command::Solve3d && self.elongations.len() != 1 {
            return Err(Error::config("solve3d takes a single H; use sweep for a list"));
        }
        self.sectors()?;
        Ok(())
    }

    pub fn profile(&self, elongation: f64) -> Result<CrossSectionProfile> {
        match &self.width_table {
            Some(t) => CrossSectionProfile::custom(t.clone(), elongation),
            None => CrossSectionProfile::new(self.kind, elongation),
        }
    }

    /// Sectors to solve with their multiplicities; `None` means all ten.
    pub fn sectors(&self) -> Result<Option<Vec<(Sector, usize)>>> {
        if self.sector == "all" {
            return Ok(None);
        }
        let partition = Sector::partition_3d();
        self.sector
            .split(',')
            .map(|name| {
                let s: Sector = name.parse()?;
                let mult = partition.iter().find(|(p, _)| *p == s).map_or(1, |(_, m)| *m);
                Ok((s, mult))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}
