//! Cross-section generators and the width function `h`.
//!
//! The stretched cross-section is `omega^H = {(y, z) : |y| < h(z) / 2,
//! |z| < H / 2}`, so `h(z)` is the full width of the section at height `z`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Rhombus,
    Ellipse,
    CustomWidth,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Rhombus => "rhombus",
            ProfileKind::Ellipse => "ellipse",
            ProfileKind::CustomWidth => "custom_width",
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rhombus" => Ok(ProfileKind::Rhombus),
            "ellipse" | "disc" | "disk" => Ok(ProfileKind::Ellipse),
            "custom" | "custom_width" => Ok(ProfileKind::CustomWidth),
            other => Err(Error::config(format!("unknown profile kind {other:?}"))),
        }
    }
}

/// Piecewise-linear width table in the normalized height `s = 2|tau| / H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthTable {
    /// Strictly increasing abscissae from 0 to 1.
    pub s: Vec<f64>,
    /// Widths in `[0, 1]`.
    pub width: Vec<f64>,
    /// Exponent of the local behaviour at the maximum, declared by the caller.
    pub alpha: f64,
}

impl WidthTable {
    pub fn new(s: Vec<f64>, width: Vec<f64>, alpha: f64) -> Result<Self> {
        if s.len() < 2 || s.len() != width.len() {
            return Err(Error::domain("width table needs at least two (s, width) pairs"));
        }
        if s[0] != 0.0 || *s.last().unwrap() != 1.0 {
            return Err(Error::domain("width table must span s = 0 to s = 1"));
        }
        if s.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::domain("width table abscissae must increase strictly"));
        }
        if width.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::domain("width table values must lie in [0, 1]"));
        }
        if !(alpha > 0.0) {
            return Err(Error::domain("declared exponent alpha must be positive"));
        }
        Ok(Self { s, width, alpha })
    }

    fn segment(&self, s: f64) -> usize {
        match self.s.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(self.s.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.s.len() - 2),
        }
    }

    fn value(&self, s: f64) -> f64 {
        let i = self.segment(s);
        let t = (s - self.s[i]) / (self.s[i + 1] - self.s[i]);
        self.width[i] + t * (self.width[i + 1] - self.width[i])
    }

    fn slope(&self, s: f64) -> f64 {
        let i = self.segment(s);
        (self.width[i + 1] - self.width[i]) / (self.s[i + 1] - self.s[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionProfile {
    pub kind: ProfileKind,
    /// Elongation `H`.
    pub elongation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<WidthTable>,
}

impl CrossSectionProfile {
    pub fn new(kind: ProfileKind, elongation: f64) -> Result<Self> {
        if kind == ProfileKind::CustomWidth {
            return Err(Error::domain("custom profiles are built with CrossSectionProfile::custom"));
        }
        check_elongation(elongation)?;
        Ok(Self {
            kind,
            elongation,
            table: None,
        })
    }

    pub fn rhombus(elongation: f64) -> Result<Self> {
        Self::new(ProfileKind::Rhombus, elongation)
    }

    pub fn ellipse(elongation: f64) -> Result<Self> {
        Self::new(ProfileKind::Ellipse, elongation)
    }

    pub fn custom(table: WidthTable, elongation: f64) -> Result<Self> {
        check_elongation(elongation)?;
        Ok(Self {
            kind: ProfileKind::CustomWidth,
            elongation,
            table: Some(table),
        })
    }

    pub fn with_elongation(&self, elongation: f64) -> Result<Self> {
        check_elongation(elongation)?;
        Ok(Self {
            elongation,
            ..self.clone()
        })
    }

    pub fn half_height(&self) -> f64 {
        0.5 * self.elongation
    }

    /// Exponent `alpha` of the threshold asymptotics attached to the kind.
    pub fn alpha(&self) -> f64 {
        match self.kind {
            ProfileKind::Rhombus => 2.0 / 3.0,
            ProfileKind::Ellipse => 0.5,
            ProfileKind::CustomWidth => self.table.as_ref().map_or(f64::NAN, |t| t.alpha),
        }
    }

    fn check_range(&self, tau: f64) -> Result<f64> {
        let s = 2.0 * tau.abs() / self.elongation;
        if !(s <= 1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "height {tau} lies outside [-H/2, H/2] for H = {}",
                self.elongation
            )));
        }
        Ok(s.min(1.0))
    }

    /// Width `h(tau)` for `|tau| <= H/2`.
    pub fn width(&self, tau: f64) -> Result<f64> {
        let s = self.check_range(tau)?;
        Ok(self.width_normalized(s))
    }

    /// `dh/dtau`; at `tau = 0` the right derivative for kinked profiles.
    pub fn width_derivative(&self, tau: f64) -> Result<f64> {
        let s = self.check_range(tau)?;
        let sign = if tau < 0.0 { -1.0 } else { 1.0 };
        let ds = 2.0 / self.elongation;
        let d = match self.kind {
            ProfileKind::Rhombus => -1.0,
            ProfileKind::Ellipse => {
                if s >= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    -s / (1.0 - s * s).sqrt()
                }
            }
            ProfileKind::CustomWidth => self.table.as_ref().unwrap().slope(s),
        };
        Ok(sign * ds * d)
    }

    /// Width as a function of the normalized height `s = 2|tau|/H` in `[0, 1]`.
    pub fn width_normalized(&self, s: f64) -> f64 {
        let s = s.abs().min(1.0);
        match self.kind {
            ProfileKind::Rhombus => 1.0 - s,
            ProfileKind::Ellipse => (1.0 - s * s).max(0.0).sqrt(),
            ProfileKind::CustomWidth => self.table.as_ref().unwrap().value(s),
        }
    }

    /// Whether `max h = 1` is attained at `tau = 0` only.
    pub fn unique_maximum_at_center(&self) -> bool {
        match self.kind {
            ProfileKind::Rhombus | ProfileKind::Ellipse => true,
            ProfileKind::CustomWidth => {
                let t = self.table.as_ref().unwrap();
                t.width[0] == 1.0 && t.width[1] < 1.0 && t.width[1..].iter().all(|&w| w < 1.0)
            }
        }
    }

    /// Whether `(y, z)` lies strictly inside the stretched cross-section.
    pub fn section_contains(&self, y: f64, z: f64) -> bool {
        if !(z.abs() < self.half_height()) {
            return false;
        }
        y.abs() < 0.5 * self.width_normalized(2.0 * z / self.elongation)
    }
}

fn check_elongation(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::domain(format!("elongation H must be positive and finite, got {h}")));
    }
    Ok(())
}
