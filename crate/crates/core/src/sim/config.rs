//! Run configuration: `key = value` text, figure defaults and validation.
//!
//! Precedence is figure defaults, then a config file, then command-line
//! flags; each layer is applied through [`RunConfig::set`], so every source
//! accepts exactly the same keys and values.

use crate::error::{Error, Result};
use crate::model::{make_superposition, BathParams, PhysicalConstants, SuperpositionSpec, TimeGrid};
use crate::window::DEFAULT_SUPPORT_FACTOR;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// First line of every file header; marks a file whose header can be fed
/// back as a config.
pub const HEADER_MAGIC: &str = "# modvar";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FigureName {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl FigureName {
    pub const ALL: [FigureName; 4] = [FigureName::Fig1, FigureName::Fig2, FigureName::Fig3, FigureName::Fig4];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig2 => "fig2",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4 => "fig4",
        }
    }
}

impl fmt::Display for FigureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure `{s}` (expected fig1, fig2, fig3 or fig4)")))
    }
}

/// Which dynamics a run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameworkChoice {
    Both,
    Schrodinger,
    Cl,
}

impl FrameworkChoice {
    pub fn includes_schrodinger(&self) -> bool {
        matches!(self, FrameworkChoice::Both | FrameworkChoice::Schrodinger)
    }

    pub fn includes_cl(&self) -> bool {
        matches!(self, FrameworkChoice::Both | FrameworkChoice::Cl)
    }

    fn as_str(&self) -> &'static str {
        match self {
            FrameworkChoice::Both => "both",
            FrameworkChoice::Schrodinger => "schrodinger",
            FrameworkChoice::Cl => "cl",
        }
    }
}

impl FromStr for FrameworkChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(FrameworkChoice::Both),
            "schrodinger" => Ok(FrameworkChoice::Schrodinger),
            "cl" => Ok(FrameworkChoice::Cl),
            _ => Err(Error::Config(format!(
                "unknown framework `{s}` (expected schrodinger, cl or both)"
            ))),
        }
    }
}

/// Everything a figure or window run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub figure: Option<FigureName>,
    pub framework: FrameworkChoice,
    pub mass: f64,
    pub hbar: f64,
    pub boltzmann: f64,
    pub gravity: f64,
    pub gamma: f64,
    pub temperatures: Vec<f64>,
    pub separation: f64,
    pub sigma0: f64,
    pub kick: f64,
    pub alphas: Vec<f64>,
    pub tmax: f64,
    pub samples: usize,
    /// Trajectory starting points, in widths from the left packet centre.
    pub x0_offsets: Vec<f64>,
    pub support_factor: f64,
    pub density_x_min: f64,
    pub density_x_max: f64,
    pub density_points: usize,
    pub density_slices: usize,
    /// Output directory; not part of the echoed header.
    pub out: PathBuf,
}

impl Default for RunConfig {
    /// Reference parameters, unitary limit of the bath, `t ∈ [0, 2]`.
    fn default() -> Self {
        Self {
            figure: None,
            framework: FrameworkChoice::Both,
            mass: 1.0,
            hbar: 1.0,
            boltzmann: 1.0,
            gravity: -3.0,
            gamma: 0.001,
            temperatures: vec![2.0],
            separation: 50.0,
            sigma0: 1.0,
            kick: 0.1,
            alphas: vec![0.0],
            tmax: 2.0,
            samples: 201,
            x0_offsets: vec![0.0],
            support_factor: DEFAULT_SUPPORT_FACTOR,
            density_x_min: -40.0,
            density_x_max: 50.0,
            density_points: 451,
            density_slices: 21,
            out: PathBuf::from("."),
        }
    }
}

/// Keys in header order.
pub const KEYS: [&str; 20] = [
    "figure",
    "framework",
    "mass",
    "hbar",
    "boltzmann",
    "gravity",
    "gamma",
    "temperature",
    "separation",
    "sigma0",
    "kick",
    "alpha",
    "tmax",
    "samples",
    "x0_offset",
    "support_factor",
    "density_x_min",
    "density_x_max",
    "density_points",
    "density_slices",
];

impl RunConfig {
    /// Built-in defaults for a figure.
    pub fn for_figure(name: FigureName) -> Self {
        let base = RunConfig {
            figure: Some(name),
            ..RunConfig::default()
        };
        match name {
            FigureName::Fig1 => RunConfig {
                gamma: 0.1,
                temperatures: vec![10.0],
                x0_offsets: (-4..=4).map(f64::from).collect(),
                ..base
            },
            FigureName::Fig2 => RunConfig {
                gamma: 0.001,
                temperatures: vec![2.0],
                alphas: vec![std::f64::consts::FRAC_PI_4],
                x0_offsets: vec![-2.0, 0.0, 2.0],
                ..base
            },
            FigureName::Fig3 => RunConfig {
                gamma: 0.001,
                temperatures: vec![2.0, 5.0],
                alphas: vec![
                    0.0,
                    std::f64::consts::FRAC_PI_4,
                    std::f64::consts::FRAC_PI_2,
                    std::f64::consts::PI,
                ],
                ..base
            },
            FigureName::Fig4 => RunConfig {
                framework: FrameworkChoice::Cl,
                gamma: 0.005,
                temperatures: vec![2.0, 5.0, 15.0],
                alphas: vec![0.0, std::f64::consts::FRAC_PI_2],
                ..base
            },
        }
    }

    /// Apply one `key = value` pair. `out` is accepted too.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "figure" => self.figure = if value == "none" { None } else { Some(value.parse()?) },
            "framework" => self.framework = value.parse()?,
            "mass" => self.mass = number(key, value)?,
            "hbar" => self.hbar = number(key, value)?,
            "boltzmann" => self.boltzmann = number(key, value)?,
            "gravity" => self.gravity = number(key, value)?,
            "gamma" => self.gamma = number(key, value)?,
            "temperature" => self.temperatures = list(key, value)?,
            "separation" => self.separation = number(key, value)?,
            "sigma0" => self.sigma0 = number(key, value)?,
            "kick" => self.kick = number(key, value)?,
            "alpha" => self.alphas = list(key, value)?,
            "tmax" => self.tmax = number(key, value)?,
            "samples" => self.samples = count(key, value)?,
            "x0_offset" => self.x0_offsets = list(key, value)?,
            "support_factor" => self.support_factor = number(key, value)?,
            "density_x_min" => self.density_x_min = number(key, value)?,
            "density_x_max" => self.density_x_max = number(key, value)?,
            "density_points" => self.density_points = count(key, value)?,
            "density_slices" => self.density_slices = count(key, value)?,
            "out" => self.out = PathBuf::from(value),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Apply a config text: `key = value` lines, `#` comments, blank lines.
    ///
    /// A file starting with [`HEADER_MAGIC`] is read as an output header
    /// instead, so an emitted CSV can be fed back to reproduce itself.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        if text.starts_with(HEADER_MAGIC) {
            return self.apply_header(text);
        }
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", n + 1)))?;
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {}", n + 1, strip_prefix(&e))))?;
        }
        Ok(())
    }

    fn apply_header(&mut self, text: &str) -> Result<()> {
        let mut seen = false;
        for line in text.lines() {
            let Some(body) = line.strip_prefix('#') else { break };
            let Some(pair) = body.trim().strip_prefix("config ") else {
                continue;
            };
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("malformed header line `{line}`")))?;
            self.set(key, value)?;
            seen = true;
        }
        if seen {
            Ok(())
        } else {
            Err(Error::Config("header carries no `config` lines".into()))
        }
    }

    /// Resolved configuration as `key = value` lines, in [`KEYS`] order.
    /// Floats use the shortest representation that parses back exactly.
    pub fn echo(&self) -> Vec<String> {
        KEYS.iter().map(|k| format!("{k} = {}", self.value_of(k))).collect()
    }

    fn value_of(&self, key: &str) -> String {
        let join = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", ");
        match key {
            "figure" => self.figure.map_or_else(|| "none".into(), |f| f.to_string()),
            "framework" => self.framework.as_str().into(),
            "mass" => fmt_f64(self.mass),
            "hbar" => fmt_f64(self.hbar),
            "boltzmann" => fmt_f64(self.boltzmann),
            "gravity" => fmt_f64(self.gravity),
            "gamma" => fmt_f64(self.gamma),
            "temperature" => join(&self.temperatures),
            "separation" => fmt_f64(self.separation),
            "sigma0" => fmt_f64(self.sigma0),
            "kick" => fmt_f64(self.kick),
            "alpha" => join(&self.alphas),
            "tmax" => fmt_f64(self.tmax),
            "samples" => self.samples.to_string(),
            "x0_offset" => join(&self.x0_offsets),
            "support_factor" => fmt_f64(self.support_factor),
            "density_x_min" => fmt_f64(self.density_x_min),
            "density_x_max" => fmt_f64(self.density_x_max),
            "density_points" => self.density_points.to_string(),
            "density_slices" => self.density_slices.to_string(),
            _ => unreachable!("every key in KEYS is handled"),
        }
    }

    pub fn constants(&self) -> Result<PhysicalConstants> {
        PhysicalConstants::new(self.mass, self.hbar, self.boltzmann, self.gravity).map_err(config)
    }

    pub fn superposition(&self, alpha: f64) -> Result<SuperpositionSpec> {
        make_superposition(self.separation, self.sigma0, self.kick, alpha, &self.constants()?).map_err(config)
    }

    pub fn bath(&self, temperature: f64) -> Result<BathParams> {
        BathParams::new(&self.constants()?, self.gamma, temperature).map_err(config)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(0.0, self.tmax, self.samples).map_err(config)
    }

    /// Check every parameter before any computation starts.
    pub fn validate(&self) -> Result<()> {
        self.constants()?;
        for &a in &self.alphas {
            self.superposition(a)?;
        }
        for &t in &self.temperatures {
            self.bath(t)?;
        }
        self.time_grid()?;
        let need = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::Config(msg.into())) };
        need(self.tmax > 0.0, "tmax must be positive")?;
        need(!self.alphas.is_empty(), "alpha list is empty")?;
        need(!self.temperatures.is_empty(), "temperature list is empty")?;
        need(!self.x0_offsets.is_empty(), "x0_offset list is empty")?;
        need(
            self.x0_offsets.iter().all(|x| x.is_finite()),
            "x0_offset must be finite",
        )?;
        need(
            self.support_factor.is_finite() && self.support_factor > 0.0,
            "support_factor must be positive",
        )?;
        need(
            self.density_x_min.is_finite() && self.density_x_max.is_finite() && self.density_x_min < self.density_x_max,
            "need density_x_min < density_x_max",
        )?;
        need(self.density_points >= 2, "density_points must be at least 2")?;
        need(self.density_slices >= 2, "density_slices must be at least 2")?;
        if self.figure == Some(FigureName::Fig4) && !self.framework.includes_cl() {
            return Err(Error::Config(
                "fig4 is a bath-coupled quantity; framework must be cl".into(),
            ));
        }
        Ok(())
    }
}

fn config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

/// Shortest round-trip representation, always with a decimal point or
/// exponent so it reads as a float.
pub fn fmt_f64(x: f64) -> String {
    let s = format!("{x:?}");
    if s == "-0.0" {
        "0.0".into()
    } else {
        s
    }
}

/// A float, or a multiple of π written `pi`, `pi/4`, `3pi/4`, `-pi/2`.
pub fn parse_number(value: &str) -> Option<f64> {
    let v = value.trim();
    if let Ok(x) = v.parse::<f64>() {
        return x.is_finite().then_some(x);
    }
    let (sign, body) = match v.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, v),
    };
    let (numerator, denominator) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().ok()?),
        None => (body, 1.0),
    };
    let factor = numerator.strip_suffix("pi")?.trim();
    let factor = if factor.is_empty() {
        1.0
    } else {
        factor.parse::<f64>().ok()?
    };
    let x = sign * factor * std::f64::consts::PI / denominator;
    x.is_finite().then_some(x)
}

fn number(key: &str, value: &str) -> Result<f64> {
    parse_number(value).ok_or_else(|| Error::Config(format!("`{}`: `{value}` is not a finite number", key.trim())))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| number(key, v)).collect()
}

fn count(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("`{}`: `{value}` is not a non-negative integer", key.trim())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn pi_multiples() {
        assert_eq!(parse_number("pi/4"), Some(FRAC_PI_4));
        assert_eq!(parse_number("-pi/2"), Some(-FRAC_PI_2));
        assert_eq!(parse_number("3pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_number("pi"), Some(PI));
        assert_eq!(parse_number("1e-3"), Some(1e-3));
        assert_eq!(parse_number("inf"), None);
        assert_eq!(parse_number("tau"), None);
    }

    #[test]
    fn unknown_key_rejected() {
        let mut c = RunConfig::default();
        let err = c.apply_text("gamma = 0.2\nbeta = 1\n").unwrap_err();
        assert!(
            err.to_string().contains("line 2") && err.to_string().contains("beta"),
            "{err}"
        );
        assert!(c.set("gamma", "fast").is_err());
        assert!(c.apply_text("gamma 0.2").is_err());
    }

    #[test]
    fn comments_and_lists() {
        let mut c = RunConfig::for_figure(FigureName::Fig3);
        c.apply_text("# comment\n\ntemperature = 2, 5, 15  # three\nalpha = 0, pi/2\n")
            .unwrap();
        assert_eq!(c.temperatures, vec![2.0, 5.0, 15.0]);
        assert_eq!(c.alphas, vec![0.0, FRAC_PI_2]);
    }

    #[test]
    fn echo_round_trips() {
        for name in FigureName::ALL {
            let mut c = RunConfig::for_figure(name);
            c.gamma = 0.1 + 0.2;
            let header: String = std::iter::once(HEADER_MAGIC.to_string())
                .chain(c.echo().iter().map(|l| format!("# config {l}")))
                .map(|l| l + "\n")
                .collect();
            let mut back = RunConfig::default();
            back.apply_text(&header).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn validation() {
        for name in FigureName::ALL {
            RunConfig::for_figure(name).validate().unwrap();
        }
        let bad = [
            ("gamma", "-1"),
            ("sigma0", "0"),
            ("samples", "1"),
            ("tmax", "0"),
            ("density_points", "1"),
            ("temperature", "-2"),
        ];
        for (k, v) in bad {
            let mut c = RunConfig::for_figure(FigureName::Fig2);
            c.set(k, v).unwrap();
            let err = c.validate().unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{k}: {err}");
        }
        let mut c = RunConfig::for_figure(FigureName::Fig4);
        c.set("framework", "schrodinger").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn figure_defaults() {
        let f2 = RunConfig::for_figure(FigureName::Fig2);
        assert_eq!((f2.gamma, f2.temperatures.as_slice()), (0.001, &[2.0][..]));
        assert_eq!(f2.x0_offsets, vec![-2.0, 0.0, 2.0]);
        let f4 = RunConfig::for_figure(FigureName::Fig4);
        assert_eq!(f4.temperatures, vec![2.0, 5.0, 15.0]);
        assert_eq!(RunConfig::for_figure(FigureName::Fig1).x0_offsets.len(), 9);
    }
}
