//! Run configuration: flat `key = value` text with section prefixes.
//!
//! ```text
//! preset = mgdp-ex2
//! mesh.h = 0.0041
//! mesh.length = 10
//! mesh.t_final = 1
//! wave.1.A = 1.2
//! wave.1.x0 = 4
//! output.dir = out
//! output.snapshots = 0.5, 1
//! ```
//!
//! `#` starts a comment. Model coefficients come either from a preset
//! (`mkdv-ex1`, `mgdp-ex2`, `mgdp-ex3`) or from explicit `model.*` keys
//! (preset `custom`); explicit keys override preset fields.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// One requested wave: amplitude and optional start position
/// (`None` = default geometry, chosen so the wave stays inside the domain).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveConfig {
    pub amplitude: f64,
    pub x0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputConfig {
    /// Output directory; `None` disables all file output.
    pub dir: Option<PathBuf>,
    /// Times at which (x, u) snapshot files are written.
    pub snapshots: Vec<f64>,
    /// Diagnostics CSV row every this many steps (the final row is always
    /// written). 0 keeps only the final row.
    pub cadence: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub model: ModelParams,
    pub length: f64,
    pub h: f64,
    /// `None` selects the default rule `tau = h^2`.
    pub tau: Option<f64>,
    pub t_final: f64,
    pub waves: Vec<WaveConfig>,
    pub output: OutputConfig,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    MkdvEx1,
    MgdpEx2,
    MgdpEx3,
    Custom,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mkdv-ex1" => Ok(Self::MkdvEx1),
            "mgdp-ex2" => Ok(Self::MgdpEx2),
            "mgdp-ex3" => Ok(Self::MgdpEx3),
            "custom" => Ok(Self::Custom),
            other => Err(Error::Config(format!(
                "unknown preset '{other}' (expected mkdv-ex1, mgdp-ex2, mgdp-ex3 or custom)"
            ))),
        }
    }

    pub fn model(self) -> Option<ModelParams> {
        match self {
            Self::MkdvEx1 => Some(ModelParams::mkdv_example1()),
            Self::MgdpEx2 => Some(ModelParams::mgdp_example2()),
            Self::MgdpEx3 => Some(ModelParams::mgdp_example3()),
            Self::Custom => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::MkdvEx1 => "mkdv-ex1",
            Self::MgdpEx2 => "mgdp-ex2",
            Self::MgdpEx3 => "mgdp-ex3",
            Self::Custom => "custom",
        }
    }
}

impl RunConfig {
    /// Baseline config for a preset: L = 10, T = 1, h = 0.01, tau = h^2,
    /// no waves, no file output.
    pub fn preset(preset: Preset) -> Self {
        Self {
            preset,
            model: preset.model().unwrap_or_else(ModelParams::mgdp_example2),
            length: 10.0,
            h: 0.01,
            tau: None,
            t_final: 1.0,
            waves: Vec::new(),
            output: OutputConfig::default(),
            max_iters: 2,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().to_string();
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!("duplicate key '{key}'")));
            }
        }

        let preset = match map.remove("preset") {
            Some(name) => Preset::parse(&name)?,
            None => Preset::Custom,
        };
        let mut cfg = Self::preset(preset);

        let mut take_f64 = |key: &str| -> Result<Option<f64>> {
            match map.remove(key) {
                None => Ok(None),
                Some(v) => v
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| Error::Config(format!("{key}: '{v}' is not a number"))),
            }
        };
        for (field, key) in [
            ("alpha", "model.alpha"),
            ("gamma", "model.gamma"),
            ("c0", "model.c0"),
            ("c1", "model.c1"),
            ("c2", "model.c2"),
            ("c3", "model.c3"),
            ("epsilon", "model.epsilon"),
        ] {
            if let Some(v) = take_f64(key)? {
                match field {
                    "alpha" => cfg.model.alpha = v,
                    "gamma" => cfg.model.gamma = v,
                    "c0" => cfg.model.c0 = v,
                    "c1" => cfg.model.c1 = v,
                    "c2" => cfg.model.c2 = v,
                    "c3" => cfg.model.c3 = v,
                    _ => cfg.model.epsilon = v,
                }
            }
        }
        if let Some(v) = take_f64("mesh.length")? {
            cfg.length = v;
        }
        if let Some(v) = take_f64("mesh.h")? {
            cfg.h = v;
        }
        if let Some(v) = take_f64("mesh.tau")? {
            cfg.tau = Some(v);
        }
        if let Some(v) = take_f64("mesh.t_final")? {
            cfg.t_final = v;
        }
        if let Some(v) = take_f64("run.max_iters")? {
            if v < 1.0 || v.fract() != 0.0 {
                return Err(Error::Config("run.max_iters must be a positive integer".into()));
            }
            cfg.max_iters = v as usize;
        }

        // waves, numbered from 1
        for n in 1.. {
            let a_key = format!("wave.{n}.A");
            let x_key = format!("wave.{n}.x0");
            let a = take_f64(&a_key)?;
            let x0 = take_f64(&x_key)?;
            match a {
                Some(amplitude) => cfg.waves.push(WaveConfig { amplitude, x0 }),
                None if x0.is_some() => {
                    return Err(Error::Config(format!("{x_key} given without {a_key}")))
                }
                None => break,
            }
        }

        if let Some(dir) = map.remove("output.dir") {
            cfg.output.dir = Some(PathBuf::from(dir));
        }
        if let Some(list) = map.remove("output.snapshots") {
            cfg.output.snapshots = list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad snapshot time '{s}'")))
                })
                .collect::<Result<_>>()?;
        }
        if let Some(v) = map.remove("output.cadence") {
            cfg.output.cadence = v
                .parse()
                .map_err(|_| Error::Config(format!("output.cadence: '{v}' is not an integer")))?;
        }

        if let Some((key, _)) = map.into_iter().next() {
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.h <= 0.0 || self.length <= 0.0 || self.t_final <= 0.0 {
            return Err(Error::Config("mesh.h, mesh.length, mesh.t_final must be positive".into()));
        }
        if let Some(tau) = self.tau {
            if tau <= 0.0 || tau > self.t_final {
                return Err(Error::Config("mesh.tau must lie in (0, t_final]".into()));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::Config("run.max_iters must be at least 1".into()));
        }
        for (i, w) in self.waves.iter().enumerate() {
            if w.amplitude == 0.0 {
                return Err(Error::Config(format!("wave.{}.A must be nonzero", i + 1)));
            }
            if let Some(x0) = w.x0 {
                if !(0.0..=self.length).contains(&x0) {
                    return Err(Error::Config(format!(
                        "wave.{}.x0 = {x0} outside [0, {}]",
                        i + 1,
                        self.length
                    )));
                }
            }
        }
        Ok(())
    }
}
