//! Run configuration: one JSON document, flags override keys.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use thiserror::Error;
use vortex_spike::strip::{GridError, StripGrid};

pub const DELTA_RANGE: (f64, f64) = (0.2, 0.6);

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Largest step in both directions when the sizes are derived from δ.
    pub step: f64,
    /// Explicit half-length, Nx and interior Ny; all three or none.
    pub lx: Option<f64>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { step: 0.0625, lx: None, nx: None, ny: None }
    }
}

impl GridConfig {
    pub fn grid(&self, delta: f64) -> Result<StripGrid, GridError> {
        match (self.lx, self.nx, self.ny) {
            (Some(lx), Some(nx), Some(ny)) => StripGrid::new(delta, lx, nx, ny),
            _ => StripGrid::standard(delta, self.step),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Bisection width on U(0).
    pub shoot: f64,
    /// Relative MINRES residual of the inner solves.
    pub solve: f64,
    /// Relative eigen-residual.
    pub eigen: f64,
    /// Relative Picard update of the fixed point.
    pub fixed_point: f64,
    /// Final bracket width in τ.
    pub tau: f64,
    /// Bracket width at which b and b̃ must both change sign.
    pub coincidence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { shoot: 1e-13, solve: 1e-11, eigen: 1e-11, fixed_point: 1e-12, tau: 1e-12, coincidence: 1e-6 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub p: u32,
    pub g: f64,
    pub alpha: f64,
    pub delta: f64,
    pub delta_list: Vec<f64>,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    /// C in Γ̌ₛ = (C/δ)Γₛ.
    pub rescale: f64,
    /// Anderson depth of the fixed point.
    pub mixing: usize,
    pub max_fixed_point: usize,
    /// First half-width of the τ bracket.
    pub tau_hint: f64,
    /// Grid levels of the physical pushforward.
    pub levels: usize,
    /// Worker threads (0: all cores).
    pub threads: usize,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 2,
            g: 1.0,
            alpha: 1.0,
            delta: 0.35,
            delta_list: vec![0.2, 0.225, 0.25, 0.275, 0.3, 0.325, 0.35],
            grid: GridConfig::default(),
            tolerances: Tolerances::default(),
            rescale: 10.0,
            mixing: 5,
            max_fixed_point: 80,
            tau_hint: 0.03,
            levels: 128,
            threads: 0,
            out: PathBuf::from("out"),
        }
    }
}

/// Flag overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub delta: Option<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, over: &Overrides) -> Result<(RunConfig, Vec<String>), ConfigError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read { path: p.to_path_buf(), source })?;
                serde_json::from_str(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(d) = over.delta {
            cfg.delta = d;
        }
        if let Some(o) = &over.out {
            cfg.out = o.clone();
        }
        if let Some(t) = over.threads {
            cfg.threads = t;
        }
        let warnings = cfg.validate()?;
        Ok((cfg, warnings))
    }

    /// Hard errors for unusable values; warnings for δ outside [0.2, 0.6].
    pub fn validate(&self) -> Result<Vec<String>, ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let t = &self.tolerances;
        for (name, v) in [("shoot", t.shoot), ("solve", t.solve), ("eigen", t.eigen), ("fixed_point", t.fixed_point), ("tau", t.tau), ("coincidence", t.coincidence)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if self.p == 0 {
            return bad("p must be at least 1".into());
        }
        if !(self.g > 0.0 && self.alpha > 0.0) {
            return bad(format!("g and alpha must be positive, got {} and {}", self.g, self.alpha));
        }
        if !(self.rescale > 0.0) {
            return bad(format!("rescale must be positive, got {}", self.rescale));
        }
        if !(self.tau_hint > 0.0 && self.tau_hint <= 0.3) {
            return bad(format!("tau_hint must lie in (0, 0.3], got {}", self.tau_hint));
        }
        let g = &self.grid;
        let explicit = [g.lx.is_some(), g.nx.is_some(), g.ny.is_some()];
        if explicit.contains(&true) && explicit.contains(&false) {
            return bad("grid lx, nx and ny must be given together".into());
        }
        if !(g.step > 0.0 && g.step <= 0.25) {
            return bad(format!("grid step must lie in (0, 0.25], got {}", g.step));
        }
        if self.levels < 4 || self.max_fixed_point == 0 {
            return bad("levels must be at least 4 and max_fixed_point positive".into());
        }
        let mut warnings = Vec::new();
        for &d in std::iter::once(&self.delta).chain(&self.delta_list) {
            if !(d > 0.0 && d < 1.0) {
                return bad(format!("delta must lie in (0, 1), got {d}"));
            }
            if let Err(e) = self.grid.grid(d) {
                return bad(format!("grid at delta {d}: {e}"));
            }
            if d < DELTA_RANGE.0 || d > DELTA_RANGE.1 {
                warnings.push(format!("delta {d} outside [{}, {}]", DELTA_RANGE.0, DELTA_RANGE.1));
            }
        }
        Ok(warnings)
    }

    /// SHA-256 of the canonical JSON without the output directory and
    /// thread count, hex.
    pub fn hash(&self) -> String {
        let key = RunConfig { out: PathBuf::new(), threads: 0, ..self.clone() };
        let text = serde_json::to_string(&key).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Same run at another δ.
    pub fn at_delta(&self, delta: f64) -> RunConfig {
        RunConfig { delta, ..self.clone() }
    }
}
