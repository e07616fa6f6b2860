//! Model constants and the flat `key = value` parameter file.

use std::path::Path;

use crate::error::{Error, Result};

/// Kinetic and geometric constants of the mRNA/protein system on the unit interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Transcription rate.
    pub alpha_m: f64,
    /// Translation rate.
    pub alpha_p: f64,
    /// Common linear decay rate of mRNA and protein.
    pub mu: f64,
    /// Hill coefficient.
    pub h: u32,
    /// Nuclear membrane position; translation happens on `[l, 1]`.
    pub l: f64,
    /// Centre of the gene site.
    pub x_m: f64,
    /// Half-width of the regularised Dirac source.
    pub epsilon: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            alpha_m: 1.0,
            alpha_p: 2.0,
            mu: 0.03,
            h: 5,
            l: 0.5,
            x_m: 0.1,
            epsilon: 1e-3,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha_m", self.alpha_m), ("alpha_p", self.alpha_p)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::Config(format!("mu must be positive, got {}", self.mu)));
        }
        if self.h < 1 {
            return Err(Error::Config("Hill coefficient h must be >= 1".into()));
        }
        if !(self.x_m > 0.0 && self.x_m < self.l && self.l < 1.0) {
            return Err(Error::Config(format!(
                "geometry requires 0 < x_M < l < 1, got x_M = {}, l = {}",
                self.x_m, self.l
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < self.x_m.min(self.l - self.x_m)) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, min(x_M, l - x_M)), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Upper bound of the mRNA invariant region for a source of peak height `delta_max`.
    pub fn mrna_bound(&self, delta_max: f64) -> f64 {
        self.alpha_m * delta_max / self.mu
    }

    /// Upper bound of the protein invariant region for a source of peak height `delta_max`.
    pub fn protein_bound(&self, delta_max: f64) -> f64 {
        self.alpha_m * self.alpha_p * delta_max / (self.mu * self.mu)
    }
}

/// Admissible diffusion coefficients together with the current value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionRange {
    pub d1: f64,
    pub d2: f64,
    pub d: f64,
}

impl Default for DiffusionRange {
    fn default() -> Self {
        Self {
            d1: 1e-7,
            d2: 0.1,
            d: 1e-3,
        }
    }
}

impl DiffusionRange {
    pub fn new(d1: f64, d2: f64, d: f64) -> Result<Self> {
        if !(d1 > 0.0 && d1 <= d && d <= d2) {
            return Err(Error::Config(format!(
                "diffusion range requires 0 < d1 <= D <= d2, got d1={d1}, D={d}, d2={d2}"
            )));
        }
        Ok(Self { d1, d2, d })
    }

    pub fn contains(&self, d: f64) -> bool {
        d >= self.d1 && d <= self.d2
    }
}

/// Result of reading a parameter file: model constants plus an optional diffusion coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParamFile {
    pub params: ModelParams,
    pub diffusion: Option<f64>,
}

impl ParamFile {
    /// Parses `key = value` lines. `#` starts a comment; blank lines are skipped; `:` is
    /// accepted in place of `=`. Missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = ParamFile::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| {
                    Error::Config(format!("line {}: expected `key = value`", lineno + 1))
                })?;
            let key = key.trim();
            let value = value.trim();
            let num = || -> Result<f64> {
                value.parse::<f64>().map_err(|_| {
                    Error::Config(format!("line {}: `{value}` is not a number", lineno + 1))
                })
            };
            match key {
                "alpha_m" => out.params.alpha_m = num()?,
                "alpha_p" => out.params.alpha_p = num()?,
                "mu" => out.params.mu = num()?,
                "h" => {
                    out.params.h = value.parse::<u32>().map_err(|_| {
                        Error::Config(format!(
                            "line {}: h must be a positive integer, got `{value}`",
                            lineno + 1
                        ))
                    })?
                }
                "l" => out.params.l = num()?,
                "x_M" | "x_m" => out.params.x_m = num()?,
                "epsilon" => out.params.epsilon = num()?,
                "D" => out.diffusion = Some(num()?),
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        out.params.validate()?;
        if let Some(d) = out.diffusion {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::Config(format!("D must be positive, got {d}")));
            }
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }
}
