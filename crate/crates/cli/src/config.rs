use std::path::{Path, PathBuf};

use horofourier_core::transforms::GridSpec;
use serde::Deserialize;

use crate::error::CliError;

/// Settings read from the TOML file given by `--config`; command-line flags
/// take precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub strict_parity: bool,
    pub grid: GridConfig,
    pub transform: TransformConfig,
    pub verify: VerifyConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub t_max: f64,
    pub t_panels: usize,
    pub t_order: usize,
    pub lambda_max: f64,
    pub lambda_panels: usize,
    pub lambda_order: usize,
    pub strip: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransformConfig {
    /// Schwartz exponent the input profile must admit.
    pub p: f64,
    /// Boundary angles for the Helgason transform.
    pub theta_count: usize,
    /// Radius range `[0, round_trip_t]` of the reported round-trip error.
    pub round_trip_t: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Multiplies every check tolerance.
    pub tolerance_scale: f64,
    pub seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            t_max: g.t_max,
            t_panels: g.t_panels,
            t_order: g.t_order,
            lambda_max: g.lambda_max,
            lambda_panels: g.lambda_panels,
            lambda_order: g.lambda_order,
            strip: g.strip,
        }
    }
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            theta_count: 16,
            round_trip_t: 4.0,
        }
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let opts = horofourier_core::verify::SuiteOptions::default();
        Self {
            tolerance_scale: opts.tolerance_scale,
            seed: opts.seed,
        }
    }
}

impl GridConfig {
    pub fn spec(&self) -> GridSpec {
        GridSpec {
            t_max: self.t_max,
            t_panels: self.t_panels,
            t_order: self.t_order,
            lambda_max: self.lambda_max,
            lambda_panels: self.lambda_panels,
            lambda_order: self.lambda_order,
            strip: self.strip,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.grid
            .spec()
            .validate()
            .map_err(|e| CliError::Usage(format!("grid: {e}")))?;
        let v = &self.verify;
        if !(v.tolerance_scale > 0.0 && v.tolerance_scale.is_finite()) {
            return Err(CliError::Usage("tolerance_scale must be positive and finite".into()));
        }
        let t = &self.transform;
        if !(t.p > 0.0 && t.p <= 2.0) {
            return Err(CliError::Usage(format!("p = {} outside (0, 2]", t.p)));
        }
        if t.theta_count < 4 {
            return Err(CliError::Usage("theta_count must be at least 4".into()));
        }
        if !(t.round_trip_t > 0.0 && t.round_trip_t.is_finite()) {
            return Err(CliError::Usage("round_trip_t must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Usage("jobs must be at least 1".into()));
        }
        Ok(())
    }
}
