//! Run configuration, read from TOML. Every section has complete defaults, so
//! an empty file is a valid configuration.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Curvature,
    Averages,
    Royden,
    Schwarz,
    Ma,
    Hyperbolicity,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Curvature,
        Suite::Averages,
        Suite::Royden,
        Suite::Schwarz,
        Suite::Ma,
        Suite::Hyperbolicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Curvature => "curvature",
            Suite::Averages => "averages",
            Suite::Royden => "royden",
            Suite::Schwarz => "schwarz",
            Suite::Ma => "ma",
            Suite::Hyperbolicity => "hyperbolicity",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::EACH.to_vec(),
            s => vec![s],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub suite: Suite,
    pub seed: u64,
    /// Multiplies every report tolerance.
    pub tol_scale: f64,
    pub parallel: bool,
    pub out: Option<PathBuf>,
    pub curvature: CurvatureConfig,
    pub averages: AveragesConfig,
    pub royden: RoydenConfig,
    pub schwarz: SchwarzConfig,
    pub ma: MaConfig,
    pub hyperbolicity: HyperbolicityConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            seed: 1,
            tol_scale: 1.0,
            parallel: false,
            out: None,
            curvature: CurvatureConfig::default(),
            averages: AveragesConfig::default(),
            royden: RoydenConfig::default(),
            schwarz: SchwarzConfig::default(),
            ma: MaConfig::default(),
            hyperbolicity: HyperbolicityConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvatureConfig {
    /// Random points per model for the symmetry and Ricci checks.
    pub points: usize,
    /// Points per model for the sign catalog.
    pub sign_points: usize,
}

impl Default for CurvatureConfig {
    fn default() -> Self {
        Self {
            points: 50,
            sign_points: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AveragesConfig {
    pub dims: Vec<usize>,
    pub tensors: usize,
    pub moment_max_n: usize,
    pub mc_samples: usize,
    pub workers: usize,
}

impl Default for AveragesConfig {
    fn default() -> Self {
        Self {
            dims: vec![1, 2, 3],
            tensors: 100,
            moment_max_n: 6,
            mc_samples: 1_000_000,
            workers: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoydenConfig {
    pub trials: usize,
    pub max_n: usize,
    pub max_nu: usize,
    pub workers: usize,
}

impl Default for RoydenConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            max_n: 4,
            max_nu: 4,
            workers: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchwarzConfig {
    pub h: f64,
    /// Random points per pair in the lemma matrix.
    pub points_per_pair: usize,
    pub trace_lemma_samples: usize,
    pub trace_lemma_max_n: usize,
    /// Factor applied to κ in the sharpness probes.
    pub inflation: f64,
    pub quasi_negative_eps: f64,
}

impl Default for SchwarzConfig {
    fn default() -> Self {
        Self {
            h: 1e-3,
            points_per_pair: 35,
            trace_lemma_samples: 100_000,
            trace_lemma_max_n: 6,
            inflation: 1.01,
            quasi_negative_eps: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaConfig {
    pub grid: usize,
    pub coarse_grid: usize,
    pub amplitude: f64,
    pub eps: f64,
    pub flat_eps: Vec<f64>,
    pub sweep_eps: Vec<f64>,
    pub sweep_grid: usize,
    /// Grid for the optional `n = 2` flat sweep; 0 disables it.
    pub sweep_grid_2d: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub eps0: f64,
    pub surrogate_eps: Vec<f64>,
}

impl Default for MaConfig {
    fn default() -> Self {
        Self {
            grid: 128,
            coarse_grid: 64,
            amplitude: 0.1,
            eps: 0.5,
            flat_eps: vec![0.4, 0.2, 0.1],
            sweep_eps: vec![0.4, 0.2, 0.1, 0.05],
            sweep_grid: 64,
            sweep_grid_2d: 16,
            tol: 1e-10,
            max_iter: 50,
            eps0: 1.0,
            surrogate_eps: vec![0.5, 0.1, 0.01],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperbolicityConfig {
    pub triangle_samples: usize,
    pub eps_reg: Vec<f64>,
}

impl Default for HyperbolicityConfig {
    fn default() -> Self {
        Self {
            triangle_samples: 10_000,
            eps_reg: vec![0.0, 1e-3, 0.1],
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return bad("tol_scale must be positive");
        }
        if self.averages.dims.iter().any(|&n| n == 0) {
            return bad("averages.dims entries must be at least 1");
        }
        if self.royden.max_n == 0 || self.royden.max_nu == 0 {
            return bad("royden.max_n and royden.max_nu must be at least 1");
        }
        if !(self.schwarz.h > 0.0) {
            return bad("schwarz.h must be positive");
        }
        if self.schwarz.trace_lemma_max_n < 2 {
            return bad("schwarz.trace_lemma_max_n must be at least 2");
        }
        if !(self.ma.tol > 0.0) || self.ma.max_iter == 0 {
            return bad("ma.tol and ma.max_iter must be positive");
        }
        if self.ma.sweep_eps.windows(2).any(|w| w[1] >= w[0]) {
            return bad("ma.sweep_eps must be strictly decreasing");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("sede = 3").is_err());
        assert!(RunConfig::from_toml("[royden]\ntrails = 3").is_err());
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let c = RunConfig::from_toml("seed = 9\n[royden]\ntrials = 10").unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.royden.trials, 10);
        assert_eq!(c.royden.max_n, 4);
    }
}
