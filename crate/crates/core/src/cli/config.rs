//! JSON run configurations. Unknown keys are rejected and every field is
//! range-checked before any computation starts.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bipartite::ChannelModel;
use crate::convergence::{self, SpacingRule, DEFAULT_BRANCHES};
use crate::protocol::{AbortThresholds, MIN_ROUNDS};

fn check_mbar(mbar: f64) -> Result<(), String> {
    if mbar.is_finite() && mbar >= 0.0 {
        Ok(())
    } else {
        Err(format!("mbar must be finite and >= 0, got {mbar}"))
    }
}

fn check_orders(orders: &[usize]) -> Result<(), String> {
    if orders.is_empty() {
        return Err("orders must not be empty".into());
    }
    if let Some(m) = orders.iter().find(|&&m| m == 0) {
        return Err(format!("orders must be >= 1, got {m}"));
    }
    Ok(())
}

fn check_spacing(rule: &SpacingRule) -> Result<(), String> {
    match rule {
        SpacingRule::Fixed(s) if !(s.is_finite() && *s > 0.0) => {
            Err(format!("fixed spacing must be finite and > 0, got {s}"))
        }
        _ => Ok(()),
    }
}

fn check_dim(dim: Option<usize>) -> Result<(), String> {
    match dim {
        Some(d) if d < 2 => Err(format!("dim must be >= 2, got {d}")),
        _ => Ok(()),
    }
}

fn check_channel(ch: &ChannelModel) -> Result<(), String> {
    ch.validate().map_err(|e| e.to_string())
}

/// Working cutoff when none is given: thermal deficit below the reference
/// level, and room for every requested eigen-branch.
pub fn default_dim(mbar: f64, branches: usize) -> usize {
    convergence::reference_dim(mbar).max(branches + 1).max(2)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub mbar: f64,
    pub orders: Vec<usize>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub branches: Option<usize>,
    #[serde(default)]
    pub spacing: SpacingRule,
}

impl ConvergeConfig {
    pub fn validate(&self) -> Result<(), String> {
        check_mbar(self.mbar)?;
        check_orders(&self.orders)?;
        check_dim(self.dim)?;
        check_spacing(&self.spacing)?;
        if self.branches == Some(0) {
            return Err("branches must be >= 1".into());
        }
        Ok(())
    }

    pub fn branches(&self) -> usize {
        self.branches.unwrap_or(DEFAULT_BRANCHES)
    }

    pub fn dim(&self) -> usize {
        self.dim
            .unwrap_or_else(|| default_dim(self.mbar, self.branches()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceConfig {
    pub mbar: f64,
    pub orders: Vec<usize>,
    #[serde(default)]
    pub dim: Option<usize>,
    pub tau: f64,
    pub xi: f64,
    #[serde(default)]
    pub w: f64,
    #[serde(default)]
    pub spacing: SpacingRule,
}

impl CovarianceConfig {
    pub fn validate(&self) -> Result<(), String> {
        check_mbar(self.mbar)?;
        check_orders(&self.orders)?;
        check_dim(self.dim)?;
        check_spacing(&self.spacing)?;
        check_channel(&self.channel())?;
        if !(self.w.is_finite() && self.w >= 0.0) {
            return Err(format!("w must be finite and >= 0, got {}", self.w));
        }
        Ok(())
    }

    pub fn channel(&self) -> ChannelModel {
        ChannelModel {
            tau: self.tau,
            xi: self.xi,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim.unwrap_or_else(|| default_dim(self.mbar, 1))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecurityConfig {
    pub mbar: f64,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub eps_target: Option<f64>,
    #[serde(default)]
    pub eps_tilde: f64,
}

impl SecurityConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.mbar.is_finite() && self.mbar > 0.0) {
            return Err(format!("mbar must be finite and > 0, got {}", self.mbar));
        }
        match (self.dim, self.eps_target) {
            (Some(_), Some(_)) | (None, None) => {
                return Err("give exactly one of dim or eps_target".into())
            }
            (Some(0), None) => return Err("dim must be >= 1".into()),
            (None, Some(e)) if !(e > 0.0 && e < 1.0) => {
                return Err(format!("eps_target must lie in (0, 1), got {e}"))
            }
            _ => {}
        }
        if !(self.eps_tilde.is_finite() && self.eps_tilde >= 0.0) {
            return Err(format!("eps_tilde must be finite and >= 0, got {}", self.eps_tilde));
        }
        Ok(())
    }
}

/// Where the simulated constellation comes from.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ConstellationSource {
    /// Shaped QAM built the same way as in the sweeps.
    Shaped(ShapedSpec),
    /// Constellation JSON file, relative to the config file.
    File(FileSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapedSpec {
    pub order: usize,
    pub mbar: f64,
    #[serde(default)]
    pub spacing: SpacingRule,
    #[serde(default)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSpec {
    pub file: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub constellation: ConstellationSource,
    pub channel: ChannelModel,
    pub rounds: usize,
    pub test_fraction: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub abort: Option<AbortThresholds>,
    #[serde(default)]
    pub per_round_csv: bool,
}

impl SimulateConfig {
    pub fn validate(&self) -> Result<(), String> {
        match &self.constellation {
            ConstellationSource::Shaped(s) => {
                if s.order == 0 {
                    return Err("constellation order must be >= 1".into());
                }
                check_mbar(s.mbar)?;
                check_spacing(&s.spacing)?;
                check_dim(s.dim)?;
            }
            ConstellationSource::File(f) => {
                if f.file.as_os_str().is_empty() {
                    return Err("constellation file path is empty".into());
                }
            }
        }
        check_channel(&self.channel)?;
        if self.rounds < MIN_ROUNDS {
            return Err(format!("rounds must be >= {MIN_ROUNDS}, got {}", self.rounds));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(format!("test_fraction must lie in (0, 1), got {}", self.test_fraction));
        }
        if let Some(a) = &self.abort {
            if !(a.tau_min.is_finite() && a.xi_max.is_finite()) {
                return Err("abort thresholds must be finite".into());
            }
        }
        Ok(())
    }
}

/// Resolves a constellation file path against the config's directory.
pub fn resolve(config_path: &Path, file: &Path) -> PathBuf {
    if file.is_absolute() {
        file.to_path_buf()
    } else {
        config_path
            .parent()
            .map(|p| p.join(file))
            .unwrap_or_else(|| file.to_path_buf())
    }
}
