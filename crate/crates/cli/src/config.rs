//! JSON run configuration.

use std::path::Path;

use anyhow::{bail, Context, Result};
use gcarma::{AmplitudeLaw, InnovationSpec, PoleZeroSystemF64, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SPEC_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spec_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub innovation: Option<InnovationConfig>,
    /// Independent constituents of a mixed process; replaces `system`/`innovation` for `generate`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ComponentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oversample: Option<usize>,
    /// `"auto"` (default) or `"oversampled"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// `bspline`: spacing of the evaluation grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    /// `stats`: largest autocovariance lag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maxlag: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub poles: Vec<[f64; 2]>,
    #[serde(default)]
    pub zeros: Vec<[f64; 2]>,
    #[serde(default = "unit_gain")]
    pub gain: [f64; 2],
    #[serde(default = "unit_step")]
    pub step: f64,
}

fn unit_gain() -> [f64; 2] {
    [1.0, 0.0]
}

fn unit_step() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum InnovationConfig {
    Gaussian {
        b2: f64,
    },
    Poisson {
        lambda: f64,
        #[serde(default)]
        amplitude: AmplitudeConfig,
    },
    Sas {
        alpha: f64,
        b_alpha: f64,
    },
}

/// `"normal"` (standard normal), or `{"type": "normal", "mean", "std"}` / `{"type": "uniform", "lo", "hi"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AmplitudeConfig {
    Named(String),
    Law(AmplitudeParams),
}

impl Default for AmplitudeConfig {
    fn default() -> Self {
        Self::Named("normal".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum AmplitudeParams {
    Normal { mean: f64, std: f64 },
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub system: SystemConfig,
    pub innovation: InnovationConfig,
}

fn cplx(p: &[f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl SystemConfig {
    pub fn build(&self) -> Result<PoleZeroSystemF64> {
        let sys = PoleZeroSystemF64::new(
            self.poles.iter().map(cplx).collect(),
            self.zeros.iter().map(cplx).collect(),
            cplx(&self.gain),
        )?;
        Ok(sys.with_step(self.step)?)
    }
}

impl AmplitudeConfig {
    pub fn law(&self) -> Result<AmplitudeLaw> {
        Ok(match self {
            Self::Named(name) if name == "normal" => AmplitudeLaw::default(),
            Self::Named(name) => bail!("InvalidParameter: unknown amplitude law {name:?} (expected \"normal\")"),
            Self::Law(AmplitudeParams::Normal { mean, std }) => AmplitudeLaw::Normal { mean: *mean, std: *std },
            Self::Law(AmplitudeParams::Uniform { lo, hi }) => AmplitudeLaw::Uniform { lo: *lo, hi: *hi },
        })
    }
}

impl InnovationConfig {
    pub fn build(&self) -> Result<InnovationSpec> {
        Ok(match self {
            Self::Gaussian { b2 } => InnovationSpec::gaussian(*b2)?,
            Self::Poisson { lambda, amplitude } => InnovationSpec::poisson(*lambda, amplitude.law()?)?,
            Self::Sas { alpha, b_alpha } => InnovationSpec::symmetric_stable(*alpha, *b_alpha)?,
        })
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        if cfg.spec_version != SPEC_VERSION {
            bail!("unsupported spec_version {} (expected {SPEC_VERSION})", cfg.spec_version);
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config is serializable")
    }

    /// SHA-256 of the compact JSON form of the effective configuration.
    pub fn sha256(&self) -> String {
        Sha256::digest(self.to_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn system(&self) -> Result<PoleZeroSystemF64> {
        match &self.system {
            Some(s) => s.build(),
            None => match self.components.first() {
                Some(c) => c.system.build(),
                None => bail!("config has no \"system\""),
            },
        }
    }

    pub fn innovation(&self) -> Result<InnovationSpec> {
        match &self.innovation {
            Some(i) => i.build(),
            None => bail!("config has no \"innovation\""),
        }
    }

    pub fn force_oversampling(&self) -> Result<bool> {
        match self.method.as_deref() {
            None | Some("auto") => Ok(false),
            Some("oversampled") => Ok(true),
            Some(other) => bail!("InvalidParameter: unknown method {other:?} (expected \"auto\" or \"oversampled\")"),
        }
    }
}
