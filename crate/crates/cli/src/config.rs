//! Resolved run configuration: a JSON document that fully describes one invocation.

use clap::ValueEnum;
use covertlab::key_length::KeySchedule;
use covertlab::NoiseModel;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Scaling,
    Tilt,
    SolveGamma,
    SynthInput,
    Simulate,
    Sweep,
    Keylen,
    CheckIntegrability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleArg {
    SubSqrt,
    GeneralOn,
}

impl From<ScheduleArg> for KeySchedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::SubSqrt => KeySchedule::SubSqrt,
            ScheduleArg::GeneralOn => KeySchedule::GeneralOn,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<NoiseModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_window: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_leak: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: CommandName) -> Self {
        Self {
            command,
            model: None,
            delta: None,
            n: Vec::new(),
            gamma: None,
            chi: None,
            rho: None,
            rate_fraction: None,
            trials: None,
            scan_window: None,
            target_leak: None,
            schedule: None,
            xi_exponent: None,
            samples: None,
            zeta: None,
            seed: 0,
            format: Format::Json,
        }
    }

    pub fn parse(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run config serializes")
    }
}
