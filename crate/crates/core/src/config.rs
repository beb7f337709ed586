//! JSON configuration document for a problem instance.
//!
//! The key set is fixed: `{mu, sigma, jump_rate, jump_scale, discount,
//! target, C, c, D, d}` with `jump_rate` defaulting to 1.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{validate_model, CostParams, InvalidParams, ModelParams, ValidatedModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub mu: f64,
    pub sigma: f64,
    #[serde(default = "default_jump_rate")]
    pub jump_rate: f64,
    pub jump_scale: f64,
    pub discount: f64,
    pub target: f64,
    #[serde(rename = "C")]
    pub fixed_up: f64,
    #[serde(rename = "c")]
    pub prop_up: f64,
    #[serde(rename = "D")]
    pub fixed_down: f64,
    #[serde(rename = "d")]
    pub prop_down: f64,
}

fn default_jump_rate() -> f64 {
    1.0
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot parse configuration: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] InvalidParams),
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn model(&self) -> ModelParams {
        ModelParams {
            mu: self.mu,
            sigma: self.sigma,
            jump_rate: self.jump_rate,
            jump_scale: self.jump_scale,
            discount: self.discount,
            target: self.target,
        }
    }

    pub fn costs(&self) -> CostParams {
        CostParams {
            fixed_up: self.fixed_up,
            prop_up: self.prop_up,
            fixed_down: self.fixed_down,
            prop_down: self.prop_down,
        }
    }

    /// Parses and validates in one step.
    pub fn validated(&self) -> Result<ValidatedModel, ConfigError> {
        Ok(validate_model(self.model(), self.costs())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = r#"{
        "mu": -2.0, "sigma": 0.0, "jump_rate": 1.0, "jump_scale": 1.0,
        "discount": 1.0, "target": 0.0,
        "C": 1.0, "c": 0.1, "D": 1.0, "d": 0.1
    }"#;

    #[test]
    fn golden_keys_parse() {
        let cfg = ProblemConfig::from_json(GOLDEN).unwrap();
        assert_eq!(cfg.mu, -2.0);
        assert_eq!(cfg.fixed_up, 1.0);
        assert_eq!(cfg.prop_up, 0.1);
        assert_eq!(cfg.fixed_down, 1.0);
        assert_eq!(cfg.prop_down, 0.1);
        assert!(cfg.validated().is_ok());
    }

    #[test]
    fn jump_rate_defaults_to_one() {
        let text = r#"{"mu": 0.0, "sigma": 1.0, "jump_scale": 2.0,
            "discount": 1.0, "target": 0.0, "C": 1.0, "c": 0.0, "D": 1.0, "d": 0.0}"#;
        let cfg = ProblemConfig::from_json(text).unwrap();
        assert_eq!(cfg.jump_rate, 1.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"mu": 0.0, "sigma": 1.0, "jump_scale": 2.0, "discount": 1.0,
            "target": 0.0, "C": 1.0, "c": 0.0, "D": 1.0, "d": 0.0, "extra": 3}"#;
        assert!(ProblemConfig::from_json(text).is_err());
    }

    #[test]
    fn round_trip_preserves_keys() {
        let cfg = ProblemConfig::from_json(GOLDEN).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        for key in ["\"mu\"", "\"sigma\"", "\"jump_rate\"", "\"jump_scale\"",
            "\"discount\"", "\"target\"", "\"C\"", "\"c\"", "\"D\"", "\"d\""] {
            assert!(text.contains(key), "missing {key} in {text}");
        }
        assert_eq!(ProblemConfig::from_json(&text).unwrap(), cfg);
    }
}
