//! Run configuration: the JSON schema behind the command line. Unknown
//! keys anywhere are a configuration error, not a warning, so typos in
//! tolerance names or family parameters cannot silently change a run.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fit::Schedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    AfMass,
    AhMass,
    Constraints,
    Verify,
    Validate,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "af-mass" => Ok(Command::AfMass),
            "ah-mass" => Ok(Command::AhMass),
            "constraints" => Ok(Command::Constraints),
            "verify" => Ok(Command::Verify),
            "validate" => Ok(Command::Validate),
            other => Err(Error::Usage(format!(
                "unknown command {other:?}; expected af-mass, ah-mass, constraints, verify, or validate"
            ))),
        }
    }
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::AfMass => "af-mass",
            Command::AhMass => "ah-mass",
            Command::Constraints => "constraints",
            Command::Verify => "verify",
            Command::Validate => "validate",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum BetaSpec {
    One(f64),
    Many(Vec<f64>),
}

impl BetaSpec {
    pub fn list(&self) -> Vec<f64> {
        match self {
            BetaSpec::One(b) => vec![*b],
            BetaSpec::Many(bs) => bs.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConformalSpec {
    pub family: String,
    #[serde(default)]
    pub params: Vec<f64>,
    pub beta: Option<BetaSpec>,
}

impl ConformalSpec {
    pub fn betas(&self) -> Result<Vec<f64>> {
        let list = match &self.beta {
            None => vec![0.5],
            Some(spec) => spec.list(),
        };
        if list.is_empty() {
            return Err(Error::Config("conformal.beta must not be empty".into()));
        }
        for &b in &list {
            if !(b > 0.0 && b <= 1.0) {
                return Err(Error::Config(format!(
                    "conformal.beta must lie in (0, 1], got {b}"
                )));
            }
        }
        Ok(list)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "default_order")]
    pub order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { order: default_order() }
    }
}

fn default_order() -> usize {
    24
}

fn default_dimension() -> usize {
    3
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub start: f64,
    pub ratio: Option<f64>,
    pub step: Option<f64>,
    pub count: usize,
}

impl ScheduleSpec {
    pub fn build(&self) -> Result<Schedule> {
        match (self.ratio, self.step) {
            (Some(r), None) => Schedule::geometric(self.start, r, self.count),
            (None, Some(s)) => Schedule::arithmetic(self.start, s, self.count),
            (Some(_), Some(_)) => Err(Error::Config(
                "schedule takes ratio or step, not both".into(),
            )),
            (None, None) => Err(Error::Config(
                "schedule needs ratio (geometric) or step (arithmetic)".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub command: String,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    pub family: Option<FamilySpec>,
    pub extrinsic: Option<FamilySpec>,
    pub conformal: Option<ConformalSpec>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    pub schedule: Option<ScheduleSpec>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub suite: Option<String>,
}

/// Tolerances every run understands, with their defaults. User entries
/// must name one of these.
pub const TOLERANCE_DEFAULTS: [(&str, f64); 7] = [
    ("identity", 1e-8),
    ("fit", 1e-3),
    ("linearity_energy", 1e-3),
    ("linearity_momentum", 1e-5),
    ("mass_components", 1e-3),
    ("band", 1e-6),
    ("killing", 1e-10),
];

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let cfg: Config = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    fn validate(&self) -> Result<()> {
        self.command.parse::<Command>()?;
        if self.dimension != 3 && self.dimension != 4 {
            return Err(Error::Config(format!(
                "dimension must be 3 or 4, got {}",
                self.dimension
            )));
        }
        if self.quadrature.order < 2 || self.quadrature.order > 64 {
            return Err(Error::Config(format!(
                "quadrature.order must lie in [2, 64], got {}",
                self.quadrature.order
            )));
        }
        for key in self.tolerances.keys() {
            if !TOLERANCE_DEFAULTS.iter().any(|(k, _)| k == key) {
                let known: Vec<&str> = TOLERANCE_DEFAULTS.iter().map(|(k, _)| *k).collect();
                return Err(Error::Config(format!(
                    "unknown tolerance {key:?}; known: {}",
                    known.join(", ")
                )));
            }
        }
        if let Some(spec) = &self.conformal {
            spec.betas()?;
        }
        if let Some(spec) = &self.schedule {
            spec.build()?;
        }
        Ok(())
    }

    pub fn command(&self) -> Command {
        // validated at parse time
        self.command.parse().expect("command was validated")
    }

    /// Defaults overlaid with the user's entries.
    pub fn resolved_tolerances(&self) -> BTreeMap<String, f64> {
        let mut out: BTreeMap<String, f64> = TOLERANCE_DEFAULTS
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        for (k, v) in &self.tolerances {
            out.insert(k.clone(), *v);
        }
        out
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        if let Some(v) = self.tolerances.get(name) {
            return *v;
        }
        TOLERANCE_DEFAULTS
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
            .expect("tolerance name is known")
    }

    /// The flux schedule, defaulting to the end-appropriate one: geometric
    /// radii on cartesian ends, an arithmetic rho ladder on polar charts.
    pub fn schedule_for(&self, polar: bool) -> Result<Schedule> {
        match &self.schedule {
            Some(spec) => spec.build(),
            None => Ok(if polar {
                Schedule::polar_default()
            } else {
                Schedule::cartesian_default()
            }),
        }
    }

    pub fn suite(&self) -> &str {
        self.suite.as_deref().unwrap_or("all")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = Config::parse(r#"{"command": "verify"}"#).unwrap();
        assert_eq!(cfg.command(), Command::Verify);
        assert_eq!(cfg.dimension, 3);
        assert_eq!(cfg.quadrature.order, 24);
        assert_eq!(cfg.suite(), "all");
        assert_eq!(cfg.tolerance("identity"), 1e-8);
        assert_eq!(cfg.tolerance("band"), 1e-6);
    }

    #[test]
    fn full_config_round_trips() {
        let cfg = Config::parse(
            r#"{
                "command": "af-mass",
                "dimension": 3,
                "family": {"name": "schwarzschild_isotropic", "params": [1.0]},
                "extrinsic": {"name": "bowen_york", "params": [0.0, 0.0, 0.3]},
                "conformal": {"family": "af_factor", "params": [0.2, 1.0], "beta": [0.25, 0.5]},
                "quadrature": {"order": 16},
                "schedule": {"start": 32.0, "ratio": 2.0, "count": 5},
                "tolerances": {"fit": 1e-4}
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.command(), Command::AfMass);
        assert_eq!(cfg.conformal.as_ref().unwrap().betas().unwrap(), vec![0.25, 0.5]);
        assert_eq!(cfg.tolerance("fit"), 1e-4);
        assert_eq!(cfg.tolerance("identity"), 1e-8);
        let sched = cfg.schedule_for(false).unwrap();
        assert_eq!(sched.points(), vec![32.0, 64.0, 128.0, 256.0, 512.0]);
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        assert!(matches!(
            Config::parse(r#"{"command": "verify", "quadra": 1}"#),
            Err(Error::Json(_))
        ));
        assert!(matches!(
            Config::parse(r#"{"command": "verify", "quadrature": {"orde": 8}}"#),
            Err(Error::Json(_))
        ));
        let err = Config::parse(r#"{"command": "verify", "tolerances": {"identty": 1e-8}}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(Config::parse(r#"{"command": "fly"}"#).is_err());
        assert!(Config::parse(r#"{"command": "verify", "dimension": 5}"#).is_err());
        assert!(Config::parse(
            r#"{"command": "verify", "conformal": {"family": "af_factor", "params": [0.2, 1.0], "beta": 1.5}}"#
        )
        .is_err());
        assert!(Config::parse(
            r#"{"command": "af-mass", "schedule": {"start": 32.0, "ratio": 2.0, "step": 1.0, "count": 5}}"#
        )
        .is_err());
        let scalar_beta = Config::parse(
            r#"{"command": "verify", "conformal": {"family": "af_factor", "params": [0.2, 1.0], "beta": 0.75}}"#
        )
        .unwrap();
        assert_eq!(scalar_beta.conformal.unwrap().betas().unwrap(), vec![0.75]);
    }
}
