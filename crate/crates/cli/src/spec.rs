use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use qdkd::analysis::AttackTarget;
use qdkd::attacks::{
    alice_key_attack, bob_key_attack, epsilon_exceeds_half, error_tuning, honest, swap_vacuum,
    AttackParams, AttackStrategy,
};
use qdkd::protocol::ProtocolConfig;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AttackName {
    #[default]
    None,
    Swap,
    Tuning,
    Alice,
    Bob,
}

impl AttackName {
    pub fn target(self) -> Option<AttackTarget> {
        match self {
            AttackName::Alice => Some(AttackTarget::Alice),
            AttackName::Bob => Some(AttackTarget::Bob),
            _ => None,
        }
    }

    fn uses_p(self) -> bool {
        matches!(self, AttackName::Alice | AttackName::Bob)
    }

    fn uses_epsilon(self) -> bool {
        matches!(
            self,
            AttackName::Tuning | AttackName::Alice | AttackName::Bob
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    #[default]
    Json,
}

pub const DEFAULT_ROUNDS: usize = 10_000;

/// Fully resolved parameters of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub attack: AttackName,
    pub p: Option<f64>,
    pub epsilon: Option<f64>,
    pub rounds: usize,
    pub cm_probability: f64,
    pub channel_transmission: f64,
    pub channel_prime: Option<f64>,
    pub seed: u64,
    pub output_format: OutputFormat,
    /// `None` writes to stdout.
    pub output_path: Option<PathBuf>,
    pub emit_rounds: bool,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            attack: AttackName::None,
            p: None,
            epsilon: None,
            rounds: DEFAULT_ROUNDS,
            cm_probability: 0.5,
            channel_transmission: 1.0,
            channel_prime: None,
            seed: 0,
            output_format: OutputFormat::Json,
            output_path: None,
            emit_rounds: false,
        }
    }
}

/// Any subset of the [`RunSpec`] fields, as given on the command line or in a
/// config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialSpec {
    pub attack: Option<AttackName>,
    pub p: Option<f64>,
    pub epsilon: Option<f64>,
    pub rounds: Option<usize>,
    pub cm_probability: Option<f64>,
    pub channel_transmission: Option<f64>,
    pub channel_prime: Option<f64>,
    pub seed: Option<u64>,
    pub output_format: Option<OutputFormat>,
    pub output_path: Option<PathBuf>,
    pub emit_rounds: Option<bool>,
}

impl PartialSpec {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fields set in `self` win over those in `lower`.
    pub fn over(self, lower: PartialSpec) -> PartialSpec {
        PartialSpec {
            attack: self.attack.or(lower.attack),
            p: self.p.or(lower.p),
            epsilon: self.epsilon.or(lower.epsilon),
            rounds: self.rounds.or(lower.rounds),
            cm_probability: self.cm_probability.or(lower.cm_probability),
            channel_transmission: self.channel_transmission.or(lower.channel_transmission),
            channel_prime: self.channel_prime.or(lower.channel_prime),
            seed: self.seed.or(lower.seed),
            output_format: self.output_format.or(lower.output_format),
            output_path: self.output_path.or(lower.output_path),
            emit_rounds: self.emit_rounds.or(lower.emit_rounds),
        }
    }

    pub fn resolve(self) -> RunSpec {
        let d = RunSpec::default();
        RunSpec {
            attack: self.attack.unwrap_or(d.attack),
            p: self.p,
            epsilon: self.epsilon,
            rounds: self.rounds.unwrap_or(d.rounds),
            cm_probability: self.cm_probability.unwrap_or(d.cm_probability),
            channel_transmission: self.channel_transmission.unwrap_or(d.channel_transmission),
            channel_prime: self.channel_prime,
            seed: self.seed.unwrap_or(d.seed),
            output_format: self.output_format.unwrap_or(d.output_format),
            output_path: self.output_path,
            emit_rounds: self.emit_rounds.unwrap_or(d.emit_rounds),
        }
    }
}

impl RunSpec {
    /// Checks every field and returns warnings for parameters the attack
    /// ignores.
    pub fn validate(&self) -> CliResult<Vec<String>> {
        let mut warnings = Vec::new();
        if self.rounds == 0 {
            return Err(CliError::field("rounds", "must be at least 1"));
        }
        self.protocol_config().validate()?;
        if let Some(pp) = self.channel_prime {
            if !(pp > self.channel_transmission && pp <= 1.0) {
                return Err(CliError::field(
                    "channel_prime",
                    format!("{pp} must satisfy channel_transmission < channel_prime <= 1"),
                ));
            }
        }
        if self.attack.uses_p() && self.p.is_none() {
            return Err(CliError::field(
                "p",
                format!("required for attack `{}`", self.attack_label()),
            ));
        }
        if self.attack.uses_epsilon() && self.epsilon.is_none() {
            return Err(CliError::field(
                "epsilon",
                format!("required for attack `{}`", self.attack_label()),
            ));
        }
        if !self.attack.uses_p() && self.p.is_some() {
            warnings.push(format!(
                "`p` is ignored by attack `{}`",
                self.attack_label()
            ));
        }
        if !self.attack.uses_epsilon() && self.epsilon.is_some() {
            warnings.push(format!(
                "`epsilon` is ignored by attack `{}`",
                self.attack_label()
            ));
        }
        if self.channel_prime.is_some() && self.attack.target().is_none() {
            warnings.push(format!(
                "`channel_prime` is ignored by attack `{}`",
                self.attack_label()
            ));
        }
        if let Some(eps) = self.epsilon.filter(|_| self.attack.uses_epsilon()) {
            if epsilon_exceeds_half(eps) {
                warnings.push(format!(
                    "epsilon = {eps} exceeds 1/2, beyond the error-tuning bound"
                ));
            }
        }
        self.strategy()?;
        Ok(warnings)
    }

    pub fn attack_label(&self) -> &'static str {
        match self.attack {
            AttackName::None => "none",
            AttackName::Swap => "swap",
            AttackName::Tuning => "tuning",
            AttackName::Alice => "alice",
            AttackName::Bob => "bob",
        }
    }

    pub fn protocol_config(&self) -> ProtocolConfig {
        ProtocolConfig::new(self.rounds, self.seed)
            .with_cm_probability(self.cm_probability)
            .with_transmission(self.channel_transmission)
    }

    pub fn params(&self) -> CliResult<Option<AttackParams>> {
        if !self.attack.uses_p() {
            return Ok(None);
        }
        let p = self.p.ok_or_else(|| CliError::field("p", "missing"))?;
        let eps = self
            .epsilon
            .ok_or_else(|| CliError::field("epsilon", "missing"))?;
        Ok(Some(AttackParams::new(p, eps)?))
    }

    pub fn strategy(&self) -> CliResult<AttackStrategy> {
        Ok(match self.attack {
            AttackName::None => honest(),
            AttackName::Swap => swap_vacuum(),
            AttackName::Tuning => error_tuning(
                self.epsilon
                    .ok_or_else(|| CliError::field("epsilon", "missing"))?,
            )?,
            AttackName::Alice => alice_key_attack(self.params()?.expect("composite attack"))?,
            AttackName::Bob => bob_key_attack(self.params()?.expect("composite attack"))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_config() {
        let config =
            PartialSpec::from_json(r#"{"attack":"alice","p":0.3,"epsilon":0.5,"seed":9}"#).unwrap();
        let flags = PartialSpec {
            p: Some(0.6),
            ..Default::default()
        };
        let spec = flags.over(config).resolve();
        assert_eq!(spec.attack, AttackName::Alice);
        assert_eq!(spec.p, Some(0.6));
        assert_eq!(spec.seed, 9);
        assert_eq!(spec.rounds, DEFAULT_ROUNDS);
    }

    #[test]
    fn unknown_config_field_is_a_usage_error() {
        let err = PartialSpec::from_json(r#"{"ppp":1}"#).unwrap_err();
        assert_eq!(err.status(), 2);
        assert!(err.to_string().contains("ppp"));
    }

    #[test]
    fn errors_name_the_field() {
        let bad = |spec: RunSpec, field: &str| {
            let err = spec.validate().unwrap_err();
            assert_eq!(err.status(), 2);
            assert!(err.to_string().contains(field), "{err}");
        };
        let alice = RunSpec {
            attack: AttackName::Alice,
            p: Some(0.5),
            epsilon: Some(0.5),
            ..Default::default()
        };
        bad(
            RunSpec {
                p: Some(1.0),
                ..alice.clone()
            },
            "`p`",
        );
        bad(
            RunSpec {
                epsilon: Some(0.0),
                ..alice.clone()
            },
            "`epsilon`",
        );
        bad(
            RunSpec {
                epsilon: None,
                ..alice.clone()
            },
            "`epsilon`",
        );
        bad(
            RunSpec {
                cm_probability: 1.5,
                ..alice.clone()
            },
            "`cm_probability`",
        );
        bad(
            RunSpec {
                channel_transmission: 0.0,
                ..alice.clone()
            },
            "`channel_transmission`",
        );
        bad(
            RunSpec {
                channel_prime: Some(1.0),
                ..alice.clone()
            },
            "`channel_prime`",
        );
        bad(RunSpec { rounds: 0, ..alice }, "`rounds`");
    }

    #[test]
    fn inapplicable_parameters_warn() {
        let spec = RunSpec {
            attack: AttackName::Swap,
            p: Some(0.2),
            ..Default::default()
        };
        let warnings = spec.validate().unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("`p`"));
    }
}
