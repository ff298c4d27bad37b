use serde::{Deserialize, Serialize};

use super::AttackTarget;
use crate::{Error, Result};

/// Transmission observed by Bob in control mode under a composite attack,
/// and the largest attack probability Eve can hide with a better channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    /// Honest channel transmission `P`.
    #[serde(rename = "P")]
    pub transmission: f64,
    /// Transmission `P′ > P` of Eve's substitute channel.
    #[serde(rename = "P_prime")]
    pub transmission_prime: Option<f64>,
    pub target: AttackTarget,
    pub p: f64,
    /// Observed transmission with the honest channel in use.
    pub p_obs_formula: f64,
    /// Observed transmission when Eve runs her attack over the `P′` channel.
    pub p_obs_substitute: Option<f64>,
    /// `p_MAX`; `None` when it needs `P′` and none was given.
    pub p_max: Option<f64>,
    /// Fraction of detections Eve must discard to match `P` (attack on Bob's
    /// key with `P ≤ 1/2` only).
    pub filter_fraction: Option<f64>,
}

pub fn loss_report(
    transmission: f64,
    transmission_prime: Option<f64>,
    target: AttackTarget,
    p: f64,
) -> Result<LossReport> {
    if !(transmission > 0.0 && transmission <= 1.0) {
        return Err(Error::bad_param("P", transmission, "must lie in (0, 1]"));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::bad_param("p", p, "must satisfy 0 <= p < 1"));
    }
    if let Some(pp) = transmission_prime {
        if !(pp > transmission && pp <= 1.0) {
            return Err(Error::bad_param(
                "P_prime",
                pp,
                "must satisfy P < P_prime <= 1",
            ));
        }
    }
    let big_p = transmission;
    let observed = |channel: f64| match target {
        AttackTarget::Alice => channel * (1.0 - p),
        AttackTarget::Bob => channel * (1.0 - p) + p / 2.0,
    };
    let p_obs_formula = observed(big_p);
    let (p_max, filter_fraction) = match target {
        AttackTarget::Alice => (transmission_prime.map(|pp| (pp - big_p) / pp), None),
        AttackTarget::Bob if big_p <= 0.5 => (
            Some(1.0),
            Some((p_obs_formula - big_p).max(0.0) / p_obs_formula),
        ),
        AttackTarget::Bob => match transmission_prime {
            Some(pp) if pp <= 0.5 => {
                return Err(Error::Undefined("p_max needs P_prime > 1/2 when P > 1/2"))
            }
            Some(pp) => (Some((pp - big_p) / (pp - 0.5)), None),
            None => (None, None),
        },
    };
    Ok(LossReport {
        transmission,
        transmission_prime,
        target,
        p,
        p_obs_formula,
        p_obs_substitute: transmission_prime.map(observed),
        p_max,
        filter_fraction,
    })
}
