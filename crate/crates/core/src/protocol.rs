//! The QDKD round state machine.
//!
//! Each round Alice prepares the singlet `|Ψ−⟩_AB`, keeps qubit A and encodes
//! her key bit `j` as `Z_B^j` on the photon in mode B before sending it to
//! Bob. Bob either measures it (control mode, CM) or encodes his key bit `k`
//! as `Z_B^k` and returns it (message mode, MM). In message mode Alice's Bell
//! measurement yields `m = j ⊕ k` on a clean channel, announced publicly, and
//! each side recovers the other's bit from `m` and its own bit.
//!
//! # Randomness
//!
//! Every round owns an independent ChaCha8 stream so experiments are
//! reproducible regardless of how rounds are scheduled across threads. The
//! stream of round `i` under master seed `s` is
//!
//! ```text
//! ChaCha8Rng::seed_from_u64(splitmix64(s ^ splitmix64(i)))
//! splitmix64(z):
//!     z = z + 0x9E3779B97F4A7C15                 (wrapping)
//!     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (wrapping)
//!     z = (z ^ (z >> 27)) * 0x94D049BB133111EB   (wrapping)
//!     return z ^ (z >> 31)
//! ```
//!
//! Within a round, draws happen in a fixed order: Eve's branch (composite
//! attacks only), `j`, the loss draw (only when the channel is lossy and not
//! intercepted), any measurement the forward leg needs, Bob's mode, then
//! either the CM measurements or `k`, the backward leg and the Bell
//! measurement. Measurements consume one uniform each.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attacks::{AttackDescriptor, AttackStrategy, Channel, EveBranch, EveNotes};
use crate::quantum::{
    bell_measure, measure_mode, measure_photon_mode, BasisLabel, BellOutcome, BellSign, Mode,
    ModeOperator, StateVector,
};
use crate::{Error, Result};

/// Alice's qubit.
pub const ALICE: &str = "A";
/// The travelling photon mode.
pub const BOB: &str = "B";
/// Eve's auxiliary mode.
pub const EVE: &str = "E";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    /// Probability that Bob picks control mode.
    pub cm_probability: f64,
    /// Probability `P` that the photon survives the Alice→Bob leg.
    pub channel_transmission: f64,
    pub rounds: usize,
    pub master_seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            cm_probability: 0.5,
            channel_transmission: 1.0,
            rounds: 0,
            master_seed: 0,
        }
    }
}

impl ProtocolConfig {
    pub fn new(rounds: usize, master_seed: u64) -> Self {
        ProtocolConfig {
            rounds,
            master_seed,
            ..Self::default()
        }
    }

    pub fn with_cm_probability(mut self, cm_probability: f64) -> Self {
        self.cm_probability = cm_probability;
        self
    }

    pub fn with_transmission(mut self, channel_transmission: f64) -> Self {
        self.channel_transmission = channel_transmission;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.cm_probability) {
            return Err(Error::bad_param(
                "cm_probability",
                self.cm_probability,
                "must lie in [0, 1]",
            ));
        }
        if !(self.channel_transmission > 0.0 && self.channel_transmission <= 1.0) {
            return Err(Error::bad_param(
                "channel_transmission",
                self.channel_transmission,
                "must lie in (0, 1]",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BobMode {
    #[serde(rename = "MM")]
    Message,
    #[serde(rename = "CM")]
    Control,
}

impl BobMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BobMode::Message => "MM",
            BobMode::Control => "CM",
        }
    }
}

/// Classical record of one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub index: usize,
    pub bob_mode: BobMode,
    /// Alice's key bit.
    pub j: bool,
    /// Bob's key bit (message mode only).
    pub k: Option<bool>,
    /// Alice's Bell result (message mode only).
    pub m: Option<BellOutcome>,
    /// Bob's bit as reconstructed by Alice, `m ⊕ j`.
    pub k_view_a: Option<bool>,
    /// Alice's bit as reconstructed by Bob, `m ⊕ k`.
    pub j_view_b: Option<bool>,
    pub eve_symbol_j: Option<bool>,
    pub eve_symbol_k: Option<bool>,
    pub eve: EveNotes,
    pub bob_cm_detected: Option<bool>,
    pub bob_cm_result: Option<bool>,
    pub alice_cm_result: Option<bool>,
    pub correlated: Option<bool>,
}

impl RoundOutcome {
    /// Message-mode round with a conclusive Bell measurement.
    pub fn is_valid_message(&self) -> bool {
        self.bob_mode == BobMode::Message && self.m.and_then(BellOutcome::bit).is_some()
    }

    pub fn eve_branch(&self) -> EveBranch {
        self.eve.branch
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub config: ProtocolConfig,
    pub attack: AttackDescriptor,
    pub outcomes: Vec<RoundOutcome>,
}

/// Partner-key reconstruction: `(k^(A), j^(B)) = (m ⊕ j, m ⊕ k)`.
pub fn derive_partner_keys(m: bool, j: bool, k: bool) -> (bool, bool) {
    (m ^ j, m ^ k)
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn round_seed(master_seed: u64, index: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(index as u64))
}

pub fn round_rng(master_seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(round_seed(master_seed, index))
}

pub fn run_round(
    config: &ProtocolConfig,
    strategy: &AttackStrategy,
    index: usize,
) -> Result<RoundOutcome> {
    run_round_traced(config, strategy, index).map(|(outcome, _)| outcome)
}

/// Like [`run_round`], also returning the set of modes Eve's hooks touched.
pub fn run_round_traced(
    config: &ProtocolConfig,
    strategy: &AttackStrategy,
    index: usize,
) -> Result<(RoundOutcome, BTreeSet<String>)> {
    let mut rng = round_rng(config.master_seed, index);
    let z_b = ModeOperator::z_pow(Mode::photon(BOB), true);

    let mut plan = strategy.engage(&mut rng);
    let mut state = StateVector::bell(BellSign::Minus, ALICE, BOB)?;
    if let Some(ancilla) = plan.ancilla() {
        state = state.tensor(&ancilla)?;
    }

    let j = rng.random::<bool>();
    if j {
        state = state.apply(&z_b)?;
    }

    if !plan.intercepts_forward() && config.channel_transmission < 1.0 {
        let lost = rng.random::<f64>() >= config.channel_transmission;
        if lost {
            state = measure_photon_mode(&state, BOB, true, &mut rng)?.post_state;
        }
    }

    let mut channel = Channel::new(state);
    plan.forward(&mut channel, &mut rng)?;

    let mut outcome = RoundOutcome {
        index,
        bob_mode: BobMode::Message,
        j,
        k: None,
        m: None,
        k_view_a: None,
        j_view_b: None,
        eve_symbol_j: None,
        eve_symbol_k: None,
        eve: *plan.notes(),
        bob_cm_detected: None,
        bob_cm_result: None,
        alice_cm_result: None,
        correlated: None,
    };

    if rng.random::<f64>() < config.cm_probability {
        let touched = channel.touched().clone();
        let state = channel.into_state();
        let bob = measure_photon_mode(&state, BOB, true, &mut rng)?;
        let alice = measure_mode(&bob.post_state, ALICE, &mut rng)?;
        let detected = bob.label != BasisLabel::Vac;
        outcome.bob_mode = BobMode::Control;
        outcome.bob_cm_detected = Some(detected);
        outcome.bob_cm_result = bob.label.bit();
        outcome.alice_cm_result = alice.label.bit();
        outcome.correlated = Some(detected && alice.label.bit() == bob.label.bit());
        outcome.eve = *plan.notes();
        return Ok((outcome, touched));
    }

    let k = rng.random::<bool>();
    if k {
        channel.apply_unaudited(&z_b)?;
    }
    plan.backward(&mut channel, &mut rng)?;
    let bell = bell_measure(channel.state(), ALICE, BOB, &mut rng)?;
    let m = bell.label.bit();
    let (eve_j, eve_k) = plan.infer(m);

    outcome.k = Some(k);
    outcome.m = Some(bell.label);
    if let Some(m) = m {
        let (k_view_a, j_view_b) = derive_partner_keys(m, j, k);
        outcome.k_view_a = Some(k_view_a);
        outcome.j_view_b = Some(j_view_b);
    }
    outcome.eve_symbol_j = eve_j;
    outcome.eve_symbol_k = eve_k;
    outcome.eve = *plan.notes();
    Ok((outcome, channel.touched().clone()))
}

/// Runs `config.rounds` independent rounds. Rounds execute in parallel on the
/// current rayon pool; the log is ordered by round index and does not depend
/// on scheduling.
pub fn run_experiment(config: &ProtocolConfig, strategy: &AttackStrategy) -> Result<TrialLog> {
    config.validate()?;
    let outcomes = (0..config.rounds)
        .into_par_iter()
        .map(|i| run_round(config, strategy, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialLog {
        config: *config,
        attack: strategy.descriptor(),
        outcomes,
    })
}
