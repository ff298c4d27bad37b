//! Eavesdropper strategies.
//!
//! A strategy is an immutable descriptor. At the start of every round it is
//! [engaged](AttackStrategy::engage), which picks Eve's branch for that round
//! and returns a [`RoundPlan`] carrying the per-round private notes. The plan
//! exposes the three hooks the protocol calls: `forward` on the Alice→Bob
//! leg, `backward` on the Bob→Alice leg (message mode only) and `infer` once
//! Alice has announced her Bell result.
//!
//! Hooks only see the quantum state through a [`Channel`], which refuses any
//! operation on Alice's mode and records every mode touched.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::protocol::{ALICE, BOB, EVE};
use crate::quantum::{measure_photon_mode, BasisLabel, Mode, ModeOperator, StateVector};
use crate::{Error, Result};

/// Parameters of the composite attacks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackParams {
    /// Probability of the eavesdropping branch, `0 ≤ p < 1`.
    pub p: f64,
    /// Error-tuning bias, `0 < ε ≤ 1`.
    pub epsilon: f64,
}

impl AttackParams {
    pub fn new(p: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::bad_param("p", p, "must satisfy 0 <= p < 1"));
        }
        check_epsilon(epsilon)?;
        Ok(AttackParams { p, epsilon })
    }

    /// Visibility `x = ε(1 − p)` of the legitimate correlations.
    pub fn x(&self) -> f64 {
        self.epsilon * (1.0 - self.p)
    }
}

/// Values above one half are accepted but lie outside the conventional
/// error-tuning bound `ε ≤ 1/2`; callers may warn about them.
pub fn epsilon_exceeds_half(epsilon: f64) -> bool {
    epsilon > 0.5
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::bad_param(
            "epsilon",
            epsilon,
            "must satisfy 0 < epsilon <= 1",
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum AttackKind {
    Honest,
    SwapVacuum,
    ErrorTuning { epsilon: f64 },
    AliceKey(AttackParams),
    BobKey(AttackParams),
}

/// Serializable `{name, p, epsilon}` summary of a strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackDescriptor {
    pub name: String,
    pub p: Option<f64>,
    pub epsilon: Option<f64>,
}

/// What Eve did in a given round.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveBranch {
    /// No interaction at all.
    #[default]
    Passive,
    /// Photon swapped into Eve's vacuum mode and back, nothing learnt.
    Swap,
    /// Biased phase flips on the return leg.
    ErrorTuning,
    /// Information-gaining branch of a composite attack.
    Eavesdropping,
}

impl EveBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            EveBranch::Passive => "passive",
            EveBranch::Swap => "swap",
            EveBranch::ErrorTuning => "error_tuning",
            EveBranch::Eavesdropping => "eavesdropping",
        }
    }
}

/// Eve's private per-round record.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveNotes {
    pub branch: EveBranch,
    /// Phase-flip exponent applied on the return leg.
    pub q: Option<bool>,
    /// Polarization Eve measured on the forward leg (attack on Bob's key).
    pub t: Option<bool>,
    /// Result of Eve's measurement of her own mode (attack on Bob's key).
    pub n: Option<bool>,
}

#[derive(Debug, Clone)]
struct Gates {
    z_b: ModeOperator,
    swap: ModeOperator,
    v: ModeOperator,
    x_b: ModeOperator,
    /// `(X_B^t V)†` indexed by `t`.
    unwind: [ModeOperator; 2],
    /// Places a fresh `|t⟩` photon into an empty mode B, indexed by `t`.
    reload: [ModeOperator; 2],
}

impl Gates {
    fn new() -> Result<Self> {
        let v = ModeOperator::v(BOB, EVE);
        let x_b = ModeOperator::x_pow(Mode::photon(BOB), true);
        Ok(Gates {
            z_b: ModeOperator::z_pow(Mode::photon(BOB), true),
            swap: ModeOperator::swap(BOB, EVE),
            unwind: [v.dagger()?, x_b.after(&v)?.dagger()?],
            reload: [
                ModeOperator::vacuum_exchange(BOB, BasisLabel::Zero),
                ModeOperator::vacuum_exchange(BOB, BasisLabel::One),
            ],
            v,
            x_b,
        })
    }
}

#[derive(Debug, Clone)]
pub struct AttackStrategy {
    kind: AttackKind,
    gates: Gates,
}

/// No eavesdropper: both channel legs are the identity.
pub fn honest() -> AttackStrategy {
    AttackStrategy::from_kind(AttackKind::Honest).expect("honest strategy is always valid")
}

/// Eve swaps Bob's photon into an empty mode of her own on the way out and
/// swaps it back on the way home.
pub fn swap_vacuum() -> AttackStrategy {
    AttackStrategy::from_kind(AttackKind::SwapVacuum).expect("swap strategy is always valid")
}

/// Phase flip `Z_B^q` on the return leg with `P(q = 1) = (1 − ε)/2`.
pub fn error_tuning(epsilon: f64) -> Result<AttackStrategy> {
    AttackStrategy::from_kind(AttackKind::ErrorTuning { epsilon })
}

/// With probability `p`, swap the photon out and return it with a uniform
/// phase flip `Z^q`, learning `j = m ⊕ q`; otherwise error tuning.
pub fn alice_key_attack(params: AttackParams) -> Result<AttackStrategy> {
    AttackStrategy::from_kind(AttackKind::AliceKey(params))
}

/// With probability `p`, measure Bob's photon (result `t`), send him half of
/// `X^t V |vac⟩|0⟩`, undo it on the way back and read `n = k·t` from her own
/// mode before resending `|t⟩` to Alice; otherwise error tuning.
pub fn bob_key_attack(params: AttackParams) -> Result<AttackStrategy> {
    AttackStrategy::from_kind(AttackKind::BobKey(params))
}

impl AttackStrategy {
    pub fn from_kind(kind: AttackKind) -> Result<Self> {
        match kind {
            AttackKind::Honest | AttackKind::SwapVacuum => {}
            AttackKind::ErrorTuning { epsilon } => check_epsilon(epsilon)?,
            AttackKind::AliceKey(params) | AttackKind::BobKey(params) => {
                AttackParams::new(params.p, params.epsilon)?;
            }
        }
        Ok(AttackStrategy {
            kind,
            gates: Gates::new()?,
        })
    }

    pub fn kind(&self) -> AttackKind {
        self.kind
    }

    pub fn descriptor(&self) -> AttackDescriptor {
        let (name, p, epsilon) = match self.kind {
            AttackKind::Honest => ("honest", None, None),
            AttackKind::SwapVacuum => ("swap_vacuum", None, None),
            AttackKind::ErrorTuning { epsilon } => ("error_tuning", None, Some(epsilon)),
            AttackKind::AliceKey(a) => ("alice_key_attack", Some(a.p), Some(a.epsilon)),
            AttackKind::BobKey(a) => ("bob_key_attack", Some(a.p), Some(a.epsilon)),
        };
        AttackDescriptor {
            name: name.to_string(),
            p,
            epsilon,
        }
    }

    /// Picks Eve's branch for one round.
    pub fn engage<R: Rng + ?Sized>(&self, rng: &mut R) -> RoundPlan<'_> {
        let branch = match self.kind {
            AttackKind::Honest => EveBranch::Passive,
            AttackKind::SwapVacuum => EveBranch::Swap,
            AttackKind::ErrorTuning { .. } => EveBranch::ErrorTuning,
            AttackKind::AliceKey(a) | AttackKind::BobKey(a) => {
                if rng.random::<f64>() < a.p {
                    EveBranch::Eavesdropping
                } else {
                    EveBranch::ErrorTuning
                }
            }
        };
        RoundPlan {
            strategy: self,
            notes: EveNotes {
                branch,
                ..EveNotes::default()
            },
        }
    }

    fn tuning_epsilon(&self) -> f64 {
        match self.kind {
            AttackKind::ErrorTuning { epsilon } => epsilon,
            AttackKind::AliceKey(a) | AttackKind::BobKey(a) => a.epsilon,
            AttackKind::Honest | AttackKind::SwapVacuum => 1.0,
        }
    }
}

/// One round's worth of Eve: the chosen branch plus her private notes.
#[derive(Debug, Clone)]
pub struct RoundPlan<'a> {
    strategy: &'a AttackStrategy,
    notes: EveNotes,
}

impl RoundPlan<'_> {
    pub fn branch(&self) -> EveBranch {
        self.notes.branch
    }

    pub fn notes(&self) -> &EveNotes {
        &self.notes
    }

    /// Eve's mode E, if this round uses one.
    pub fn ancilla(&self) -> Option<StateVector> {
        let label = match (self.strategy.kind, self.notes.branch) {
            (AttackKind::SwapVacuum, _) => BasisLabel::Vac,
            (AttackKind::AliceKey(_), EveBranch::Eavesdropping) => BasisLabel::Vac,
            (AttackKind::BobKey(_), EveBranch::Eavesdropping) => BasisLabel::Zero,
            _ => return None,
        };
        Some(StateVector::single(Mode::photon(EVE), label).expect("photon mode accepts all labels"))
    }

    /// Eve sits at Alice's output on the forward leg and replaces the lossy
    /// channel with her own lossless link.
    pub fn intercepts_forward(&self) -> bool {
        matches!(
            self.notes.branch,
            EveBranch::Swap | EveBranch::Eavesdropping
        )
    }

    pub fn forward<R: Rng + ?Sized>(&mut self, channel: &mut Channel, rng: &mut R) -> Result<()> {
        let gates = &self.strategy.gates;
        match (self.strategy.kind, self.notes.branch) {
            (AttackKind::SwapVacuum, _) | (AttackKind::AliceKey(_), EveBranch::Eavesdropping) => {
                channel.apply(&gates.swap)
            }
            (AttackKind::BobKey(_), EveBranch::Eavesdropping) => {
                // A vacuum result only happens if the photon was lost upstream.
                let t = channel
                    .measure_destructive(BOB, rng)?
                    .bit()
                    .unwrap_or(false);
                self.notes.t = Some(t);
                channel.apply(&gates.v)?;
                if t {
                    channel.apply(&gates.x_b)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn backward<R: Rng + ?Sized>(&mut self, channel: &mut Channel, rng: &mut R) -> Result<()> {
        let gates = &self.strategy.gates;
        match (self.strategy.kind, self.notes.branch) {
            (AttackKind::Honest, _) => Ok(()),
            (AttackKind::SwapVacuum, _) => channel.apply(&gates.swap),
            (AttackKind::AliceKey(_), EveBranch::Eavesdropping) => {
                channel.apply(&gates.swap)?;
                let q = rng.random::<f64>() < 0.5;
                self.notes.q = Some(q);
                if q {
                    channel.apply(&gates.z_b)?;
                }
                Ok(())
            }
            (AttackKind::BobKey(_), EveBranch::Eavesdropping) => {
                let t = self.notes.t.unwrap_or(false);
                channel.apply(&gates.unwind[t as usize])?;
                let n = channel.measure_destructive(EVE, rng)?;
                self.notes.n = Some(n == BasisLabel::One);
                channel.apply(&gates.reload[t as usize])
            }
            (_, EveBranch::ErrorTuning) => {
                let flip = (1.0 - self.strategy.tuning_epsilon()) / 2.0;
                let q = rng.random::<f64>() < flip;
                self.notes.q = Some(q);
                if q {
                    channel.apply(&gates.z_b)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Eve's guesses `(j, k)` given Alice's announcement; `None` means she
    /// makes no inference this round.
    pub fn infer(&self, m: Option<bool>) -> (Option<bool>, Option<bool>) {
        match (self.strategy.kind, self.notes.branch) {
            (AttackKind::AliceKey(_), EveBranch::Eavesdropping) => {
                (m.zip(self.notes.q).map(|(m, q)| m ^ q), None)
            }
            (AttackKind::BobKey(_), EveBranch::Eavesdropping) => match self.notes.t {
                Some(true) => (None, self.notes.n),
                _ => (None, None),
            },
            _ => (None, None),
        }
    }
}

/// Eve's view of the joint state. Operations on Alice's mode are refused.
#[derive(Debug, Clone)]
pub struct Channel {
    state: StateVector,
    touched: BTreeSet<String>,
}

impl Channel {
    pub fn new(state: StateVector) -> Self {
        Channel {
            state,
            touched: BTreeSet::new(),
        }
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn into_state(self) -> StateVector {
        self.state
    }

    /// Modes the hooks have acted on so far.
    pub fn touched(&self) -> &BTreeSet<String> {
        &self.touched
    }

    fn admit(&mut self, mode: &str) -> Result<()> {
        if mode == ALICE || (mode != BOB && mode != EVE) {
            return Err(Error::ForbiddenMode(mode.to_string()));
        }
        self.touched.insert(mode.to_string());
        Ok(())
    }

    pub fn apply(&mut self, op: &ModeOperator) -> Result<()> {
        for m in op.targets() {
            self.admit(&m.name)?;
        }
        self.state = self.state.apply(op)?;
        Ok(())
    }

    /// Bob's own encoding while the photon is in his hands.
    pub(crate) fn apply_unaudited(&mut self, op: &ModeOperator) -> Result<()> {
        self.state = self.state.apply(op)?;
        Ok(())
    }

    pub fn measure_destructive<R: Rng + ?Sized>(
        &mut self,
        mode: &str,
        rng: &mut R,
    ) -> Result<BasisLabel> {
        self.admit(mode)?;
        let out = measure_photon_mode(&self.state, mode, true, rng)?;
        self.state = out.post_state;
        Ok(out.label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{BasisLabel::*, BellSign};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn singlet_with(ancilla: Option<StateVector>) -> StateVector {
        let s = StateVector::bell(BellSign::Minus, ALICE, BOB).unwrap();
        match ancilla {
            Some(e) => s.tensor(&e).unwrap(),
            None => s,
        }
    }

    #[test]
    fn params_validation() {
        assert!(AttackParams::new(0.0, 1.0).is_ok());
        assert!(AttackParams::new(1.0, 0.5).is_err());
        assert!(AttackParams::new(-0.1, 0.5).is_err());
        assert!(AttackParams::new(0.5, 0.0).is_err());
        assert!(AttackParams::new(0.5, 1.01).is_err());
        assert!(error_tuning(0.0).is_err());
        assert!(error_tuning(f64::NAN).is_err());
        assert!((AttackParams::new(0.5, 0.5).unwrap().x() - 0.25).abs() < 1e-15);
        assert!(epsilon_exceeds_half(0.75));
        assert!(!epsilon_exceeds_half(0.5));
    }

    #[test]
    fn descriptors() {
        let d = alice_key_attack(AttackParams::new(0.5, 0.25).unwrap())
            .unwrap()
            .descriptor();
        assert_eq!(d.name, "alice_key_attack");
        assert_eq!(d.p, Some(0.5));
        assert_eq!(d.epsilon, Some(0.25));
        assert_eq!(honest().descriptor().p, None);
    }

    #[test]
    fn channel_refuses_alice_mode() {
        let mut ch = Channel::new(singlet_with(None));
        let za = ModeOperator::z_pow(Mode::qubit(ALICE), true);
        assert!(matches!(ch.apply(&za), Err(Error::ForbiddenMode(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(ch.measure_destructive(ALICE, &mut rng).is_err());
        assert!(ch.touched().is_empty());
    }

    #[test]
    fn honest_plan_is_inert() {
        let s = honest();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut plan = s.engage(&mut rng);
        assert_eq!(plan.branch(), EveBranch::Passive);
        assert!(plan.ancilla().is_none());
        let mut ch = Channel::new(singlet_with(None));
        plan.forward(&mut ch, &mut rng).unwrap();
        plan.backward(&mut ch, &mut rng).unwrap();
        assert_eq!(ch.state(), &singlet_with(None));
        assert_eq!(plan.infer(Some(true)), (None, None));
    }

    #[test]
    fn bob_attack_unwinds_to_k_times_t() {
        // Forward and backward hooks with Bob's Z^k in between, for every
        // branch of Eve's measurement and every k.
        let strategy = bob_key_attack(AttackParams::new(0.999_999, 1.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let z = ModeOperator::z_pow(Mode::photon(BOB), true);
        let mut seen = BTreeSet::new();
        for _ in 0..200 {
            let mut plan = strategy.engage(&mut rng);
            if plan.branch() != EveBranch::Eavesdropping {
                continue;
            }
            let k = rng.random::<bool>();
            let mut ch = Channel::new(singlet_with(plan.ancilla()));
            plan.forward(&mut ch, &mut rng).unwrap();
            let t = plan.notes().t.unwrap();
            if k {
                ch.apply(&z).unwrap();
            }
            plan.backward(&mut ch, &mut rng).unwrap();
            assert_eq!(plan.notes().n, Some(k && t));
            let (ej, ek) = plan.infer(Some(false));
            assert_eq!(ej, None);
            assert_eq!(ek, if t { Some(k) } else { None });
            // Alice's qubit is |1−t⟩ and Eve resent |t⟩ in B; E is empty.
            let expected = StateVector::basis(
                vec![Mode::qubit(ALICE), Mode::photon(BOB), Mode::photon(EVE)],
                &[BasisLabel::from_bit(!t), BasisLabel::from_bit(t), Vac],
            )
            .unwrap();
            assert!(ch.state().distance_up_to_phase(&expected) < 1e-12);
            assert!(ch.touched().iter().all(|m| m == BOB || m == EVE));
            seen.insert((k, t));
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn alice_attack_eavesdropping_branch_infers_j() {
        let strategy = alice_key_attack(AttackParams::new(0.999_999, 1.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut plan = strategy.engage(&mut rng);
        assert_eq!(plan.branch(), EveBranch::Eavesdropping);
        assert!(plan.intercepts_forward());
        let mut ch = Channel::new(singlet_with(plan.ancilla()));
        plan.forward(&mut ch, &mut rng).unwrap();
        plan.backward(&mut ch, &mut rng).unwrap();
        let q = plan.notes().q.unwrap();
        assert_eq!(plan.infer(Some(true)), (Some(!q), None));
        assert_eq!(plan.infer(None), (None, None));
    }
}
