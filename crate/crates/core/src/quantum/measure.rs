use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BasisLabel, BellSign, Mode, ModeKind, ModeOperator, StateVector};
use crate::{Error, Result};

/// Result of one sampled projective measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome<L> {
    pub label: L,
    pub probability: f64,
    /// Normalized post-measurement state over the same modes.
    pub post_state: StateVector,
}

/// Outcome of Alice's Bell-state discrimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellOutcome {
    /// `|Ψ−⟩`, announced as `m = 0`.
    PsiMinus,
    /// `|Ψ+⟩`, announced as `m = 1`.
    PsiPlus,
    /// Neither Bell state (e.g. the photon never came back).
    Fail,
}

impl BellOutcome {
    /// The announced bit `m`, `None` for a failed measurement.
    pub fn bit(self) -> Option<bool> {
        match self {
            BellOutcome::PsiMinus => Some(false),
            BellOutcome::PsiPlus => Some(true),
            BellOutcome::Fail => None,
        }
    }
}

/// Unnormalized projected branches `(label, probability, P_label |ψ⟩)` of the
/// Bell measurement on qubit `a` and photon `b`, ordered `[m=0, m=1, FAIL]`.
pub fn bell_branches(
    state: &StateVector,
    a: &str,
    b: &str,
) -> Result<Vec<(BellOutcome, f64, StateVector)>> {
    require_kind(state, a, ModeKind::Qubit)?;
    require_kind(state, b, ModeKind::Photon)?;
    let minus = state.apply(&ModeOperator::projector(&StateVector::bell(
        BellSign::Minus,
        a,
        b,
    )?))?;
    let plus = state.apply(&ModeOperator::projector(&StateVector::bell(
        BellSign::Plus,
        a,
        b,
    )?))?;
    let fail = state.sub(&minus).sub(&plus);
    Ok([
        (BellOutcome::PsiMinus, minus),
        (BellOutcome::PsiPlus, plus),
        (BellOutcome::Fail, fail),
    ]
    .into_iter()
    .map(|(label, branch)| (label, branch.norm_sqr(), branch))
    .collect())
}

/// Unnormalized branches of a computational-basis measurement of `mode`, in
/// the mode's basis order (`VAC, 0, 1` for photons).
pub fn photon_branches(
    state: &StateVector,
    mode: &str,
) -> Result<Vec<(BasisLabel, f64, StateVector)>> {
    let kind = state.mode(mode)?.kind;
    kind.labels()
        .iter()
        .map(|&label| {
            let proj = ModeOperator::projector(&StateVector::single(Mode::new(mode, kind), label)?);
            let branch = state.apply(&proj)?;
            Ok((label, branch.norm_sqr(), branch))
        })
        .collect()
}

/// Samples Alice's three-outcome Bell measurement.
pub fn bell_measure<R: Rng + ?Sized>(
    state: &StateVector,
    a: &str,
    b: &str,
    rng: &mut R,
) -> Result<MeasurementOutcome<BellOutcome>> {
    sample(bell_branches(state, a, b)?, rng)
}

/// Computational-basis measurement of a photon mode. A destructive detection
/// absorbs the photon, leaving the mode in `|vac⟩`.
pub fn measure_photon_mode<R: Rng + ?Sized>(
    state: &StateVector,
    mode: &str,
    destructive: bool,
    rng: &mut R,
) -> Result<MeasurementOutcome<BasisLabel>> {
    require_kind(state, mode, ModeKind::Photon)?;
    let mut outcome = sample(photon_branches(state, mode)?, rng)?;
    if destructive && outcome.label != BasisLabel::Vac {
        outcome.post_state = outcome
            .post_state
            .apply(&ModeOperator::vacuum_exchange(mode, outcome.label))?;
    }
    Ok(outcome)
}

/// Non-destructive computational-basis measurement of any mode.
pub fn measure_mode<R: Rng + ?Sized>(
    state: &StateVector,
    mode: &str,
    rng: &mut R,
) -> Result<MeasurementOutcome<BasisLabel>> {
    sample(photon_branches(state, mode)?, rng)
}

fn require_kind(state: &StateVector, mode: &str, kind: ModeKind) -> Result<()> {
    if state.mode(mode)?.kind != kind {
        return Err(Error::WrongModeKind {
            mode: mode.to_string(),
            expected: kind.name(),
        });
    }
    Ok(())
}

/// Inverse-CDF sampling over the fixed branch order with a single uniform draw.
fn sample<L: Copy, R: Rng + ?Sized>(
    branches: Vec<(L, f64, StateVector)>,
    rng: &mut R,
) -> Result<MeasurementOutcome<L>> {
    let u: f64 = rng.random();
    let total: f64 = branches.iter().map(|b| b.1).sum();
    let mut cumulative = 0.0;
    let mut chosen = None;
    for (i, (_, p, _)) in branches.iter().enumerate() {
        if *p <= 0.0 {
            continue;
        }
        cumulative += p / total;
        chosen = Some(i);
        if u < cumulative {
            break;
        }
    }
    let i = chosen.ok_or(Error::NotNormalized(total))?;
    let (label, probability, branch) = branches.into_iter().nth(i).expect("index in range");
    Ok(MeasurementOutcome {
        label,
        probability,
        post_state: branch.scaled(probability.sqrt().recip()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::BasisLabel::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn singlet_with_vacuum() -> StateVector {
        StateVector::bell(BellSign::Minus, "A", "B")
            .unwrap()
            .tensor(&StateVector::single(Mode::photon("E"), Vac).unwrap())
            .unwrap()
    }

    #[test]
    fn singlet_gives_m0_with_certainty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let out = bell_measure(&singlet_with_vacuum(), "A", "B", &mut rng).unwrap();
            assert_eq!(out.label, BellOutcome::PsiMinus);
            assert!((out.probability - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_splits_evenly() {
        for t in [false, true] {
            let s = StateVector::basis(
                vec![Mode::qubit("A"), Mode::photon("B")],
                &[BasisLabel::from_bit(!t), BasisLabel::from_bit(t)],
            )
            .unwrap();
            let probs: Vec<f64> = bell_branches(&s, "A", "B")
                .unwrap()
                .iter()
                .map(|b| b.1)
                .collect();
            assert!((probs[0] - 0.5).abs() < 1e-12);
            assert!((probs[1] - 0.5).abs() < 1e-12);
            assert!(probs[2].abs() < 1e-12);
        }
    }

    #[test]
    fn empty_photon_mode_always_fails() {
        let s =
            StateVector::basis(vec![Mode::qubit("A"), Mode::photon("B")], &[Zero, Vac]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = bell_measure(&s, "A", "B", &mut rng).unwrap();
        assert_eq!(out.label, BellOutcome::Fail);
        assert!((out.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn destructive_measurement_collapses_partner_and_empties_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut seen = [0usize; 2];
        for _ in 0..200 {
            let out = measure_photon_mode(&singlet_with_vacuum(), "B", true, &mut rng).unwrap();
            let t = out
                .label
                .bit()
                .expect("singlet always carries a photon in B");
            seen[t as usize] += 1;
            assert!((out.probability - 0.5).abs() < 1e-12);
            let expected = StateVector::basis(
                vec![Mode::qubit("A"), Mode::photon("B"), Mode::photon("E")],
                &[BasisLabel::from_bit(!t), Vac, Vac],
            )
            .unwrap();
            assert!(out.post_state.distance_up_to_phase(&expected) < 1e-12);
        }
        assert!(seen[0] > 50 && seen[1] > 50);
    }

    #[test]
    fn vacuum_mode_measures_vac() {
        let s = StateVector::single(Mode::photon("B"), Vac).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = measure_photon_mode(&s, "B", true, &mut rng).unwrap();
        assert_eq!(out.label, Vac);
        assert_eq!(out.post_state, s);
    }

    #[test]
    fn photon_measurement_requires_photon_mode() {
        let s = StateVector::single(Mode::qubit("A"), Zero).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            measure_photon_mode(&s, "A", false, &mut rng),
            Err(Error::WrongModeKind { .. })
        ));
        assert_eq!(measure_mode(&s, "A", &mut rng).unwrap().label, Zero);
    }
}
