use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::entropy::{binary_entropy, h2, one_minus_h2};
use crate::attacks::{AttackDescriptor, AttackKind, AttackParams};
use crate::protocol::{ALICE, BOB};
use crate::quantum::{
    BellSign, DensityMatrix, Mode, ModeOperator, OperatorKind, StateVector, ALGEBRA_TOL,
};
use crate::{Error, Result};

/// Whose key the composite attack targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackTarget {
    Alice,
    Bob,
}

/// Closed-form figures of merit for one attack configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub attack: AttackDescriptor,
    pub target: AttackTarget,
    pub p: f64,
    pub epsilon: f64,
    /// `ε(1 − p)`.
    pub x: f64,
    /// Common QBER `Q^(A) = Q^(B) = (1 − x)/2`.
    pub q_total: f64,
    pub p_corr: f64,
    /// `1 − H(Q)`, bits.
    pub i_ab: f64,
    /// Eve's information on the targeted key, bits.
    pub i_eve: f64,
    /// Eve's information on the other party's key; the attacks learn nothing
    /// about it, so this is exactly zero.
    pub i_eve_other_key: f64,
    pub security_lhs: f64,
    pub security_holds: bool,
    /// `i_eve > i_ab`.
    pub advantage: bool,
}

/// Entropic condition `H(Q) + H(P_corr) < 1`.
///
/// The verdict is taken from the margin `(1 − H(Q)) − H(P_corr)`, evaluated
/// without cancellation, so it stays correct when `Q` is so close to 1/2 that
/// the left-hand side rounds to exactly 1.
pub fn security_condition(q: f64, p_corr: f64) -> Result<(f64, bool)> {
    let lhs = binary_entropy(q)? + binary_entropy(p_corr)?;
    let margin = one_minus_h2(q) - h2(p_corr);
    Ok((lhs, margin > 0.0))
}

/// Predictions for the composite attack on `target`'s key.
pub fn analytic_report(target: AttackTarget, params: AttackParams) -> Result<AnalyticReport> {
    let params = AttackParams::new(params.p, params.epsilon)?;
    let kind = match target {
        AttackTarget::Alice => AttackKind::AliceKey(params),
        AttackTarget::Bob => AttackKind::BobKey(params),
    };
    let i_eve = match target {
        AttackTarget::Alice => params.p,
        AttackTarget::Bob => params.p / 2.0,
    };
    build_report(descriptor_of(kind), target, params, i_eve)
}

/// Predictions for any strategy with a closed form: error tuning alone is
/// the `p = 0` composite, the others return `None`.
pub fn analytic_report_for(kind: AttackKind) -> Result<Option<AnalyticReport>> {
    match kind {
        AttackKind::ErrorTuning { epsilon } => {
            let params = AttackParams::new(0.0, epsilon)?;
            build_report(descriptor_of(kind), AttackTarget::Alice, params, 0.0).map(Some)
        }
        AttackKind::AliceKey(params) => analytic_report(AttackTarget::Alice, params).map(Some),
        AttackKind::BobKey(params) => analytic_report(AttackTarget::Bob, params).map(Some),
        AttackKind::Honest | AttackKind::SwapVacuum => Ok(None),
    }
}

fn descriptor_of(kind: AttackKind) -> AttackDescriptor {
    let (name, p, epsilon) = match kind {
        AttackKind::Honest => ("honest", None, None),
        AttackKind::SwapVacuum => ("swap_vacuum", None, None),
        AttackKind::ErrorTuning { epsilon } => ("error_tuning", None, Some(epsilon)),
        AttackKind::AliceKey(a) => ("alice_key_attack", Some(a.p), Some(a.epsilon)),
        AttackKind::BobKey(a) => ("bob_key_attack", Some(a.p), Some(a.epsilon)),
    };
    AttackDescriptor {
        name: name.into(),
        p,
        epsilon,
    }
}

fn build_report(
    attack: AttackDescriptor,
    target: AttackTarget,
    params: AttackParams,
    i_eve: f64,
) -> Result<AnalyticReport> {
    let x = params.x();
    let q_total = (1.0 - x) / 2.0;
    let p_corr = 0.0;
    let i_ab = one_minus_h2(q_total);
    let (security_lhs, security_holds) = security_condition(q_total, p_corr)?;
    Ok(AnalyticReport {
        attack,
        target,
        p: params.p,
        epsilon: params.epsilon,
        x,
        q_total,
        p_corr,
        i_ab,
        i_eve,
        i_eve_other_key: 0.0,
        security_lhs,
        security_holds,
        advantage: i_eve > i_ab,
    })
}

/// `1 − H(p/2)`: the supremum of `I_AB` at fixed `p`, reached as `ε → 1`.
pub fn i_ab_range_sup(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::bad_param("p", p, "must satisfy 0 <= p < 1"));
    }
    Ok(1.0 - h2(p / 2.0))
}

/// `Tr(ρR)` with `ρ = J(ρ_AB ⊗ |e⟩⟨e|)J†` and `ρ_AB` the equal mixture of
/// `|Ψ+⟩` and `|Ψ−⟩`. `J` acts on Bob's mode and the ancilla.
pub fn p_corr_true(j: &ModeOperator, ancilla: &StateVector) -> Result<f64> {
    let terms = [
        (0.5, StateVector::bell(BellSign::Plus, ALICE, BOB)?),
        (0.5, StateVector::bell(BellSign::Minus, ALICE, BOB)?),
    ];
    p_corr_true_for(&terms, j, ancilla)
}

/// [`p_corr_true`] for an arbitrary mixture over modes `(A, B)`.
pub fn p_corr_true_for(
    terms_ab: &[(f64, StateVector)],
    j: &ModeOperator,
    ancilla: &StateVector,
) -> Result<f64> {
    let joint = terms_ab
        .iter()
        .map(|(w, s)| Ok((*w, s.tensor(ancilla)?)))
        .collect::<Result<Vec<_>>>()?;
    let rho = DensityMatrix::from_mixture(&joint)?.conjugate(j)?;
    rho.expectation(&ModeOperator::parity(ALICE, BOB))
}

/// `⟨μ|ν⟩` with `μ = K Z_B^0 J |Ψ+⟩|e⟩` and `ν = K Z_B^1 J |Ψ−⟩|e⟩`.
pub fn claimed_overlap(
    j: &ModeOperator,
    k: &ModeOperator,
    ancilla: &StateVector,
) -> Result<Complex64> {
    for op in [j, k] {
        let err = op.unitarity_error();
        if op.kind() != OperatorKind::Unitary || err > ALGEBRA_TOL {
            return Err(Error::NotUnitary(err));
        }
    }
    let z = ModeOperator::z_pow(Mode::photon(BOB), true);
    let mu = StateVector::bell(BellSign::Plus, ALICE, BOB)?
        .tensor(ancilla)?
        .apply(j)?
        .apply(k)?;
    let nu = StateVector::bell(BellSign::Minus, ALICE, BOB)?
        .tensor(ancilla)?
        .apply(j)?
        .apply(&z)?
        .apply(k)?;
    mu.inner(&nu)
}

/// Overlap-based estimate `½(1 + Re⟨μ|ν⟩)` of the correlated-result
/// probability. It agrees with [`p_corr_true`] for the honest scheme but not
/// in general.
pub fn p_corr_claimed(j: &ModeOperator, k: &ModeOperator, ancilla: &StateVector) -> Result<f64> {
    Ok(0.5 * (1.0 + claimed_overlap(j, k, ancilla)?.re))
}
