//! Invariant suite behind `qdkd verify`.

use std::f64::consts::FRAC_1_SQRT_2;

use qdkd::analysis::{
    analytic_report, empirical_statistics, empirical_statistics_where, i_ab_range_sup, loss_report,
    AttackTarget,
};
use qdkd::attacks::{alice_key_attack, bob_key_attack, honest, AttackParams, EveBranch};
use qdkd::protocol::{run_experiment, ProtocolConfig, ALICE, BOB, EVE};
use qdkd::quantum::{
    bell_branches, photon_branches, BasisLabel, BellSign, Complex64, Mode, ModeOperator,
    OperatorKind, StateVector, ALGEBRA_TOL,
};

use crate::commands::{compare_scheme, Scheme};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub rounds: usize,
    pub seed: u64,
    /// Scales Eve's `V` gate by `1 + δ`, breaking unitarity on purpose.
    pub perturb_v: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            rounds: 100_000,
            seed: 42,
            perturb_v: None,
        }
    }
}

fn eve_v(perturb: Option<f64>) -> ModeOperator {
    let v = ModeOperator::v(BOB, EVE);
    match perturb {
        None => v,
        Some(d) => ModeOperator::from_matrix_unchecked(
            v.targets().to_vec(),
            v.matrix() * Complex64::new(1.0 + d, 0.0),
            OperatorKind::Unitary,
        )
        .expect("same shape as V"),
    }
}

fn show(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |x| format!("{x:.6}"))
}

/// `3σ` binomial band around `r`.
pub fn within_3_sigma(hat: f64, r: f64, n: usize) -> bool {
    (hat - r).abs() <= 3.0 * (r * (1.0 - r) / n as f64).sqrt() + 1e-15
}

fn unitarity(perturb: Option<f64>) -> Check {
    let b = Mode::photon(BOB);
    let gates = [
        ("V", eve_v(perturb)),
        ("SWAP", ModeOperator::swap(BOB, EVE)),
        ("Z", ModeOperator::z_pow(b.clone(), true)),
        ("X", ModeOperator::x_pow(b, true)),
        (
            "vacuum_exchange",
            ModeOperator::vacuum_exchange(BOB, BasisLabel::One),
        ),
    ];
    let (worst, err) = gates
        .iter()
        .map(|(n, g)| (*n, g.unitarity_error()))
        .fold(("", 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    Check::new(
        "unitarity",
        err <= ALGEBRA_TOL,
        format!(
            "max |U†U − I| = {err:.3e} ({})",
            if worst.is_empty() { "all" } else { worst }
        ),
    )
}

/// Forward preparation, Bob's encoding, Eve's unwinding and her readout.
fn pipeline_identities(perturb: Option<f64>) -> Check {
    let run = || -> qdkd::Result<(f64, f64)> {
        let v = eve_v(perturb);
        let input = StateVector::basis(
            vec![Mode::photon(BOB), Mode::photon(EVE)],
            &[BasisLabel::Vac, BasisLabel::Zero],
        )?;
        let (mut amp_err, mut prob_err) = (0.0f64, 0.0f64);
        for t in [false, true] {
            let xv = ModeOperator::x_pow(Mode::photon(BOB), t).after(&v)?;
            let undo = xv.dagger()?;
            for k in [false, true] {
                let out = input
                    .apply(&xv)?
                    .apply(&ModeOperator::z_pow(Mode::photon(BOB), k))?
                    .apply(&undo)?;
                let n = BasisLabel::from_bit(k && t);
                let expected = StateVector::basis(
                    vec![Mode::photon(BOB), Mode::photon(EVE)],
                    &[BasisLabel::Vac, n],
                )?;
                amp_err = amp_err.max(out.distance_up_to_phase(&expected));
                let p_n = photon_branches(&out, EVE)?
                    .into_iter()
                    .find(|b| b.0 == n)
                    .map_or(0.0, |b| b.1);
                prob_err = prob_err.max((p_n - 1.0).abs());
            }
        }
        Ok((amp_err, prob_err))
    };
    match run() {
        Ok((a, p)) => Check::new(
            "pipeline_identities",
            a < ALGEBRA_TOL && p < ALGEBRA_TOL,
            format!("amplitude error {a:.3e}, readout error {p:.3e}"),
        ),
        Err(e) => Check::new("pipeline_identities", false, e.to_string()),
    }
}

fn resend_split() -> Check {
    let run = || -> qdkd::Result<f64> {
        let mut worst = 0.0f64;
        for t in [false, true] {
            let s = StateVector::basis(
                vec![Mode::qubit(ALICE), Mode::photon(BOB)],
                &[BasisLabel::from_bit(!t), BasisLabel::from_bit(t)],
            )?;
            let branches = bell_branches(&s, ALICE, BOB)?;
            for (i, want) in [0.5, 0.5, 0.0].into_iter().enumerate() {
                worst = worst.max((branches[i].1 - want).abs());
            }
            for sign in [BellSign::Minus, BellSign::Plus] {
                let overlap = StateVector::bell(sign, ALICE, BOB)?.inner(&s)?.norm();
                worst = worst.max((overlap - FRAC_1_SQRT_2).abs());
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(w) => Check::new(
            "resend_split",
            w < ALGEBRA_TOL,
            format!("max deviation {w:.3e}"),
        ),
        Err(e) => Check::new("resend_split", false, e.to_string()),
    }
}

fn counterexample() -> Check {
    match (compare_scheme(Scheme::Swap), compare_scheme(Scheme::Honest)) {
        (Ok(s), Ok(h)) => Check::new(
            "counterexample",
            s.reproduces() && h.reproduces() && s.p_corr_true.abs() < 1e-12,
            format!("{}; {}", s.line(), h.line()),
        ),
        (Err(e), _) | (_, Err(e)) => Check::new("counterexample", false, e.to_string()),
    }
}

fn monte_carlo(target: AttackTarget, p: f64, epsilon: f64, opts: &VerifyOptions) -> Vec<Check> {
    let name = match target {
        AttackTarget::Alice => "mc_alice",
        AttackTarget::Bob => "mc_bob",
    };
    let params = AttackParams::new(p, epsilon).expect("fixed parameters are valid");
    let strategy = match target {
        AttackTarget::Alice => alice_key_attack(params),
        AttackTarget::Bob => bob_key_attack(params),
    }
    .expect("fixed parameters are valid");
    let config = ProtocolConfig::new(opts.rounds, opts.seed);
    let log = match run_experiment(&config, &strategy) {
        Ok(log) => log,
        Err(e) => return vec![Check::new(name, false, e.to_string())],
    };
    let s = empirical_statistics(&log);
    let r = analytic_report(target, params).expect("fixed parameters are valid");
    let loss = loss_report(1.0, None, target, p).expect("fixed parameters are valid");
    let (i_hat, i_want) = match target {
        AttackTarget::Alice => (s.i_aj_eve_hat, p),
        AttackTarget::Bob => (s.i_bk_eve_hat, p / 2.0),
    };
    let n = s.n_mm_valid;
    let q_ok = [s.q_a_hat, s.q_b_hat]
        .iter()
        .all(|q| q.is_some_and(|q| within_3_sigma(q, r.q_total, n)));
    let i_ok = i_hat.is_some_and(|i| (i - i_want).abs() <= 0.02);
    let pobs_ok = s
        .p_obs_hat
        .is_some_and(|x| within_3_sigma(x, loss.p_obs_formula, s.n_cm));
    let mut checks = vec![Check::new(
        name,
        q_ok && i_ok && pobs_ok && s.p_corr_hat == Some(0.0),
        format!(
            "Q={:.6} q_a={} q_b={} I_eve={} (want {i_want}) P_obs={} (want {:.6}) P_corr={} N_MM={n}",
            r.q_total,
            show(s.q_a_hat),
            show(s.q_b_hat),
            show(i_hat),
            show(s.p_obs_hat),
            loss.p_obs_formula,
            show(s.p_corr_hat)
        ),
    )];
    if target == AttackTarget::Bob {
        let e = empirical_statistics_where(&log, |o| o.eve_branch() == EveBranch::Eavesdropping);
        let ok = e
            .q_a_hat
            .is_some_and(|q| within_3_sigma(q, 0.5, e.n_mm_valid))
            && e.p_obs_hat.is_some_and(|x| within_3_sigma(x, 0.5, e.n_cm))
            && e.p_corr_hat == Some(0.0);
        checks.push(Check::new(
            "mc_bob_branch",
            ok,
            format!(
                "branch QBER {} detection {}",
                show(e.q_a_hat),
                show(e.p_obs_hat)
            ),
        ));
    }
    checks
}

fn honest_baseline(opts: &VerifyOptions) -> Check {
    let config = ProtocolConfig::new(opts.rounds.min(10_000), opts.seed);
    match run_experiment(&config, &honest()) {
        Ok(log) => {
            let s = empirical_statistics(&log);
            let ok = s.q_a_hat == Some(0.0)
                && s.q_b_hat == Some(0.0)
                && s.p_corr_hat == Some(0.0)
                && s.p_obs_hat == Some(1.0);
            Check::new(
                "honest_baseline",
                ok,
                format!(
                    "Q_A={} Q_B={} P_corr={} P_obs={}",
                    show(s.q_a_hat),
                    show(s.q_b_hat),
                    show(s.p_corr_hat),
                    show(s.p_obs_hat)
                ),
            )
        }
        Err(e) => Check::new("honest_baseline", false, e.to_string()),
    }
}

/// p-major grid p ∈ {0.1..0.9}, ε ∈ {0.05..1.0}.
pub fn advantage_grid() -> (Vec<f64>, Vec<f64>) {
    let p = (1..=9).map(|i| i as f64 / 10.0).collect();
    let eps = (1..=20).map(|i| i as f64 / 20.0).collect();
    (p, eps)
}

fn advantage_sweep() -> Check {
    let (ps, eps) = advantage_grid();
    let mut missing = Vec::new();
    let mut insecure = 0;
    for target in [AttackTarget::Alice, AttackTarget::Bob] {
        for &p in &ps {
            let mut found = false;
            for &e in &eps {
                let r = analytic_report(target, AttackParams::new(p, e).expect("grid is in range"))
                    .expect("grid is in range");
                insecure += usize::from(!r.security_holds);
                found |= r.security_holds && r.advantage;
            }
            if !found {
                missing.push(format!("{target:?} p={p}"));
            }
        }
    }
    Check::new(
        "advantage_sweep",
        missing.is_empty() && insecure == 0,
        if missing.is_empty() {
            format!("every p has a secure ε with i_eve > i_ab; insecure rows: {insecure}")
        } else {
            format!("no advantage for {}", missing.join(", "))
        },
    )
}

fn loss_witnesses() -> Check {
    let alice = loss_report(0.6, Some(0.8), AttackTarget::Alice, 0.5)
        .ok()
        .and_then(|r| r.p_max);
    let bob = loss_report(0.6, Some(0.8), AttackTarget::Bob, 0.5)
        .ok()
        .and_then(|r| r.p_max);
    let ok = alice.is_some_and(|x| (x - 0.25).abs() < 1e-12)
        && bob.is_some_and(|x| (x - 2.0 / 3.0).abs() < 1e-12);
    Check::new(
        "loss_witnesses",
        ok,
        format!("p_max alice={} bob={}", show(alice), show(bob)),
    )
}

fn range_sup() -> Check {
    let mut worst = 0.0f64;
    for p in [0.1, 0.5, 0.9] {
        let r = analytic_report(
            AttackTarget::Alice,
            AttackParams::new(p, 1.0 - 1e-9).expect("in range"),
        )
        .expect("in range");
        worst = worst.max((r.i_ab - i_ab_range_sup(p).expect("in range")).abs());
    }
    Check::new(
        "i_ab_range_sup",
        worst < 1e-6,
        format!("max deviation {worst:.3e}"),
    )
}

pub fn run_suite(opts: &VerifyOptions) -> Vec<Check> {
    let mut checks = vec![
        unitarity(opts.perturb_v),
        pipeline_identities(opts.perturb_v),
        resend_split(),
        counterexample(),
    ];
    checks.extend(monte_carlo(AttackTarget::Alice, 0.5, 0.5, opts));
    checks.extend(monte_carlo(AttackTarget::Bob, 0.6, 0.5, opts));
    checks.push(honest_baseline(opts));
    checks.push(advantage_sweep());
    checks.push(loss_witnesses());
    checks.push(range_sup());
    checks
}

pub fn table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    checks
        .iter()
        .map(|c| {
            format!(
                "{}  {:width$}  {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )
        })
        .collect()
}
