//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use qdkd::analysis::{
    analytic_report, binary_entropy, empirical_statistics, empirical_statistics_where,
    i_ab_range_sup, loss_report, AttackTarget, Statistics,
};
use qdkd::attacks::{alice_key_attack, bob_key_attack, honest, AttackParams, EveBranch};
use qdkd::protocol::{run_experiment, BobMode, ProtocolConfig, ALICE, BOB, EVE};
use qdkd::quantum::{bell_branches, photon_branches, BasisLabel, Mode, ModeOperator, StateVector};
use qdkd_cli::commands::{compare_scheme, sweep_rows, Scheme, SweepSpec};
use qdkd_cli::spec::{AttackName, RunSpec};
use qdkd_cli::verify::within_3_sigma;

const SEED: u64 = 7;
const GRID_P: [f64; 3] = [0.25, 0.5, 0.75];
const GRID_EPS: [f64; 3] = [0.25, 0.5, 1.0];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn counterexample() -> Outcome {
    let ((swap, honest), elapsed) = timed(|| {
        (
            compare_scheme(Scheme::Swap).unwrap(),
            compare_scheme(Scheme::Honest).unwrap(),
        )
    });
    let ok = swap.p_corr_true.abs() <= 1e-12
        && (swap.p_corr_claimed - 0.5).abs() <= 1e-12
        && honest.p_corr_true.abs() <= 1e-12
        && honest.p_corr_claimed.abs() <= 1e-12
        && elapsed < Duration::from_millis(100);
    outcome(
        ok,
        format!("{} | {} | {elapsed:.2?}", swap.line(), honest.line()),
    )
}

fn pipeline_identities() -> Outcome {
    let b = || Mode::photon(BOB);
    let v = ModeOperator::v(BOB, EVE);
    let input = StateVector::basis(
        vec![b(), Mode::photon(EVE)],
        &[BasisLabel::Vac, BasisLabel::Zero],
    )
    .unwrap();
    let (mut amp_err, mut prob_err) = (0.0f64, 0.0f64);
    for k in [false, true] {
        for t in [false, true] {
            let xv = ModeOperator::x_pow(b(), t).after(&v).unwrap();
            let out = input
                .apply(&xv)
                .unwrap()
                .apply(&ModeOperator::z_pow(b(), k))
                .unwrap()
                .apply(&xv.dagger().unwrap())
                .unwrap();
            let n = BasisLabel::from_bit(k && t);
            let expected =
                StateVector::basis(vec![b(), Mode::photon(EVE)], &[BasisLabel::Vac, n]).unwrap();
            amp_err = amp_err.max(out.distance_up_to_phase(&expected));
            let p_n = photon_branches(&out, EVE)
                .unwrap()
                .into_iter()
                .find(|x| x.0 == n)
                .unwrap()
                .1;
            prob_err = prob_err.max((1.0 - p_n).abs());
        }
    }
    outcome(
        amp_err < 1e-12 && prob_err < 1e-12,
        format!("max amplitude error {amp_err:.2e}, max |1 − P(n = k·t)| {prob_err:.2e}"),
    )
}

fn resend_split() -> Outcome {
    let mut worst = 0.0f64;
    for t in [false, true] {
        let s = StateVector::basis(
            vec![Mode::qubit(ALICE), Mode::photon(BOB)],
            &[BasisLabel::from_bit(!t), BasisLabel::from_bit(t)],
        )
        .unwrap();
        let probs: Vec<f64> = bell_branches(&s, ALICE, BOB)
            .unwrap()
            .iter()
            .map(|b| b.1)
            .collect();
        for (p, want) in probs.iter().zip([0.5, 0.5, 0.0]) {
            worst = worst.max((p - want).abs());
        }
    }
    outcome(
        worst < 1e-12,
        format!("max deviation from (0.5, 0.5, FAIL 0): {worst:.2e}"),
    )
}

fn run(
    target: AttackTarget,
    params: AttackParams,
    transmission: f64,
) -> (qdkd::protocol::TrialLog, Duration) {
    let strategy = match target {
        AttackTarget::Alice => alice_key_attack(params),
        AttackTarget::Bob => bob_key_attack(params),
    }
    .unwrap();
    let config = ProtocolConfig::new(100_000, SEED).with_transmission(transmission);
    timed(|| run_experiment(&config, &strategy).unwrap())
}

/// Checks shared by both attacks at one grid point; returns failure notes.
fn common_checks(
    s: &Statistics,
    target: AttackTarget,
    params: AttackParams,
    elapsed: Duration,
) -> Vec<String> {
    let r = analytic_report(target, params).unwrap();
    let tag = format!("p={} ε={}", params.p, params.epsilon);
    let mut fails = Vec::new();
    let q_want = (1.0 - params.epsilon * (1.0 - params.p)) / 2.0;
    if (r.q_total - q_want).abs() > 1e-15 {
        fails.push(format!("{tag}: analytic Q {}", r.q_total));
    }
    for (name, q) in [("q_a_hat", s.q_a_hat), ("q_b_hat", s.q_b_hat)] {
        if !q.is_some_and(|q| within_3_sigma(q, q_want, s.n_mm_valid)) {
            fails.push(format!("{tag}: {name} {q:?} vs {q_want}"));
        }
    }
    if s.p_corr_hat != Some(0.0) {
        fails.push(format!("{tag}: P_corr {:?}", s.p_corr_hat));
    }
    let h = binary_entropy(q_want).unwrap();
    if !((r.security_lhs - h).abs() < 1e-12 && r.security_lhs < 1.0) {
        fails.push(format!("{tag}: security_lhs {}", r.security_lhs));
    }
    if elapsed >= Duration::from_secs(10) {
        fails.push(format!("{tag}: runtime {elapsed:.2?}"));
    }
    fails
}

fn alice_attack() -> Outcome {
    let mut fails = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut worst_i = 0.0f64;
    for p in GRID_P {
        for eps in GRID_EPS {
            let params = AttackParams::new(p, eps).unwrap();
            let (log, elapsed) = run(AttackTarget::Alice, params, 1.0);
            slowest = slowest.max(elapsed);
            let s = empirical_statistics(&log);
            fails.extend(common_checks(&s, AttackTarget::Alice, params, elapsed));
            let di = (s.i_aj_eve_hat.unwrap() - p).abs();
            worst_i = worst_i.max(di);
            if di > 0.02 {
                fails.push(format!("p={p} ε={eps}: i_aj_eve_hat {:?}", s.i_aj_eve_hat));
            }
        }
    }
    outcome(
        fails.is_empty(),
        format!(
            "9 runs × 10^5 rounds; max |i_aj_eve_hat − p| {worst_i:.4}; slowest {slowest:.2?}{}",
            failures(&fails)
        ),
    )
}

fn bob_attack() -> Outcome {
    let mut fails = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut worst_i = 0.0f64;
    for p in GRID_P {
        for eps in GRID_EPS {
            let params = AttackParams::new(p, eps).unwrap();
            for transmission in [1.0, 0.6] {
                let (log, elapsed) = run(AttackTarget::Bob, params, transmission);
                slowest = slowest.max(elapsed);
                let s = empirical_statistics(&log);
                let tag = format!("p={p} ε={eps} P={transmission}");
                let want = transmission * (1.0 - p) + p / 2.0;
                if !s.p_obs_hat.is_some_and(|x| within_3_sigma(x, want, s.n_cm)) {
                    fails.push(format!("{tag}: detection {:?} vs {want}", s.p_obs_hat));
                }
                if transmission < 1.0 {
                    continue;
                }
                fails.extend(common_checks(&s, AttackTarget::Bob, params, elapsed));
                let di = (s.i_bk_eve_hat.unwrap() - p / 2.0).abs();
                worst_i = worst_i.max(di);
                if di > 0.02 {
                    fails.push(format!("{tag}: i_bk_eve_hat {:?}", s.i_bk_eve_hat));
                }
                let branch = empirical_statistics_where(&log, |o| {
                    o.eve_branch() == EveBranch::Eavesdropping && o.bob_mode == BobMode::Message
                });
                for (name, q) in [("q_a", branch.q_a_hat), ("q_b", branch.q_b_hat)] {
                    if !q.is_some_and(|q| within_3_sigma(q, 0.5, branch.n_mm_valid)) {
                        fails.push(format!("{tag}: branch {name} {q:?}"));
                    }
                }
            }
        }
    }
    outcome(
        fails.is_empty(),
        format!(
            "18 runs × 10^5 rounds; max |i_bk_eve_hat − p/2| {worst_i:.4}; slowest {slowest:.2?}{}",
            failures(&fails)
        ),
    )
}

fn loss_witnesses() -> Outcome {
    let mut fails = Vec::new();
    let alice = loss_report(0.6, Some(0.8), AttackTarget::Alice, 0.5)
        .unwrap()
        .p_max
        .unwrap();
    let bob = loss_report(0.6, Some(0.8), AttackTarget::Bob, 0.5)
        .unwrap()
        .p_max
        .unwrap();
    if (alice - 0.25).abs() > 1e-12 {
        fails.push(format!("alice p_max {alice}"));
    }
    if (bob - 2.0 / 3.0).abs() > 1e-12 {
        fails.push(format!("bob p_max {bob}"));
    }
    let params = AttackParams::new(0.5, 0.5).unwrap();
    let mut observed = Vec::new();
    for target in [AttackTarget::Alice, AttackTarget::Bob] {
        let (log, _) = run(target, params, 0.6);
        let s = empirical_statistics(&log);
        let want = loss_report(0.6, Some(0.8), target, 0.5)
            .unwrap()
            .p_obs_formula;
        if !s.p_obs_hat.is_some_and(|x| within_3_sigma(x, want, s.n_cm)) {
            fails.push(format!("{target:?} P_obs {:?} vs {want}", s.p_obs_hat));
        }
        observed.push(format!(
            "{target:?} P_obs {:.4}/{want}",
            s.p_obs_hat.unwrap()
        ));
    }
    outcome(
        fails.is_empty(),
        format!(
            "p_max {alice:.6} / {bob:.6}; {}{}",
            observed.join(", "),
            failures(&fails)
        ),
    )
}

fn advantage_sweep() -> Outcome {
    let (result, elapsed) = timed(|| {
        let mut missing = Vec::new();
        let mut rows_checked = 0;
        for attack in [AttackName::Alice, AttackName::Bob] {
            let sweep = SweepSpec {
                base: RunSpec {
                    attack,
                    ..Default::default()
                },
                p_grid: (1..=9).map(|i| i as f64 / 10.0).collect(),
                epsilon_grid: (1..=20).map(|i| i as f64 / 20.0).collect(),
                mc_rounds: 0,
            };
            let rows = sweep_rows(&sweep).unwrap();
            rows_checked += rows.len();
            for p in &sweep.p_grid {
                let found = rows.iter().any(|r| {
                    r["p"].as_f64() == Some(*p)
                        && r["security_holds"].as_bool() == Some(true)
                        && r["i_eve"].as_f64() > r["i_ab"].as_f64()
                });
                if !found {
                    missing.push(format!("{attack:?} p={p}"));
                }
            }
        }
        (missing, rows_checked)
    });
    let (missing, rows) = result;
    outcome(
        missing.is_empty() && elapsed < Duration::from_secs(1),
        format!(
            "{rows} rows; every p has a secure ε with i_eve > i_ab; {elapsed:.2?}{}",
            failures(&missing)
        ),
    )
}

fn honest_baseline() -> Outcome {
    let log = run_experiment(&ProtocolConfig::new(10_000, SEED), &honest()).unwrap();
    let s = empirical_statistics(&log);
    let ok = s.q_a_hat == Some(0.0)
        && s.q_b_hat == Some(0.0)
        && s.p_corr_hat == Some(0.0)
        && s.p_obs_hat == Some(1.0);
    outcome(
        ok,
        format!(
            "Q_A={:?} Q_B={:?} P_corr={:?} P_obs={:?}",
            s.q_a_hat, s.q_b_hat, s.p_corr_hat, s.p_obs_hat
        ),
    )
}

fn determinism() -> Outcome {
    let invoke = |emit: bool| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qdkd"));
        cmd.args([
            "run",
            "--attack",
            "bob",
            "--p",
            "0.4",
            "--epsilon",
            "0.3",
            "--rounds",
            "20000",
        ])
        .args(["--loss", "0.8", "--seed", "99", "--format", "csv"]);
        if emit {
            cmd.arg("--emit-rounds");
        }
        let out = cmd.output().unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    let rounds = (invoke(true), invoke(true));
    let summary = (invoke(false), invoke(false));
    outcome(
        rounds.0 == rounds.1 && summary.0 == summary.1 && !rounds.0.is_empty(),
        format!(
            "per-round CSV {} bytes, summary CSV {} bytes, identical across invocations",
            rounds.0.len(),
            summary.0.len()
        ),
    )
}

fn range_sup() -> Outcome {
    let mut worst = 0.0f64;
    for p in [0.1, 0.5, 0.9] {
        let r = analytic_report(
            AttackTarget::Alice,
            AttackParams::new(p, 1.0 - 1e-9).unwrap(),
        )
        .unwrap();
        worst = worst.max((r.i_ab - i_ab_range_sup(p).unwrap()).abs());
    }
    outcome(
        worst <= 1e-6,
        format!("max |i_ab − (1 − H(p/2))| {worst:.2e}"),
    )
}

fn failures(fails: &[String]) -> String {
    if fails.is_empty() {
        String::new()
    } else {
        format!("; FAILURES: {}", fails.join("; "))
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("counterexample", counterexample),
        ("pipeline identities", pipeline_identities),
        ("resend Bell split", resend_split),
        ("attack on Alice's key", alice_attack),
        ("attack on Bob's key", bob_attack),
        ("loss witnesses", loss_witnesses),
        ("advantage with security", advantage_sweep),
        ("honest baseline", honest_baseline),
        ("determinism", determinism),
        ("i_ab range supremum", range_sup),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.passed);
        println!(
            "{} criterion {:>2} ({name}): {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
