use rand::Rng;
use serde::{Deserialize, Serialize};

use super::entropy::JointCounts;
use super::security_condition;
use crate::protocol::{round_rng, BobMode, RoundOutcome, TrialLog};

/// Empirical counterparts of the analytic figures, estimated from a log.
///
/// Rates are `None` when their denominator is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistics {
    pub n_rounds: usize,
    pub n_mm: usize,
    /// Message-mode rounds with a conclusive Bell result.
    pub n_mm_valid: usize,
    pub n_cm: usize,
    pub n_cm_detected: usize,
    pub n_cm_correlated: usize,
    /// Fraction of valid MM rounds with `j^(B) ≠ j`.
    pub q_a_hat: Option<f64>,
    /// Fraction of valid MM rounds with `k^(A) ≠ k`.
    pub q_b_hat: Option<f64>,
    /// Mean of the two QBER estimates.
    pub q_hat: Option<f64>,
    /// Correlated fraction over CM rounds.
    pub p_corr_hat: Option<f64>,
    /// Detection fraction over CM rounds.
    pub p_obs_hat: Option<f64>,
    /// Plug-in MI between `j` and Eve's symbol over all MM rounds.
    pub i_aj_eve_hat: Option<f64>,
    /// Plug-in MI between `k` and Eve's symbol over all MM rounds.
    pub i_bk_eve_hat: Option<f64>,
    /// Plug-in MI between `j` and `j^(B)` over valid MM rounds.
    pub i_ab_hat: Option<f64>,
    /// `H(q_hat) + H(p_corr_hat)`.
    pub security_lhs_hat: Option<f64>,
}

pub fn empirical_statistics(log: &TrialLog) -> Statistics {
    empirical_statistics_where(log, |_| true)
}

/// Statistics over the rounds accepted by `keep`.
pub fn empirical_statistics_where<F>(log: &TrialLog, keep: F) -> Statistics
where
    F: Fn(&RoundOutcome) -> bool,
{
    let rounds: Vec<&RoundOutcome> = log.outcomes.iter().filter(|o| keep(o)).collect();
    let mm: Vec<&RoundOutcome> = rounds
        .iter()
        .copied()
        .filter(|o| o.bob_mode == BobMode::Message)
        .collect();
    let valid: Vec<&RoundOutcome> = mm
        .iter()
        .copied()
        .filter(|o| o.is_valid_message())
        .collect();
    let cm: Vec<&RoundOutcome> = rounds
        .iter()
        .copied()
        .filter(|o| o.bob_mode == BobMode::Control)
        .collect();

    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);

    let errors_a = valid.iter().filter(|o| o.j_view_b != Some(o.j)).count();
    let errors_b = valid.iter().filter(|o| o.k_view_a != o.k).count();
    let q_a_hat = ratio(errors_a, valid.len());
    let q_b_hat = ratio(errors_b, valid.len());
    let q_hat = q_a_hat.zip(q_b_hat).map(|(a, b)| (a + b) / 2.0);

    let n_cm_detected = cm
        .iter()
        .filter(|o| o.bob_cm_detected == Some(true))
        .count();
    let n_cm_correlated = cm.iter().filter(|o| o.correlated == Some(true)).count();
    let p_corr_hat = ratio(n_cm_correlated, cm.len());

    let eve_j: JointCounts<bool, Option<bool>> = mm.iter().map(|o| (o.j, o.eve_symbol_j)).collect();
    let eve_k: JointCounts<bool, Option<bool>> = mm
        .iter()
        .filter_map(|o| o.k.map(|k| (k, o.eve_symbol_k)))
        .collect();
    let ab: JointCounts<bool, bool> = valid
        .iter()
        .filter_map(|o| o.j_view_b.map(|jb| (o.j, jb)))
        .collect();

    Statistics {
        n_rounds: rounds.len(),
        n_mm: mm.len(),
        n_mm_valid: valid.len(),
        n_cm: cm.len(),
        n_cm_detected,
        n_cm_correlated,
        q_a_hat,
        q_b_hat,
        q_hat,
        p_corr_hat,
        p_obs_hat: ratio(n_cm_detected, cm.len()),
        i_aj_eve_hat: eve_j.mutual_information().ok(),
        i_bk_eve_hat: eve_k.mutual_information().ok(),
        i_ab_hat: ab.mutual_information().ok(),
        security_lhs_hat: q_hat
            .zip(p_corr_hat)
            .and_then(|(q, pc)| security_condition(q, pc).ok())
            .map(|(lhs, _)| lhs),
    }
}

const GUESS_SALT: u64 = 0x6775_6573_735f_6576;

/// Diagnostic variant of Eve's information: whenever she abstains she is
/// forced to guess a uniformly random bit instead. Returns the plug-in MI for
/// `(j, guess_j)` and `(k, guess_k)` over all MM rounds. For the composite
/// attacks this converges to `1 − H((1 + p)/2)` and `1 − H((2 + p)/4)`
/// rather than `p` and `p/2`.
pub fn forced_guess_mutual_information(log: &TrialLog) -> (Option<f64>, Option<f64>) {
    let seed = log.config.master_seed ^ GUESS_SALT;
    let mut jt: JointCounts<bool, bool> = JointCounts::new();
    let mut kt: JointCounts<bool, bool> = JointCounts::new();
    for o in log
        .outcomes
        .iter()
        .filter(|o| o.bob_mode == BobMode::Message)
    {
        let mut rng = round_rng(seed, o.index);
        let gj = o.eve_symbol_j.unwrap_or_else(|| rng.random());
        let gk = o.eve_symbol_k.unwrap_or_else(|| rng.random());
        jt.add(o.j, gj);
        if let Some(k) = o.k {
            kt.add(k, gk);
        }
    }
    (jt.mutual_information().ok(), kt.mutual_information().ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::{alice_key_attack, error_tuning, honest, swap_vacuum, AttackParams};
    use crate::protocol::{run_experiment, ProtocolConfig};

    fn sigma(r: f64, n: usize) -> f64 {
        (r * (1.0 - r) / n as f64).sqrt()
    }

    #[test]
    fn honest_baseline() {
        let log = run_experiment(&ProtocolConfig::new(10_000, 1), &honest()).unwrap();
        let s = empirical_statistics(&log);
        assert_eq!(s.n_rounds, 10_000);
        assert_eq!(s.n_mm, s.n_mm_valid);
        assert_eq!(s.q_a_hat, Some(0.0));
        assert_eq!(s.q_b_hat, Some(0.0));
        assert_eq!(s.p_corr_hat, Some(0.0));
        assert_eq!(s.p_obs_hat, Some(1.0));
        assert_eq!(s.i_aj_eve_hat, Some(0.0));
        assert!((s.i_ab_hat.unwrap() - 1.0).abs() < 1e-3);
        assert_eq!(s.security_lhs_hat, Some(0.0));
    }

    #[test]
    fn lossy_honest_detection_rate() {
        let config = ProtocolConfig::new(20_000, 5).with_transmission(0.7);
        let s = empirical_statistics(&run_experiment(&config, &honest()).unwrap());
        let n = s.n_cm;
        assert!((s.p_obs_hat.unwrap() - 0.7).abs() < 3.0 * sigma(0.7, n));
        assert_eq!(s.q_a_hat, Some(0.0));
        assert!(s.n_mm_valid < s.n_mm);
    }

    #[test]
    fn tuning_qber() {
        let config = ProtocolConfig::new(20_000, 8);
        let s =
            empirical_statistics(&run_experiment(&config, &error_tuning(0.3).unwrap()).unwrap());
        let n = s.n_mm_valid;
        assert!((s.q_a_hat.unwrap() - 0.35).abs() < 3.0 * sigma(0.35, n));
        assert_eq!(s.q_a_hat, s.q_b_hat);
        let pass =
            empirical_statistics(&run_experiment(&config, &error_tuning(1.0).unwrap()).unwrap());
        assert_eq!(pass.q_a_hat, Some(0.0));
    }

    #[test]
    fn swap_scheme_statistics() {
        let config = ProtocolConfig::new(20_000, 3);
        let s = empirical_statistics(&run_experiment(&config, &swap_vacuum()).unwrap());
        assert_eq!(s.p_obs_hat, Some(0.0));
        assert_eq!(s.p_corr_hat, Some(0.0));
        assert!((s.q_a_hat.unwrap() - 0.5).abs() < 3.0 * sigma(0.5, s.n_mm_valid));
    }

    #[test]
    fn no_message_rounds_gives_absent_rates() {
        let config = ProtocolConfig::new(100, 3).with_cm_probability(1.0);
        let s = empirical_statistics(&run_experiment(&config, &honest()).unwrap());
        assert_eq!(s.n_mm, 0);
        assert_eq!(s.q_a_hat, None);
        assert_eq!(s.i_aj_eve_hat, None);
        assert_eq!(s.p_obs_hat, Some(1.0));
    }

    #[test]
    fn forced_guesses_lose_information() {
        let p = 0.5;
        let config = ProtocolConfig::new(40_000, 12);
        let strategy = alice_key_attack(AttackParams::new(p, 0.5).unwrap()).unwrap();
        let log = run_experiment(&config, &strategy).unwrap();
        let s = empirical_statistics(&log);
        let (forced_j, _) = forced_guess_mutual_information(&log);
        let expected = 1.0 - crate::analysis::binary_entropy((1.0 + p) / 2.0).unwrap();
        assert!((s.i_aj_eve_hat.unwrap() - p).abs() < 0.02);
        assert!((forced_j.unwrap() - expected).abs() < 0.02);
    }
}
