//! Closed-form predictions and Monte-Carlo estimators.

mod entropy;
mod estimators;
mod loss;
mod predictions;

pub use entropy::{binary_entropy, plugin_mutual_information, JointCounts};
pub use estimators::{
    empirical_statistics, empirical_statistics_where, forced_guess_mutual_information, Statistics,
};
pub use loss::{loss_report, LossReport};
pub use predictions::{
    analytic_report, analytic_report_for, claimed_overlap, i_ab_range_sup, p_corr_claimed,
    p_corr_true, p_corr_true_for, security_condition, AnalyticReport, AttackTarget,
};
