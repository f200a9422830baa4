//! Quantile-quantile diagnostics for fitted tails.
//!
//! For the i-th of n sorted exceedances the plotting position is
//! p_i = i/(n+1). Each row pairs the observed log order statistic with the
//! model log quantiles of the two fitted tails, both shifted back to the
//! original scale by adding log(u):
//!
//!   log_q_sp   = -(1/gamma_hat_sp) * log(1 - p_i) + log(u)
//!   log_q_tlpa = -(1/(2 gamma_hat_tlpa)) * log(1 - p_i^(1/alpha_hat)) + log(u)
//!
//! The second expression evaluates log(1 - p^(1/alpha)) as
//! log(1 - exp(log(p)/alpha)) through a cancellation-safe helper, which
//! stays accurate when p^(1/alpha) approaches 1 at the top of the sample.

use crate::distributions::ln_one_minus_exp_neg;
use crate::gibbs::TLPaFit;
use crate::posterior::{ExceedanceSample, SPFit};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QQRow {
    /// log of the observed order statistic, original scale.
    pub log_sorted_obs: f64,
    /// Strict Pareto model log quantile at the same plotting position.
    pub log_q_sp: f64,
    /// Topp-Leone Pareto model log quantile at the same plotting position.
    pub log_q_tlpa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QQTable {
    pub rows: Vec<QQRow>,
}

/// Builds the QQ table for one threshold's exceedances and the two fits.
pub fn qq_data(s: &ExceedanceSample, u: f64, sp: &SPFit, tlpa: &TLPaFit) -> QQTable {
    let n = s.n();
    let log_u = u.ln();
    let rows = (1..=n)
        .map(|i| {
            let p = i as f64 / (n + 1) as f64;
            let log_q_sp = -(-p).ln_1p() / sp.gamma_hat + log_u;
            // a = -log(p)/alpha, so 1 - p^(1/alpha) = 1 - e^(-a)
            let a = -p.ln() / tlpa.alpha_hat;
            let log_q_tlpa = -ln_one_minus_exp_neg(a) / (2.0 * tlpa.gamma_hat) + log_u;
            QQRow {
                log_sorted_obs: log_u + s.log_excesses()[i - 1],
                log_q_sp,
                log_q_tlpa,
            }
        })
        .collect();
    QQTable { rows }
}
