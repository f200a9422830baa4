//! Excess construction and closed-form posterior quantities.
//!
//! With reciprocal priors on the positive parameters, the Strict Pareto tail
//! exponent has posterior Gamma(n, S) where S = sum of log excesses, and the
//! Topp-Leone Pareto pair (alpha, gamma) has an unnormalized joint posterior
//!
//! ```text
//! alpha^(n-1) gamma^(n-1) exp(-(2 gamma + 1) S) exp((alpha - 1) T(gamma)),
//! T(gamma) = sum_i ln(1 - y_i^(-2 gamma))
//! ```
//!
//! whose alpha-conditional is exactly Gamma(n, -T(gamma)). The
//! gamma-conditional is not a named family; replacing ln(1 - y^(-2 gamma))
//! by its leading behavior ln(2 gamma ln y) near y = 1 gives the sampleable
//! approximation Gamma(n alpha, 2 S), exact at alpha = 1.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;

/// Relative excesses above a threshold with cached sufficient statistics.
/// Values are sorted ascending; `s` is the sum of the cached log excesses.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceSample {
    y: Vec<f64>,
    ell: Vec<f64>,
    s: f64,
}

impl ExceedanceSample {
    /// Builds from raw excesses (any order). Every value must be finite and
    /// strictly greater than 1.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Data("empty excess sample".into()));
        }
        for &v in &values {
            if !v.is_finite() {
                return Err(Error::Data(format!("non-finite excess {v}")));
            }
            if v <= 1.0 {
                return Err(Error::Data(format!(
                    "excess {v} not strictly above 1; relative excesses must exceed the threshold"
                )));
            }
        }
        // ascending order fixes the summation order (determinism) and lets
        // the transform sum stop early once terms vanish
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ell: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let s = ell.iter().sum();
        Ok(ExceedanceSample { y: values, ell, s })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// S = sum of log excesses.
    pub fn sum_log(&self) -> f64 {
        self.s
    }

    pub fn excesses(&self) -> &[f64] {
        &self.y
    }

    pub fn log_excesses(&self) -> &[f64] {
        &self.ell
    }
}

/// Threshold at `rank` (1-based index into the ascending sort) and the
/// relative excesses above it. Observations tied with the threshold are
/// excluded: a ratio of exactly 1 has an infinite conditional rate, so only
/// strict exceedances enter the model. Requires `1 <= rank <= len - 2` so at
/// least two exceedances can remain.
pub fn make_excesses(sorted_data: &[f64], rank: usize) -> Result<(f64, ExceedanceSample)> {
    let len = sorted_data.len();
    if len < 3 {
        return Err(Error::Data(format!("need at least 3 observations, got {len}")));
    }
    if rank < 1 || rank > len - 2 {
        return Err(Error::Data(format!(
            "rank {rank} outside valid range 1..={}",
            len - 2
        )));
    }
    for w in sorted_data.windows(2) {
        // partial_cmp also traps NaN, which would otherwise slip through a
        // plain comparison
        if !matches!(
            w[0].partial_cmp(&w[1]),
            Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal)
        ) {
            return Err(Error::Data("data not sorted ascending".into()));
        }
    }
    let u = sorted_data[rank - 1];
    if !u.is_finite() {
        return Err(Error::Data(format!("non-finite threshold {u}")));
    }
    if u <= 0.0 {
        return Err(Error::NonpositiveThreshold { u });
    }
    let mut y = Vec::with_capacity(len - rank);
    for &x in &sorted_data[rank..] {
        if !x.is_finite() {
            return Err(Error::Data(format!("non-finite observation {x}")));
        }
        let r = x / u;
        // ratios that round down to 1 are ties at f64 resolution
        if r > 1.0 {
            y.push(r);
        }
    }
    if y.len() < 2 {
        return Err(Error::InsufficientTail { n_exceed: y.len(), u });
    }
    let sample = ExceedanceSample::new(y)?;
    Ok((u, sample))
}

/// Shape/rate parameter pair; density `rate^shape / Gamma(shape) *
/// x^(shape-1) e^(-rate x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    pub shape: f64,
    pub rate: f64,
}

impl GammaParams {
    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        self.shape * self.rate.ln() - ln_gamma(self.shape) + (self.shape - 1.0) * x.ln()
            - self.rate * x
    }
}

/// Distribution of `1/G` where `G ~ Gamma(shape, rate = rate_sum)`. The
/// second parameter is stored as the rate of the reciprocal Gamma variable,
/// which is the construction actually used everywhere in this crate; its
/// mean is `rate_sum / (shape - 1)` when `shape > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvGammaParams {
    pub shape: f64,
    pub rate_sum: f64,
}

impl InvGammaParams {
    pub fn mean(&self) -> Result<f64> {
        if self.shape > 1.0 {
            Ok(self.rate_sum / (self.shape - 1.0))
        } else {
            Err(Error::MeanUndefined { shape: self.shape })
        }
    }
}

/// Strict Pareto posterior summary at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SPFit {
    pub posterior: GammaParams,
    pub gamma_hat: f64,
    pub evi: f64,
}

/// Posterior of the Strict Pareto tail exponent: Gamma(n, S). The point
/// estimate is the posterior mean n/S and the extreme value index estimate
/// is its reciprocal S/n.
pub fn sp_posterior(s: &ExceedanceSample) -> SPFit {
    let n = s.n() as f64;
    let posterior = GammaParams { shape: n, rate: s.sum_log() };
    SPFit {
        posterior,
        gamma_hat: n / s.sum_log(),
        evi: s.sum_log() / n,
    }
}

/// Posterior of the Strict Pareto extreme value index `1/gamma`: the
/// reciprocal of a Gamma(n, S) variable.
pub fn sp_evi_posterior(fit: &SPFit) -> InvGammaParams {
    InvGammaParams {
        shape: fit.posterior.shape,
        rate_sum: fit.posterior.rate,
    }
}

// Thresholds for the excess transform sum. Above FACTOR_ONE_A the factor
// 1 - e^(-a) rounds to 1 and ln(1 - e^(-a)) = -e^(-a) to one ulp, so the
// term switches to the exponential tail form; above TERM_ZERO_A even e^(-a)
// underflows to 0 and the (sorted) remaining terms contribute exactly
// nothing.
const FACTOR_ONE_A: f64 = 37.0;
const TERM_ZERO_A: f64 = 746.0;

/// `-T(gamma) = -sum_i ln(1 - y_i^(-2 gamma)) > 0`, the Gamma rate of the
/// alpha-conditional.
///
/// Mid-range factors accumulate as a running product (one `expm1` and one
/// multiply per excess; the log is taken once), renormalized by 2^512 to
/// stay in range. Factors below 1e-8 take their own log so a single multiply
/// can never underflow the product, and factors that round to 1 switch to
/// the `e^(-a)` tail form so very large gamma still yields the correct tiny
/// rate.
fn neg_t(gamma: f64, s: &ExceedanceSample) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
            reason: "must be finite and > 0",
        });
    }
    let renorm_floor = 2f64.powi(-512);
    let renorm_scale = 2f64.powi(512);
    let two_gamma = 2.0 * gamma;
    let mut tail_sum = 0.0; // direct accumulation of -ln(factor) terms
    let mut prod = 1.0;
    let mut shifts: u32 = 0;
    for &l in s.log_excesses() {
        let a = two_gamma * l;
        if a >= TERM_ZERO_A {
            break;
        }
        if a >= FACTOR_ONE_A {
            tail_sum += (-a).exp();
            continue;
        }
        let f = -(-a).exp_m1();
        if f < 1e-300 {
            return Err(Error::DegenerateExcess {
                gamma,
                detail: "1 - y^(-2 gamma) underflowed toward 0",
            });
        }
        if f < 1e-8 {
            tail_sum -= f.ln();
        } else {
            prod *= f;
            if prod < renorm_floor {
                prod *= renorm_scale;
                shifts += 1;
            }
        }
    }
    let total = tail_sum - prod.ln() + f64::from(shifts) * (512.0 * std::f64::consts::LN_2);
    if total > 0.0 {
        Ok(total)
    } else {
        Err(Error::DegenerateExcess {
            gamma,
            detail: "1 - y^(-2 gamma) rounded to 1 for every excess; the conditional rate underflowed",
        })
    }
}

/// Log of the unnormalized joint posterior density of (alpha, gamma):
/// `(n-1) ln alpha + (n-1) ln gamma - (2 gamma + 1) S + (alpha - 1) T(gamma)`.
pub fn tlpa_log_joint(gamma: f64, alpha: f64, s: &ExceedanceSample) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must be finite and > 0",
        });
    }
    let nt = neg_t(gamma, s)?;
    let n1 = s.n() as f64 - 1.0;
    Ok(n1 * alpha.ln() + n1 * gamma.ln() - (2.0 * gamma + 1.0) * s.sum_log() - (alpha - 1.0) * nt)
}

/// Exact conditional posterior of alpha given gamma: Gamma(n, -T(gamma)).
pub fn alpha_conditional(gamma: f64, s: &ExceedanceSample) -> Result<GammaParams> {
    let rate = neg_t(gamma, s)?;
    Ok(GammaParams { shape: s.n() as f64, rate })
}

/// Approximate conditional posterior of gamma given alpha:
/// Gamma(n alpha, 2 S). Exact at alpha = 1; derived by replacing
/// `ln(1 - y^(-2 gamma))` with `ln(2 gamma ln y)`, its limit form as
/// excesses approach 1.
pub fn gamma_conditional_approx(alpha: f64, s: &ExceedanceSample) -> Result<GammaParams> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must be finite and > 0",
        });
    }
    Ok(GammaParams {
        shape: s.n() as f64 * alpha,
        rate: 2.0 * s.sum_log(),
    })
}

/// Conditional distribution of the extreme value index `1/(2 gamma)` under
/// the gamma-conditional approximation: reciprocal of Gamma(n alpha, S),
/// with mean `S / (n alpha - 1)` when `n alpha > 1`.
pub fn tlpa_evi_conditional(alpha: f64, s: &ExceedanceSample) -> Result<InvGammaParams> {
    let g = gamma_conditional_approx(alpha, s)?;
    Ok(InvGammaParams {
        shape: g.shape,
        rate_sum: s.sum_log(),
    })
}

/// Posterior mean of alpha given gamma: `n / (-T(gamma))`. Strictly
/// increasing in gamma; the threshold selection loss is built from its
/// squared distance to 1.
pub fn expected_alpha(gamma: f64, s: &ExceedanceSample) -> Result<f64> {
    Ok(s.n() as f64 / neg_t(gamma, s)?)
}
