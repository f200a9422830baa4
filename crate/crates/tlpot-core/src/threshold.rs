//! Threshold scans and automatic threshold selection.
//!
//! A scan sweeps candidate threshold ranks over a sorted sample: each rank
//! takes the order statistic at that rank as the threshold, forms the
//! relative excesses above it, and records the Strict Pareto posterior-mean
//! extreme value index next to the Topp-Leone Pareto Gibbs estimate. Ranks
//! whose fit degenerates are skipped and reported instead of poisoning the
//! curve.
//!
//! Selection minimises the squared distance between 1 and the posterior
//! mean of the shape alpha implied by a candidate exponent: at a genuinely
//! Pareto tail the Topp-Leone shape collapses to 1, so the loss
//! `(E[alpha | gamma, excesses] - 1)^2` measures how far a candidate
//! `(rank, gamma)` is from that collapse. The grid strategy searches a
//! 2-D grid of ranks and exponents; the profile strategy searches ranks
//! only, plugging in the per-rank exponent estimate n/(2 S).

use crate::error::{Error, Result};
use crate::gibbs::{estimate_tlpa, GibbsConfig};
use crate::posterior::{expected_alpha, make_excesses, sp_posterior, ExceedanceSample};
use crate::rng::rank_subseed;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_GAMMA_GRID_LEN: usize = 200;
pub const DEFAULT_GAMMA_RANGE: (f64, f64) = (0.05, 10.0);
pub const DEFAULT_MIN_EXCEEDANCES: usize = 10;

/// One fitted row of a threshold scan at a given rank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    /// 1-based rank of the threshold order statistic.
    pub rank: usize,
    /// Threshold value, the order statistic at `rank`.
    pub u: f64,
    /// Number of strict exceedances above `u`.
    pub n_exceed: usize,
    /// Strict Pareto posterior-mean extreme value index S/n.
    pub evi_sp: f64,
    /// Topp-Leone Pareto extreme value index 1/(2 gamma_hat).
    pub evi_tlpa: f64,
    /// Topp-Leone Pareto shape estimate.
    pub alpha_hat: f64,
}

/// A rank excluded from a scan, with the reason it failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedRank {
    pub rank: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve {
    /// Successful rows in increasing rank order.
    pub rows: Vec<CurveRow>,
    /// Failed ranks in increasing rank order.
    pub skipped: Vec<SkippedRank>,
}

fn sorted_copy(data: &[f64]) -> Result<Vec<f64>> {
    if data.len() < 4 {
        return Err(Error::Data(format!(
            "need at least 4 observations, got {}",
            data.len()
        )));
    }
    for (i, v) in data.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Data(format!(
                "observation {} is not finite: {v}",
                i + 1
            )));
        }
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(sorted)
}

fn scan_row(sorted: &[f64], rank: usize, cfg: &GibbsConfig) -> Result<CurveRow> {
    let (u, sample) = make_excesses(sorted, rank)?;
    let sp = sp_posterior(&sample);
    let sub = cfg.with_seed(rank_subseed(cfg.seed, rank));
    let fit = estimate_tlpa(&sample, &sub)?;
    let row = CurveRow {
        rank,
        u,
        n_exceed: sample.n(),
        evi_sp: sp.evi,
        evi_tlpa: fit.evi,
        alpha_hat: fit.alpha_hat,
    };
    for (name, v) in [
        ("evi_sp", row.evi_sp),
        ("evi_tlpa", row.evi_tlpa),
        ("alpha_hat", row.alpha_hat),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Data(format!(
                "estimate {name} at rank {rank} is not a positive finite number: {v}"
            )));
        }
    }
    Ok(row)
}

/// Fits every rank in `rank_range` (inclusive, 1-based) over the sorted
/// copy of `data`. Each rank runs an independent Gibbs chain seeded by
/// mixing the rank into `cfg.seed`, so the curve is reproducible row by row
/// no matter how the work is scheduled across threads.
pub fn scan(data: &[f64], rank_range: (usize, usize), cfg: &GibbsConfig) -> Result<ThresholdCurve> {
    let sorted = sorted_copy(data)?;
    let (lo, hi) = rank_range;
    let max_rank = sorted.len() - 2;
    if lo < 1 || hi < lo || hi > max_rank {
        return Err(Error::Data(format!(
            "rank range {lo}..={hi} is not inside 1..={max_rank}"
        )));
    }
    let outcomes: Vec<(usize, Result<CurveRow>)> = (lo..=hi)
        .into_par_iter()
        .map(|rank| (rank, scan_row(&sorted, rank, cfg)))
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (rank, outcome) in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => skipped.push(SkippedRank {
                rank,
                reason: e.to_string(),
            }),
        }
    }
    Ok(ThresholdCurve { rows, skipped })
}

/// Full valid rank range for a sample of `len` observations.
pub fn full_rank_range(len: usize) -> Result<(usize, usize)> {
    if len < 4 {
        return Err(Error::Data(format!(
            "need at least 4 observations, got {len}"
        )));
    }
    Ok((1, len - 2))
}

/// Search grid for automatic selection.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionGrid {
    /// Candidate exponents, strictly increasing.
    pub gamma_grid: Vec<f64>,
    /// Candidate 1-based threshold ranks, strictly increasing.
    pub rank_grid: Vec<usize>,
    /// Ranks leaving fewer strict exceedances than this are skipped.
    pub min_exceedances: usize,
}

/// `count` log-spaced points covering `[lo, hi]` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(Error::Data(format!(
            "log-spaced grid needs 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    if count < 2 {
        return Err(Error::Data(format!(
            "log-spaced grid needs at least 2 points, got {count}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| {
            // pin both endpoints so the grid covers [lo, hi] exactly
            if k == 0 {
                lo
            } else if k == count - 1 {
                hi
            } else {
                (a + step * k as f64).exp()
            }
        })
        .collect())
}

/// `count` evenly spaced points covering `[lo, hi]` inclusive.
pub fn linear_spaced(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(Error::Data(format!(
            "linear grid needs 0 < lo < hi, got [{lo}, {hi}]"
        )));
    }
    if count < 2 {
        return Err(Error::Data(format!(
            "linear grid needs at least 2 points, got {count}"
        )));
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| {
            if k == count - 1 {
                hi
            } else {
                lo + step * k as f64
            }
        })
        .collect())
}

impl SelectionGrid {
    /// Default grid for a sample of `len` observations: ranks from the
    /// median order statistic up to `len - 10` (so at least 10 exceedances
    /// remain anywhere on the grid), and 200 evenly spaced exponents on
    /// [0.05, 10].
    ///
    /// Even (rather than log) exponent spacing matters for the argmin's
    /// distribution: spacing sets each candidate rank's attainable minimum
    /// loss, so it weights which rank wins. Even spacing is what reproduces
    /// the published mixture benchmark means (see the acceptance tests);
    /// log spacing systematically favors shallow ranks whose loss root
    /// lies at small exponents, inflating the selected index.
    pub fn default_for_len(len: usize) -> Result<SelectionGrid> {
        let lo = len.div_ceil(2);
        let hi = len.saturating_sub(10);
        if len < 4 || lo < 1 || hi < lo {
            return Err(Error::Data(format!(
                "sample of {len} observations is too small for the default selection grid"
            )));
        }
        Ok(SelectionGrid {
            gamma_grid: linear_spaced(
                DEFAULT_GAMMA_RANGE.0,
                DEFAULT_GAMMA_RANGE.1,
                DEFAULT_GAMMA_GRID_LEN,
            )?,
            rank_grid: (lo..=hi).collect(),
            min_exceedances: DEFAULT_MIN_EXCEEDANCES,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.gamma_grid.is_empty() || self.rank_grid.is_empty() {
            return Err(Error::Data("selection grid must be non-empty".into()));
        }
        for w in self.gamma_grid.windows(2) {
            // partial_cmp also traps NaN grid entries
            if !matches!(w[0].partial_cmp(&w[1]), Some(std::cmp::Ordering::Less)) {
                return Err(Error::Data(
                    "gamma grid must be strictly increasing".into(),
                ));
            }
        }
        for g in &self.gamma_grid {
            if !(g.is_finite() && *g > 0.0) {
                return Err(Error::Data(format!("gamma grid value {g} is not positive")));
            }
        }
        for w in self.rank_grid.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Data("rank grid must be strictly increasing".into()));
            }
        }
        if self.min_exceedances < 2 {
            return Err(Error::Data(
                "min_exceedances must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// The selected threshold/exponent pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    /// Selected exponent.
    pub gamma_sharp: f64,
    /// Selected 1-based threshold rank.
    pub rank_sharp: usize,
    /// Threshold value at that rank.
    pub u_sharp: f64,
    /// Extreme value index 1/(2 gamma_sharp).
    pub evi: f64,
    /// Attained loss (E[alpha] - 1)^2.
    pub loss: f64,
}

/// How `select_with_strategy` searches for the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStrategy {
    /// Joint argmin over the full (rank, gamma) grid.
    Grid,
    /// Per-rank plug-in exponent n/(2 S), argmin over ranks only.
    Profile,
}

/// Strategy used when none is requested explicitly. The grid search is the
/// default: on the spliced body-plus-tail benchmarks it reproduces the
/// published mean selected ranks and index estimates at every seed probed,
/// while the profile shortcut selects systematically shallower ranks and
/// overshoots the published index on the harder mixture.
pub const DEFAULT_SELECTION_STRATEGY: SelectionStrategy = SelectionStrategy::Grid;

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionStrategy::Grid => write!(f, "grid"),
            SelectionStrategy::Profile => write!(f, "profile"),
        }
    }
}

impl FromStr for SelectionStrategy {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "grid" => Ok(SelectionStrategy::Grid),
            "profile" => Ok(SelectionStrategy::Profile),
            other => Err(Error::Parse(format!(
                "unknown selection strategy {other:?}; expected \"grid\" or \"profile\""
            ))),
        }
    }
}

fn loss_at(gamma: f64, sample: &ExceedanceSample) -> Result<f64> {
    let ea = expected_alpha(gamma, sample)?;
    Ok((ea - 1.0) * (ea - 1.0))
}

struct RankBest {
    rank: usize,
    u: f64,
    gamma: f64,
    loss: f64,
}

/// Best feasible gamma at one rank, or `None` when the rank is skipped
/// (out of range, unusable excesses, too few exceedances, or no candidate
/// gamma with a finite loss).
fn best_for_rank(
    sorted: &[f64],
    rank: usize,
    grid: &SelectionGrid,
    gammas: &(dyn Fn(&ExceedanceSample) -> Vec<f64> + Sync),
) -> Option<RankBest> {
    let max_rank = sorted.len() - 2;
    if rank < 1 || rank > max_rank {
        return None;
    }
    let (u, sample) = match make_excesses(sorted, rank) {
        Ok(pair) => pair,
        Err(_) => return None,
    };
    if sample.n() < grid.min_exceedances {
        return None;
    }
    let mut best: Option<(f64, f64)> = None;
    for gamma in gammas(&sample) {
        let loss = match loss_at(gamma, &sample) {
            Ok(l) if l.is_finite() => l,
            _ => continue,
        };
        // strict comparison keeps the earliest (smallest) gamma on ties
        if best.is_none_or(|(bl, _)| loss < bl) {
            best = Some((loss, gamma));
        }
    }
    best.map(|(loss, gamma)| RankBest {
        rank,
        u,
        gamma,
        loss,
    })
}

fn argmin_selection(candidates: Vec<Option<RankBest>>) -> Result<Selection> {
    let mut best: Option<RankBest> = None;
    // candidates arrive in increasing rank order; strict comparison keeps
    // the lowest rank on tied losses
    for cand in candidates.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| cand.loss < b.loss) {
            best = Some(cand);
        }
    }
    let b = best.ok_or(Error::NoFeasibleGridPoint)?;
    Ok(Selection {
        gamma_sharp: b.gamma,
        rank_sharp: b.rank,
        u_sharp: b.u,
        evi: 1.0 / (2.0 * b.gamma),
        loss: b.loss,
    })
}

/// Joint grid search: for every rank in the grid with enough exceedances,
/// evaluate the loss at every candidate exponent and take the overall
/// argmin. Ties resolve to the lowest loss, then the lowest rank, then the
/// smallest exponent. Infeasible grid points are skipped; if everything is
/// infeasible the search fails with `NoFeasibleGridPoint`.
pub fn select(data: &[f64], grid: &SelectionGrid) -> Result<Selection> {
    grid.validate()?;
    let sorted = sorted_copy(data)?;
    let gammas = |_: &ExceedanceSample| grid.gamma_grid.clone();
    let candidates: Vec<Option<RankBest>> = grid
        .rank_grid
        .par_iter()
        .map(|&rank| best_for_rank(&sorted, rank, grid, &gammas))
        .collect();
    argmin_selection(candidates)
}

/// Profile search: each rank contributes the single plug-in exponent
/// n/(2 S) (the Strict Pareto posterior mean for the half-exponent), and
/// the argmin runs over ranks only.
pub fn select_profile(data: &[f64], grid: &SelectionGrid) -> Result<Selection> {
    grid.validate()?;
    let sorted = sorted_copy(data)?;
    let gammas =
        |s: &ExceedanceSample| vec![s.n() as f64 / (2.0 * s.sum_log())];
    let candidates: Vec<Option<RankBest>> = grid
        .rank_grid
        .par_iter()
        .map(|&rank| best_for_rank(&sorted, rank, grid, &gammas))
        .collect();
    argmin_selection(candidates)
}

pub fn select_with_strategy(
    data: &[f64],
    grid: &SelectionGrid,
    strategy: SelectionStrategy,
) -> Result<Selection> {
    match strategy {
        SelectionStrategy::Grid => select(data, grid),
        SelectionStrategy::Profile => select_profile(data, grid),
    }
}
