//! Repeated simulation studies.
//!
//! Two study shapes are supported. A *curve study* draws many samples from
//! a single heavy-tailed distribution, scans the full threshold range in
//! each, and averages the fitted columns rank by rank, showing how the two
//! extreme value index estimates behave as the threshold moves into the
//! tail. A *mixture study* splices a Strict Pareto tail onto a light-tailed
//! body (tail draws live on (1, inf) and are multiplied by the body
//! maximum, so they land strictly above every body point), runs automatic
//! threshold selection on each spliced sample, and reports the means of the
//! selected rank, threshold, exponent, index, and loss.
//!
//! Every repetition derives its own seed from the master seed and the
//! repetition index, so results are independent of thread scheduling and
//! of how many repetitions run: repetition k of a 1000-rep study equals
//! repetition k of a 10-rep study.

use crate::distributions::DistSpec;
use crate::error::{Error, Result};
use crate::gibbs::GibbsConfig;
use crate::rng::split_seed;
use crate::threshold::{
    full_rank_range, scan, select_with_strategy, Selection, SelectionGrid, SelectionStrategy,
    ThresholdCurve, DEFAULT_SELECTION_STRATEGY,
};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// What one repetition draws its sample from.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// All observations from one distribution.
    Single(DistSpec),
    /// `n_body` draws from `body`, then `n_tail` draws from `tail` scaled
    /// by the body maximum. The tail distribution must live on (1, inf)
    /// so the scaled draws exceed every body observation.
    Mixture {
        body: DistSpec,
        n_body: usize,
        tail: DistSpec,
        n_tail: usize,
    },
}

impl Generator {
    pub fn validate(&self) -> Result<()> {
        match self {
            Generator::Single(dist) => dist.validate(),
            Generator::Mixture {
                body,
                n_body,
                tail,
                n_tail,
            } => {
                body.validate()?;
                tail.validate()?;
                if *n_body < 1 || *n_tail < 1 {
                    return Err(Error::Data(
                        "mixture components need at least 1 observation each".into(),
                    ));
                }
                match tail {
                    DistSpec::StrictPareto { .. } | DistSpec::TLPa { .. } => Ok(()),
                    other => Err(Error::Data(format!(
                        "mixture tail must live on (1, inf); {other} does not"
                    ))),
                }
            }
        }
    }

    /// Total sample size implied by a mixture; a single distribution takes
    /// its size from the caller.
    pub fn implied_n(&self) -> Option<usize> {
        match self {
            Generator::Single(_) => None,
            Generator::Mixture { n_body, n_tail, .. } => Some(n_body + n_tail),
        }
    }
}

/// Splits at top level (outside parentheses) on `sep`.
fn split_top_level(text: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

fn parse_component(text: &str) -> Result<(DistSpec, Option<usize>)> {
    let pieces = split_top_level(text, '*');
    match pieces.as_slice() {
        [dist] => Ok((dist.trim().parse()?, None)),
        [dist, count] => {
            let n: usize = count.trim().parse().map_err(|_| {
                Error::Parse(format!("bad component count {:?}", count.trim()))
            })?;
            Ok((dist.trim().parse()?, Some(n)))
        }
        _ => Err(Error::Parse(format!(
            "component {text:?} has more than one '*'"
        ))),
    }
}

impl FromStr for Generator {
    type Err = Error;

    /// `"frechet(gamma=2)"` is a single distribution;
    /// `"normal(mu=5,sigma2=1)*500+sp(gamma=5)*100"` is a body+tail
    /// mixture with explicit component sizes.
    fn from_str(text: &str) -> Result<Self> {
        let parts = split_top_level(text.trim(), '+');
        let gen = match parts.as_slice() {
            [one] => {
                let (dist, count) = parse_component(one)?;
                if count.is_some() {
                    return Err(Error::Parse(
                        "a single-distribution generator takes its sample size separately; \
                         drop the '*count'"
                            .into(),
                    ));
                }
                Generator::Single(dist)
            }
            [first, second] => {
                let (body, n_body) = parse_component(first)?;
                let (tail, n_tail) = parse_component(second)?;
                match (n_body, n_tail) {
                    (Some(n_body), Some(n_tail)) => Generator::Mixture {
                        body,
                        n_body,
                        tail,
                        n_tail,
                    },
                    _ => {
                        return Err(Error::Parse(
                            "mixture components need explicit sizes, like \
                             \"normal(mu=5,sigma2=1)*500+sp(gamma=5)*100\""
                                .into(),
                        ))
                    }
                }
            }
            _ => {
                return Err(Error::Parse(
                    "a generator is one distribution or body*n+tail*m".into(),
                ))
            }
        };
        gen.validate()?;
        Ok(gen)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Single(dist) => write!(f, "{dist}"),
            Generator::Mixture {
                body,
                n_body,
                tail,
                n_tail,
            } => write!(f, "{body}*{n_body}+{tail}*{n_tail}"),
        }
    }
}

/// One dataset from a generator. For a mixture the output is the body block
/// followed by the scaled tail block, unsorted; component streams are
/// decoupled by splitting the repetition seed, so the body draws do not
/// change when the tail size does.
pub fn generate(gen: &Generator, n_obs: usize, seed: u64) -> Result<Vec<f64>> {
    gen.validate()?;
    match gen {
        Generator::Single(dist) => Ok(dist.sample(n_obs, seed)?.values),
        Generator::Mixture {
            body,
            n_body,
            tail,
            n_tail,
        } => {
            if n_body + n_tail != n_obs {
                return Err(Error::Data(format!(
                    "mixture components sum to {}, expected n_obs = {n_obs}",
                    n_body + n_tail
                )));
            }
            let mut values = body.sample(*n_body, split_seed(seed, 0))?.values;
            let body_max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !(body_max.is_finite() && body_max > 0.0) {
                return Err(Error::Data(format!(
                    "body maximum {body_max} is not positive; the tail splice is undefined"
                )));
            }
            let tail_raw = tail.sample(*n_tail, split_seed(seed, 1))?.values;
            values.extend(tail_raw.into_iter().map(|y| y * body_max));
            Ok(values)
        }
    }
}

/// Full description of a repeated study.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub generator: Generator,
    pub n_obs: usize,
    pub repetitions: usize,
    /// Chain settings; the `seed` field inside is ignored and replaced by
    /// per-repetition seeds derived from `master_seed`.
    pub gibbs: GibbsConfig,
    /// Selection grid for mixture studies; unused by curve studies.
    pub grid: SelectionGrid,
    pub strategy: SelectionStrategy,
    pub master_seed: u64,
}

impl ExperimentSpec {
    /// Spec with the default chain length, default selection grid for
    /// `n_obs`, and the default selection strategy.
    pub fn new(
        generator: Generator,
        n_obs: usize,
        repetitions: usize,
        master_seed: u64,
    ) -> Result<ExperimentSpec> {
        generator.validate()?;
        if let Some(implied) = generator.implied_n() {
            if implied != n_obs {
                return Err(Error::Data(format!(
                    "mixture components sum to {implied}, expected n_obs = {n_obs}"
                )));
            }
        }
        if n_obs < 20 {
            return Err(Error::Data(format!(
                "a study needs at least 20 observations per sample, got {n_obs}"
            )));
        }
        if repetitions < 1 {
            return Err(Error::Data("a study needs at least 1 repetition".into()));
        }
        Ok(ExperimentSpec {
            generator,
            n_obs,
            repetitions,
            gibbs: GibbsConfig::new(0),
            grid: SelectionGrid::default_for_len(n_obs)?,
            strategy: DEFAULT_SELECTION_STRATEGY,
            master_seed,
        })
    }

    fn rep_seed(&self, rep: usize) -> u64 {
        split_seed(self.master_seed, rep as u64)
    }
}

/// Named study configurations used throughout the documentation and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Frechet, exponent 2, n = 300: index 0.5.
    Case1,
    /// Frechet, exponent 1.33, n = 300: index ~0.75.
    Case2,
    /// Burr, all parameters 1, n = 300: index 1.
    Case3,
    /// Normal(5, 1) body of 500 plus Strict Pareto exponent-5 tail of 100.
    Table1,
    /// Normal(10, 16) body of 500 plus Strict Pareto exponent-2 tail of 100.
    Table2,
}

pub const ALL_PRESETS: [Preset; 5] = [
    Preset::Case1,
    Preset::Case2,
    Preset::Case3,
    Preset::Table1,
    Preset::Table2,
];

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "case1" => Ok(Preset::Case1),
            "case2" => Ok(Preset::Case2),
            "case3" => Ok(Preset::Case3),
            "table1" => Ok(Preset::Table1),
            "table2" => Ok(Preset::Table2),
            other => Err(Error::Parse(format!(
                "unknown preset {other:?}; expected case1, case2, case3, table1 or table2"
            ))),
        }
    }
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Case1 => "case1",
            Preset::Case2 => "case2",
            Preset::Case3 => "case3",
            Preset::Table1 => "table1",
            Preset::Table2 => "table2",
        }
    }

    pub fn generator(&self) -> Generator {
        match self {
            Preset::Case1 => Generator::Single(DistSpec::Frechet { gamma: 2.0 }),
            Preset::Case2 => Generator::Single(DistSpec::Frechet { gamma: 1.33 }),
            Preset::Case3 => Generator::Single(DistSpec::BurrXII {
                lambda: 1.0,
                tau: 1.0,
                eta: 1.0,
            }),
            Preset::Table1 => Generator::Mixture {
                body: DistSpec::Normal {
                    mu: 5.0,
                    sigma2: 1.0,
                },
                n_body: 500,
                tail: DistSpec::StrictPareto { gamma: 5.0 },
                n_tail: 100,
            },
            Preset::Table2 => Generator::Mixture {
                body: DistSpec::Normal {
                    mu: 10.0,
                    sigma2: 16.0,
                },
                n_body: 500,
                tail: DistSpec::StrictPareto { gamma: 2.0 },
                n_tail: 100,
            },
        }
    }

    pub fn spec(&self, repetitions: usize, master_seed: u64) -> Result<ExperimentSpec> {
        let generator = self.generator();
        let n_obs = generator.implied_n().unwrap_or(300);
        ExperimentSpec::new(generator, n_obs, repetitions, master_seed)
    }
}

/// One averaged scan row: fitted columns averaged over the repetitions in
/// which the rank survived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedRow {
    pub rank: usize,
    pub u: f64,
    pub n_exceed: f64,
    pub evi_sp: f64,
    pub evi_tlpa: f64,
    pub alpha_hat: f64,
    /// Number of repetitions contributing to this rank.
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepFailure {
    pub rep: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub averaged: Vec<AveragedRow>,
    /// Per-repetition curves, in repetition order.
    pub raw: Vec<(usize, ThresholdCurve)>,
    pub failures: Vec<RepFailure>,
    pub spec: ExperimentSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureResult {
    /// Number of successful repetitions behind the means.
    pub repetitions: usize,
    pub mean_rank: f64,
    pub mean_u: f64,
    pub mean_gamma_sharp: f64,
    pub mean_evi: f64,
    pub mean_loss: f64,
    /// Per-repetition selections, in repetition order.
    pub raw: Vec<(usize, Selection)>,
    pub failures: Vec<RepFailure>,
    pub spec: ExperimentSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentOutcome {
    Curve(CaseResult),
    Selection(MixtureResult),
}

fn check_failures(failed: usize, total: usize) -> Result<()> {
    if failed * 100 > total {
        return Err(Error::TooManyFailures { failed, total });
    }
    Ok(())
}

/// Averages curve columns rank by rank over the surviving repetitions.
pub fn average_curves(raw: &[(usize, ThresholdCurve)]) -> Vec<AveragedRow> {
    #[derive(Default)]
    struct Acc {
        u: f64,
        n_exceed: f64,
        evi_sp: f64,
        evi_tlpa: f64,
        alpha_hat: f64,
        reps: usize,
    }
    let mut by_rank: BTreeMap<usize, Acc> = BTreeMap::new();
    for (_, curve) in raw {
        for row in &curve.rows {
            let acc = by_rank.entry(row.rank).or_default();
            acc.u += row.u;
            acc.n_exceed += row.n_exceed as f64;
            acc.evi_sp += row.evi_sp;
            acc.evi_tlpa += row.evi_tlpa;
            acc.alpha_hat += row.alpha_hat;
            acc.reps += 1;
        }
    }
    by_rank
        .into_iter()
        .map(|(rank, acc)| {
            let m = acc.reps as f64;
            AveragedRow {
                rank,
                u: acc.u / m,
                n_exceed: acc.n_exceed / m,
                evi_sp: acc.evi_sp / m,
                evi_tlpa: acc.evi_tlpa / m,
                alpha_hat: acc.alpha_hat / m,
                reps: acc.reps,
            }
        })
        .collect()
}

/// Curve study: repeated full-range scans of single-distribution samples,
/// averaged rank by rank. Repetitions whose scan fails outright (or keeps
/// no rank at all) are dropped and reported; more than 1% dropped aborts
/// the study.
pub fn run_case(spec: &ExperimentSpec) -> Result<CaseResult> {
    if !matches!(spec.generator, Generator::Single(_)) {
        return Err(Error::Data(
            "curve studies need a single-distribution generator".into(),
        ));
    }
    let outcomes: Vec<(usize, Result<ThresholdCurve>)> = (0..spec.repetitions)
        .into_par_iter()
        .map(|rep| {
            let seed = spec.rep_seed(rep);
            let run = || -> Result<ThresholdCurve> {
                let values = generate(&spec.generator, spec.n_obs, seed)?;
                let curve = scan(
                    &values,
                    full_rank_range(values.len())?,
                    &spec.gibbs.with_seed(seed),
                )?;
                if curve.rows.is_empty() {
                    return Err(Error::Data("every rank in the scan degenerated".into()));
                }
                Ok(curve)
            };
            (rep, run())
        })
        .collect();
    let mut raw = Vec::new();
    let mut failures = Vec::new();
    for (rep, outcome) in outcomes {
        match outcome {
            Ok(curve) => raw.push((rep, curve)),
            Err(e) => failures.push(RepFailure {
                rep,
                reason: e.to_string(),
            }),
        }
    }
    check_failures(failures.len(), spec.repetitions)?;
    Ok(CaseResult {
        averaged: average_curves(&raw),
        raw,
        failures,
        spec: spec.clone(),
    })
}

/// Means of the per-repetition selections.
pub fn mean_selection(raw: &[(usize, Selection)]) -> (f64, f64, f64, f64, f64) {
    let m = raw.len() as f64;
    let mut sums = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (_, sel) in raw {
        sums.0 += sel.rank_sharp as f64;
        sums.1 += sel.u_sharp;
        sums.2 += sel.gamma_sharp;
        sums.3 += sel.evi;
        sums.4 += sel.loss;
    }
    (sums.0 / m, sums.1 / m, sums.2 / m, sums.3 / m, sums.4 / m)
}

/// Mixture study: repeated automatic threshold selection on spliced
/// body-plus-tail samples. Repetitions where selection fails are dropped
/// and reported; more than 1% dropped aborts the study.
pub fn run_mixture_study(spec: &ExperimentSpec) -> Result<MixtureResult> {
    if !matches!(spec.generator, Generator::Mixture { .. }) {
        return Err(Error::Data(
            "mixture studies need a body+tail generator".into(),
        ));
    }
    let outcomes: Vec<(usize, Result<Selection>)> = (0..spec.repetitions)
        .into_par_iter()
        .map(|rep| {
            let seed = spec.rep_seed(rep);
            let run = || -> Result<Selection> {
                let values = generate(&spec.generator, spec.n_obs, seed)?;
                select_with_strategy(&values, &spec.grid, spec.strategy)
            };
            (rep, run())
        })
        .collect();
    let mut raw = Vec::new();
    let mut failures = Vec::new();
    for (rep, outcome) in outcomes {
        match outcome {
            Ok(sel) => raw.push((rep, sel)),
            Err(e) => failures.push(RepFailure {
                rep,
                reason: e.to_string(),
            }),
        }
    }
    check_failures(failures.len(), spec.repetitions)?;
    if raw.is_empty() {
        return Err(Error::NoFeasibleGridPoint);
    }
    let (mean_rank, mean_u, mean_gamma_sharp, mean_evi, mean_loss) = mean_selection(&raw);
    Ok(MixtureResult {
        repetitions: raw.len(),
        mean_rank,
        mean_u,
        mean_gamma_sharp,
        mean_evi,
        mean_loss,
        raw,
        failures,
        spec: spec.clone(),
    })
}

/// Runs whichever study shape the generator implies.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    match spec.generator {
        Generator::Single(_) => Ok(ExperimentOutcome::Curve(run_case(spec)?)),
        Generator::Mixture { .. } => Ok(ExperimentOutcome::Selection(run_mixture_study(spec)?)),
    }
}
