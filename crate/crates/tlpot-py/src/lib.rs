//! Python bindings for the peaks-over-threshold tail-analysis crate.
//!
//! Distributions are named by compact spec strings — `"sp(gamma=5)"`,
//! `"tlpa(alpha=2,gamma=1)"`, `"frechet(gamma=2)"`,
//! `"burr(lambda=1,tau=1,eta=1)"`, `"normal(mu=5,sigma2=1)"` — so the
//! Python surface stays free of parameter-order pitfalls. Every error from
//! the core library surfaces as `ValueError` with the core message.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use tlpot_core::distributions::DistSpec;
use tlpot_core::gibbs::{estimate_tlpa as core_estimate_tlpa, GibbsConfig};
use tlpot_core::posterior::{
    expected_alpha as core_expected_alpha, sp_posterior, ExceedanceSample,
};
use tlpot_core::threshold::{
    full_rank_range, scan as core_scan, select_with_strategy, SelectionGrid, SelectionStrategy,
};

fn err(e: tlpot_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_spec(spec: &str) -> PyResult<DistSpec> {
    spec.parse::<DistSpec>().map_err(err)
}

fn sorted_data(mut data: Vec<f64>) -> Vec<f64> {
    data.sort_unstable_by(f64::total_cmp);
    data
}

/// Density of `dist` at `y`.
#[pyfunction]
fn pdf(dist: &str, y: f64) -> PyResult<f64> {
    parse_spec(dist)?.pdf(y).map_err(err)
}

/// Cumulative distribution of `dist` at `y`.
#[pyfunction]
fn cdf(dist: &str, y: f64) -> PyResult<f64> {
    parse_spec(dist)?.cdf(y).map_err(err)
}

/// Survival (upper tail) of `dist` at `y`.
#[pyfunction]
fn survival(dist: &str, y: f64) -> PyResult<f64> {
    parse_spec(dist)?.survival(y).map_err(err)
}

/// Quantile of `dist` at probability `p` (inverse of `cdf`).
#[pyfunction]
fn quantile(dist: &str, p: f64) -> PyResult<f64> {
    parse_spec(dist)?.quantile(p).map_err(err)
}

/// `n` reproducible draws from `dist`; the same seed gives the same list.
#[pyfunction]
#[pyo3(signature = (dist, n, seed = 0))]
fn sample(dist: &str, n: usize, seed: u64) -> PyResult<Vec<f64>> {
    Ok(parse_spec(dist)?.sample(n, seed).map_err(err)?.values)
}

/// Strict Pareto conjugate fit from relative excesses (each > 1).
///
/// Returns `{"shape", "rate", "gamma_hat", "evi"}`: the exponent posterior
/// is Gamma(shape, rate), `gamma_hat` its mean, `evi` the index estimate
/// `1/gamma_hat`.
#[pyfunction]
fn sp_fit(py: Python<'_>, excesses: Vec<f64>) -> PyResult<Py<PyAny>> {
    let sample = ExceedanceSample::new(excesses).map_err(err)?;
    let fit = sp_posterior(&sample);
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("shape", fit.posterior.shape)?;
    dict.set_item("rate", fit.posterior.rate)?;
    dict.set_item("gamma_hat", fit.gamma_hat)?;
    dict.set_item("evi", fit.evi)?;
    Ok(dict.into())
}

/// Posterior mean of the shape `alpha` given the exponent `gamma`, from
/// relative excesses (each > 1). Equals 1 exactly when the excesses are
/// strict Pareto with exponent `2 * gamma` in expectation; the threshold
/// search drives this toward 1.
#[pyfunction]
fn expected_alpha(gamma: f64, excesses: Vec<f64>) -> PyResult<f64> {
    let sample = ExceedanceSample::new(excesses).map_err(err)?;
    core_expected_alpha(gamma, &sample).map_err(err)
}

/// Two-parameter tail fit from relative excesses via the alternating
/// conditional sampler.
///
/// Returns `{"alpha_hat", "gamma_hat", "evi"}` where `evi` is exactly
/// `1/(2 * gamma_hat)`. Deterministic in (`excesses`, `seed`, `n_pairs`,
/// `burn_in`).
#[pyfunction]
#[pyo3(signature = (excesses, seed = 0, n_pairs = None, burn_in = None))]
fn estimate_tlpa(
    py: Python<'_>,
    excesses: Vec<f64>,
    seed: u64,
    n_pairs: Option<usize>,
    burn_in: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let sample = ExceedanceSample::new(excesses).map_err(err)?;
    let mut cfg = GibbsConfig::new(seed);
    if let Some(p) = n_pairs {
        cfg.n_pairs = p;
    }
    if let Some(b) = burn_in {
        cfg.burn_in = b;
    }
    let fit = core_estimate_tlpa(&sample, &cfg).map_err(err)?;
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("alpha_hat", fit.alpha_hat)?;
    dict.set_item("gamma_hat", fit.gamma_hat)?;
    dict.set_item("evi", fit.evi)?;
    Ok(dict.into())
}

/// Fits both tail models at every feasible threshold rank.
///
/// `data` is the full sample in any order. Returns a list of per-rank dicts
/// `{"rank", "u", "n_exceed", "evi_sp", "evi_tlpa", "alpha_hat"}`; ranks
/// whose fit degenerates are silently absent.
#[pyfunction]
#[pyo3(signature = (data, min_rank = None, max_rank = None, seed = 0))]
fn scan(
    py: Python<'_>,
    data: Vec<f64>,
    min_rank: Option<usize>,
    max_rank: Option<usize>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let values = sorted_data(data);
    let (lo, hi) = full_rank_range(values.len()).map_err(err)?;
    let range = (min_rank.unwrap_or(lo), max_rank.unwrap_or(hi));
    let curve = core_scan(&values, range, &GibbsConfig::new(seed)).map_err(err)?;
    let rows = pyo3::types::PyList::empty(py);
    for r in &curve.rows {
        let dict = pyo3::types::PyDict::new(py);
        dict.set_item("rank", r.rank)?;
        dict.set_item("u", r.u)?;
        dict.set_item("n_exceed", r.n_exceed)?;
        dict.set_item("evi_sp", r.evi_sp)?;
        dict.set_item("evi_tlpa", r.evi_tlpa)?;
        dict.set_item("alpha_hat", r.alpha_hat)?;
        rows.append(dict)?;
    }
    Ok(rows.into())
}

/// Selects a threshold automatically by minimizing the squared distance of
/// the expected shape from 1 over a (gamma, rank) grid.
///
/// `data` is the full sample in any order; `strategy` is `"grid"` (joint
/// search, the default) or `"profile"` (per-rank plug-in exponent). Returns
/// `{"gamma_sharp", "rank", "u", "evi", "loss"}`. Deterministic: no
/// sampling is involved.
#[pyfunction]
#[pyo3(signature = (data, strategy = "grid"))]
fn select(py: Python<'_>, data: Vec<f64>, strategy: &str) -> PyResult<Py<PyAny>> {
    let strategy: SelectionStrategy = strategy.parse().map_err(err)?;
    let values = sorted_data(data);
    let grid = SelectionGrid::default_for_len(values.len()).map_err(err)?;
    let sel = select_with_strategy(&values, &grid, strategy).map_err(err)?;
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("gamma_sharp", sel.gamma_sharp)?;
    dict.set_item("rank", sel.rank_sharp)?;
    dict.set_item("u", sel.u_sharp)?;
    dict.set_item("evi", sel.evi)?;
    dict.set_item("loss", sel.loss)?;
    Ok(dict.into())
}

#[pymodule]
fn tlpot(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(pdf, m)?)?;
    m.add_function(wrap_pyfunction!(cdf, m)?)?;
    m.add_function(wrap_pyfunction!(survival, m)?)?;
    m.add_function(wrap_pyfunction!(quantile, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(sp_fit, m)?)?;
    m.add_function(wrap_pyfunction!(expected_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_tlpa, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(select, m)?)?;
    Ok(())
}
