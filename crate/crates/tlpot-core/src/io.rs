//! CSV ingestion and emission.
//!
//! All numeric output uses Rust's shortest-exact float formatting, so a
//! written value parses back to the identical bits; files end each line
//! with a single LF. Ingestion accepts files with or without a header row
//! and reports problems with 1-based file row numbers.

use crate::error::{Error, Result};
use crate::experiments::{AveragedRow, CaseResult, MixtureResult};
use crate::gibbs::TLPaFit;
use crate::posterior::SPFit;
use crate::qq::QQTable;
use crate::threshold::{Selection, ThresholdCurve};
use csv::{ReaderBuilder, StringRecord, Trim};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

/// Which column of a CSV file holds the observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSel {
    /// 0-based column index; works with or without a header row.
    Index(usize),
    /// Header name; requires a header row.
    Name(String),
}

impl FromStr for ColumnSel {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty column selector".into()));
        }
        match t.parse::<usize>() {
            Ok(i) => Ok(ColumnSel::Index(i)),
            Err(_) => Ok(ColumnSel::Name(t.to_string())),
        }
    }
}

/// Observations read from one CSV column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Column name, or `colK` for a headerless index selection.
    pub name: String,
    pub values: Vec<f64>,
    /// Where the data came from, for messages.
    pub source: String,
}

fn parse_cell(cell: &str, column: &str, row: usize) -> Result<f64> {
    let t = cell.trim();
    if t.is_empty() {
        return Err(Error::Data(format!(
            "empty value in column {column} at row {row}"
        )));
    }
    let v: f64 = t.parse().map_err(|_| {
        Error::Data(format!(
            "non-numeric value {t:?} in column {column} at row {row}"
        ))
    })?;
    if !v.is_finite() {
        return Err(Error::Data(format!(
            "non-finite value {t} in column {column} at row {row}"
        )));
    }
    Ok(v)
}

/// Reads one numeric column from CSV text. Header handling: a name
/// selector requires the first row to contain that name; an index selector
/// inspects the first row and treats it as a header exactly when the
/// indexed cell does not parse as a number.
pub fn ingest_csv_from_reader<R: Read>(
    reader: R,
    column: &ColumnSel,
    source: &str,
) -> Result<Dataset> {
    let mut rdr = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(reader);
    let mut records: Vec<StringRecord> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Data(format!("{source}: row {}: {e}", i + 1)))?;
        records.push(rec);
    }
    if records.is_empty() {
        return Err(Error::Data(format!("{source}: file has no rows")));
    }
    let first = &records[0];
    let (idx, name, first_data_row) = match column {
        ColumnSel::Name(name) => {
            let idx = first.iter().position(|h| h == name).ok_or_else(|| {
                Error::Data(format!(
                    "{source}: no column named {name:?} in header [{}]",
                    first.iter().collect::<Vec<_>>().join(", ")
                ))
            })?;
            (idx, name.clone(), 2usize)
        }
        ColumnSel::Index(i) => {
            let cell = first.get(*i).ok_or_else(|| {
                Error::Data(format!(
                    "{source}: column index {i} out of range; row 1 has {} column(s)",
                    first.len()
                ))
            })?;
            if cell.trim().parse::<f64>().is_ok() {
                (*i, format!("col{i}"), 1usize)
            } else {
                (*i, cell.trim().to_string(), 2usize)
            }
        }
    };
    let mut values = Vec::with_capacity(records.len());
    for (k, rec) in records.iter().enumerate().skip(first_data_row - 1) {
        let row = k + 1;
        let cell = rec.get(idx).ok_or_else(|| {
            Error::Data(format!(
                "{source}: row {row} has {} column(s), expected at least {}",
                rec.len(),
                idx + 1
            ))
        })?;
        values.push(parse_cell(cell, &name, row).map_err(|e| prefix_source(e, source))?);
    }
    if values.is_empty() {
        return Err(Error::Data(format!("{source}: no data rows")));
    }
    Ok(Dataset {
        name,
        values,
        source: source.to_string(),
    })
}

fn prefix_source(e: Error, source: &str) -> Error {
    match e {
        Error::Data(msg) => Error::Data(format!("{source}: {msg}")),
        other => other,
    }
}

/// Reads one numeric column from a CSV file on disk.
pub fn ingest_csv(path: &Path, column: &ColumnSel) -> Result<Dataset> {
    let file = File::open(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    ingest_csv_from_reader(file, column, &path.display().to_string())
}

/// Shortest decimal text that parses back to exactly `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub fn write_values<W: Write>(mut w: W, name: &str, values: &[f64]) -> Result<()> {
    writeln!(w, "{name}")?;
    for v in values {
        writeln!(w, "{}", fmt_f64(*v))?;
    }
    Ok(())
}

pub const CURVE_HEADER: &str = "rank,u,n_exceed,evi_sp,evi_tlpa,alpha_hat";

pub fn write_curve<W: Write>(mut w: W, curve: &ThresholdCurve) -> Result<()> {
    writeln!(w, "{CURVE_HEADER}")?;
    for r in &curve.rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.rank,
            fmt_f64(r.u),
            r.n_exceed,
            fmt_f64(r.evi_sp),
            fmt_f64(r.evi_tlpa),
            fmt_f64(r.alpha_hat)
        )?;
    }
    Ok(())
}

pub const AVG_CURVE_HEADER: &str = "rank,u,n_exceed,evi_sp,evi_tlpa,alpha_hat,reps";

pub fn write_avg_curve<W: Write>(mut w: W, rows: &[AveragedRow]) -> Result<()> {
    writeln!(w, "{AVG_CURVE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.rank,
            fmt_f64(r.u),
            fmt_f64(r.n_exceed),
            fmt_f64(r.evi_sp),
            fmt_f64(r.evi_tlpa),
            fmt_f64(r.alpha_hat),
            r.reps
        )?;
    }
    Ok(())
}

pub const SELECTION_HEADER: &str = "gamma_sharp,rank,u,evi,loss";

pub fn write_selection<W: Write>(mut w: W, sel: &Selection) -> Result<()> {
    writeln!(w, "{SELECTION_HEADER}")?;
    writeln!(
        w,
        "{},{},{},{},{}",
        fmt_f64(sel.gamma_sharp),
        sel.rank_sharp,
        fmt_f64(sel.u_sharp),
        fmt_f64(sel.evi),
        fmt_f64(sel.loss)
    )?;
    Ok(())
}

pub const MIXTURE_SUMMARY_HEADER: &str =
    "repetitions,mean_rank,mean_u,mean_gamma_sharp,mean_evi,mean_loss";

pub fn write_mixture_summary<W: Write>(mut w: W, res: &MixtureResult) -> Result<()> {
    writeln!(w, "{MIXTURE_SUMMARY_HEADER}")?;
    writeln!(
        w,
        "{},{},{},{},{},{}",
        res.repetitions,
        fmt_f64(res.mean_rank),
        fmt_f64(res.mean_u),
        fmt_f64(res.mean_gamma_sharp),
        fmt_f64(res.mean_evi),
        fmt_f64(res.mean_loss)
    )?;
    Ok(())
}

pub const RAW_CASE_HEADER: &str = "rep,rank,u,n_exceed,evi_sp,evi_tlpa,alpha_hat";

pub fn write_raw_case<W: Write>(mut w: W, res: &CaseResult) -> Result<()> {
    writeln!(w, "{RAW_CASE_HEADER}")?;
    for (rep, curve) in &res.raw {
        for r in &curve.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                rep,
                r.rank,
                fmt_f64(r.u),
                r.n_exceed,
                fmt_f64(r.evi_sp),
                fmt_f64(r.evi_tlpa),
                fmt_f64(r.alpha_hat)
            )?;
        }
    }
    Ok(())
}

pub const RAW_SELECTION_HEADER: &str = "rep,gamma_sharp,rank,u,evi,loss";

pub fn write_raw_selections<W: Write>(mut w: W, res: &MixtureResult) -> Result<()> {
    writeln!(w, "{RAW_SELECTION_HEADER}")?;
    for (rep, s) in &res.raw {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            rep,
            fmt_f64(s.gamma_sharp),
            s.rank_sharp,
            fmt_f64(s.u_sharp),
            fmt_f64(s.evi),
            fmt_f64(s.loss)
        )?;
    }
    Ok(())
}

pub const QQ_HEADER: &str = "log_sorted_obs,log_q_sp,log_q_tlpa";

pub fn write_qq<W: Write>(mut w: W, table: &QQTable) -> Result<()> {
    writeln!(w, "{QQ_HEADER}")?;
    for r in &table.rows {
        writeln!(
            w,
            "{},{},{}",
            fmt_f64(r.log_sorted_obs),
            fmt_f64(r.log_q_sp),
            fmt_f64(r.log_q_tlpa)
        )?;
    }
    Ok(())
}

/// Joint report of the two fits above one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub rank: usize,
    pub u: f64,
    pub n_exceed: usize,
    pub sp_gamma_hat: f64,
    pub sp_evi: f64,
    pub tlpa_alpha_hat: f64,
    pub tlpa_gamma_hat: f64,
    pub tlpa_evi: f64,
}

impl FitReport {
    pub fn new(rank: usize, u: f64, n_exceed: usize, sp: &SPFit, tlpa: &TLPaFit) -> Self {
        FitReport {
            rank,
            u,
            n_exceed,
            sp_gamma_hat: sp.gamma_hat,
            sp_evi: sp.evi,
            tlpa_alpha_hat: tlpa.alpha_hat,
            tlpa_gamma_hat: tlpa.gamma_hat,
            tlpa_evi: tlpa.evi,
        }
    }
}

pub const FIT_HEADER: &str =
    "rank,u,n_exceed,sp_gamma_hat,sp_evi,tlpa_alpha_hat,tlpa_gamma_hat,tlpa_evi";

pub fn write_fit<W: Write>(mut w: W, fit: &FitReport) -> Result<()> {
    writeln!(w, "{FIT_HEADER}")?;
    writeln!(
        w,
        "{},{},{},{},{},{},{},{}",
        fit.rank,
        fmt_f64(fit.u),
        fit.n_exceed,
        fmt_f64(fit.sp_gamma_hat),
        fmt_f64(fit.sp_evi),
        fmt_f64(fit.tlpa_alpha_hat),
        fmt_f64(fit.tlpa_gamma_hat),
        fmt_f64(fit.tlpa_evi)
    )?;
    Ok(())
}

/// One histogram bin: `[left, right)`, except the last bin which is closed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Equal-width histogram. With `bins = None` the bin count follows the
/// Freedman-Diaconis rule, 2*IQR/n^(1/3) bin widths, falling back to
/// Sturges when the interquartile range vanishes; the count is clamped to
/// [1, 10000].
pub fn hist_bins(values: &[f64], bins: Option<usize>) -> Result<Vec<HistBin>> {
    if values.is_empty() {
        return Err(Error::Data("histogram of an empty sample".into()));
    }
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Data(format!(
                "observation {} is not finite: {v}",
                i + 1
            )));
        }
    }
    if bins == Some(0) {
        return Err(Error::Data("histogram needs at least 1 bin".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    if min == max {
        return Ok(vec![HistBin {
            left: min,
            right: max,
            count: values.len(),
        }]);
    }
    let k = match bins {
        Some(k) => k,
        None => {
            let n = values.len() as f64;
            let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
            let width = 2.0 * iqr / n.cbrt();
            let k = if width > 0.0 {
                ((max - min) / width).ceil() as usize
            } else {
                (n.log2().ceil() as usize) + 1
            };
            k.clamp(1, 10_000)
        }
    };
    let width = (max - min) / k as f64;
    let mut counts = vec![0usize; k];
    for v in values {
        let idx = (((v - min) / width) as usize).min(k - 1);
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistBin {
            left: min + width * i as f64,
            right: if i + 1 == k {
                max
            } else {
                min + width * (i + 1) as f64
            },
            count,
        })
        .collect())
}

pub const HIST_HEADER: &str = "bin_left,bin_right,count,threshold";

/// Writes histogram bins; `marker` fills the threshold column on every row
/// so a plot can overlay the selected threshold, empty when absent.
pub fn write_hist<W: Write>(mut w: W, bins: &[HistBin], marker: Option<f64>) -> Result<()> {
    writeln!(w, "{HIST_HEADER}")?;
    let marker_text = marker.map(fmt_f64).unwrap_or_default();
    for b in bins {
        writeln!(
            w,
            "{},{},{},{marker_text}",
            fmt_f64(b.left),
            fmt_f64(b.right),
            b.count
        )?;
    }
    Ok(())
}

/// Renders any writer's output to a String (helper for callers emitting to
/// stdout or composing messages).
pub fn to_string_with<F>(f: F) -> Result<String>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Data(format!("non-UTF8 output: {e}")))
}
