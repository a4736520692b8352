//! Atomic file output, CSV layouts and the p-value table.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use portmix_core::correlation::CorrelationSet;
use portmix_core::estimation::FittedModel;
use portmix_core::montecarlo::ExperimentReport;
use portmix_core::portmanteau::{TestId, TestResult};
use portmix_core::TimeSeries;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Creates `dir` (and parents) if missing.
pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One value per row under a `value` header, or `date,value` when the
/// series carries timestamps.
pub fn series_csv(series: &TimeSeries) -> Vec<u8> {
    match series.timestamps() {
        Some(dates) => csv_bytes(
            &["date", "value"],
            dates.iter().zip(series.values()).map(|(d, v)| vec![d.clone(), v.to_string()]),
        ),
        None => csv_bytes(&["value"], series.values().iter().map(|v| vec![v.to_string()])),
    }
}

/// `t, eps, h, xi` per observation.
pub fn residuals_csv(fitted: &FittedModel) -> Vec<u8> {
    csv_bytes(
        &["t", "eps", "h", "xi"],
        (0..fitted.n()).map(|t| {
            vec![(t + 1).to_string(), fitted.eps[t].to_string(), fitted.h[t].to_string(), fitted.xi[t].to_string()]
        }),
    )
}

/// `lag, r11, r22, r12, r21`.
pub fn correlations_csv(set: &CorrelationSet) -> Vec<u8> {
    csv_bytes(
        &["lag", "r11", "r22", "r12", "r21"],
        set.rows().map(|(k, r)| {
            let mut row = vec![k.to_string()];
            row.extend(r.iter().map(f64::to_string));
            row
        }),
    )
}

/// Long layout: one row per `(dgp, n, m, param, test)` cell.
pub fn cells_csv(report: &ExperimentReport) -> Vec<u8> {
    csv_bytes(
        &["dgp", "n", "m", "param", "test", "rejections", "replications", "frequency", "std_error"],
        report.cells.iter().map(|c| {
            vec![
                c.dgp.clone(),
                c.n.to_string(),
                c.m.to_string(),
                opt(c.param),
                c.test.clone(),
                c.rejections.to_string(),
                c.replications.to_string(),
                c.frequency.to_string(),
                c.std_error.to_string(),
            ]
        }),
    )
}

/// Wide layout: one row per `(dgp, n, m, param)` with a frequency column
/// per test, in first-appearance order.
pub fn report_csv(report: &ExperimentReport) -> Vec<u8> {
    let mut tests: Vec<&str> = Vec::new();
    let mut keys: Vec<(&str, usize, usize, Option<f64>, usize)> = Vec::new();
    for c in &report.cells {
        if !tests.contains(&c.test.as_str()) {
            tests.push(&c.test);
        }
        let key = (c.dgp.as_str(), c.n, c.m, c.param, c.replications);
        if !keys.iter().any(|k| (k.0, k.1, k.2, k.3) == (key.0, key.1, key.2, key.3)) {
            keys.push(key);
        }
    }
    let mut header = vec!["dgp", "n", "m", "param", "replications"];
    header.extend(&tests);
    let rows = keys.iter().map(|&(dgp, n, m, param, reps)| {
        let mut row = vec![dgp.to_string(), n.to_string(), m.to_string(), opt(param), reps.to_string()];
        for t in &tests {
            let f = report.cell(dgp, n, m, param, t).map(|c| c.frequency.to_string());
            row.push(f.unwrap_or_default());
        }
        row
    });
    csv_bytes(&header, rows.collect::<Vec<_>>())
}

/// `dgp, n, m, test, df, replication, statistic` for every null draw.
pub fn null_samples_csv(report: &ExperimentReport) -> Vec<u8> {
    let rows = report.null_samples.iter().flat_map(|s| {
        s.values.iter().enumerate().map(move |(i, v)| {
            vec![
                s.dgp.clone(),
                s.n.to_string(),
                s.m.to_string(),
                s.test.to_string(),
                s.df.to_string(),
                (i + 1).to_string(),
                v.to_string(),
            ]
        })
    });
    csv_bytes(&["dgp", "n", "m", "test", "df", "replication", "statistic"], rows.collect::<Vec<_>>())
}

/// Rows `m`, one column of p-values (4 decimals) per test.
pub fn pvalue_table(results: &[TestResult], tests: &[TestId]) -> String {
    let mut lags: Vec<usize> = Vec::new();
    for r in results {
        if !lags.contains(&r.m) {
            lags.push(r.m);
        }
    }
    let mut out = format!("{:>4}", "m");
    for t in tests {
        let _ = write!(out, "  {:>8}", t.name());
    }
    out.push('\n');
    for m in lags {
        let _ = write!(out, "{m:>4}");
        for t in tests {
            match results.iter().find(|r| r.m == m && r.test == *t) {
                Some(r) => {
                    let _ = write!(out, "  {:>8.4}", r.p_value);
                }
                None => out.push_str("          "),
            }
        }
        out.push('\n');
    }
    out
}
