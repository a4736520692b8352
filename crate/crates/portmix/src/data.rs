//! Reading observed series from CSV files.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use portmix_core::TimeSeries;

use crate::error::{CliError, Result};

/// Minimum usable length after any transform.
pub const MIN_LENGTH: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum DataFormat {
    /// One column, or two columns read as `date,value`.
    #[default]
    Auto,
    /// One value per line.
    Single,
    /// `date,value` rows.
    DateValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transform {
    #[default]
    None,
    /// `ln(p_t / p_{t-1})`.
    LogReturns,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSource {
    pub path: PathBuf,
    pub format: DataFormat,
    pub transform: Transform,
}

impl DataSource {
    pub fn read(&self) -> Result<TimeSeries> {
        let text = std::fs::read_to_string(&self.path).map_err(|e| CliError::io(&self.path, e))?;
        let (values, dates) = parse_csv(&self.path, &text, self.format)?;
        let (values, dates) = match self.transform {
            Transform::None => (values, dates),
            Transform::LogReturns => {
                (log_returns(&values).map_err(|m| CliError::parse(&self.path, m))?, dates.map(|d| d[1..].to_vec()))
            }
        };
        if values.len() < MIN_LENGTH {
            return Err(CliError::parse(
                &self.path,
                format!("{} usable observations; at least {MIN_LENGTH} are required", values.len()),
            ));
        }
        let series = match dates {
            Some(d) => TimeSeries::with_timestamps(values, d),
            None => TimeSeries::new(values),
        };
        series.map_err(|e| CliError::parse(&self.path, e.to_string()))
    }
}

/// Differenced natural logarithms of strictly positive prices.
pub fn log_returns(prices: &[f64]) -> std::result::Result<Vec<f64>, String> {
    if let Some(i) = prices.iter().position(|p| !(*p > 0.0)) {
        return Err(format!("log-returns need positive prices; value {} at row {} is not", prices[i], i + 1));
    }
    Ok(prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

type Parsed = (Vec<f64>, Option<Vec<String>>);

fn parse_csv(path: &Path, text: &str, format: DataFormat) -> Result<Parsed> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut dates = Vec::new();
    let mut columns = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::parse(path, e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let width = match (format, columns) {
            (_, Some(w)) => w,
            (DataFormat::Single, None) => 1,
            (DataFormat::DateValue, None) => 2,
            (DataFormat::Auto, None) => record.len(),
        };
        if record.len() != width || !(1..=2).contains(&width) {
            return Err(CliError::parse(path, format!("row {}: expected {width} column(s), found {}", i + 1, record.len())));
        }
        let raw = &record[width - 1];
        let Ok(v) = f64::from_str(raw) else {
            if columns.is_none() && values.is_empty() {
                // Header row.
                columns = Some(width);
                continue;
            }
            return Err(CliError::parse(path, format!("row {}: '{raw}' is not a number", i + 1)));
        };
        if !v.is_finite() {
            return Err(CliError::parse(path, format!("row {}: non-finite value", i + 1)));
        }
        columns = Some(width);
        values.push(v);
        if width == 2 {
            dates.push(record[0].to_string());
        }
    }
    if values.is_empty() {
        return Err(CliError::parse(path, "no observations"));
    }
    Ok((values, (columns == Some(2)).then_some(dates)))
}
