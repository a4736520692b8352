//! Seed-deterministic Monte Carlo harness for size, power, contamination and
//! null-distribution experiments.
//!
//! Every replication draws from its own ChaCha stream whose id is derived
//! from `(replication, attempt, n, purpose)`. The DGP and the swept parameter
//! are deliberately not part of the id, so grid points and DGP lists reuse the
//! same base innovations. Replications are mapped through an [`Executor`] and
//! aggregated by index, which makes reports independent of scheduling.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::dgp::{contaminate, simulate, DgpSpec, Preset};
use crate::error::{Error, Result};
use crate::estimation::{fit_qmle, select_order_bic, FitOptions, FittedModel, ModelSpec};
use crate::numeric::{chi_square_cdf, InnovationLaw, RngStream};
use crate::portmanteau::{run_battery, BatteryOptions, TestId};
use crate::series::TimeSeries;

/// Fraction of discarded replications above which a report is flagged.
pub const MAX_DISCARD_FRACTION: f64 = 0.05;
/// Redraws allowed for one replication before it is counted as lost.
pub const MAX_ATTEMPTS: u32 = 50;

/// Runs `count` independent tasks and returns their results in index order.
pub trait Executor {
    fn map<T, F>(&self, count: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs tasks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, count: usize, task: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(task).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ExperimentKind {
    Size,
    Power,
    Contamination,
    NullDistribution,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Size => "size",
            ExperimentKind::Power => "power",
            ExperimentKind::Contamination => "contamination",
            ExperimentKind::NullDistribution => "null-distribution",
        })
    }
}

/// A data-generating process: a named preset (optionally with its free
/// parameter) or a fully specified process.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum DgpChoice {
    Preset {
        preset: Preset,
        #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
        param: Option<f64>,
    },
    Custom {
        label: String,
        spec: DgpSpec,
    },
}

impl DgpChoice {
    pub fn preset(preset: Preset) -> Self {
        DgpChoice::Preset { preset, param: None }
    }

    pub fn label(&self) -> String {
        match self {
            DgpChoice::Preset { preset, param: Some(p) } => format!("{preset}({p})"),
            DgpChoice::Preset { preset, param: None } => preset.name().to_string(),
            DgpChoice::Custom { label, .. } => label.clone(),
        }
    }

    /// Builds the process; `sweep` overrides the preset parameter.
    fn build(&self, sweep: Option<f64>, innovation: &InnovationLaw) -> Result<DgpSpec> {
        match self {
            DgpChoice::Preset { preset, param } => {
                if sweep.is_some() && preset.default_param().is_none() {
                    return Err(Error::config(format!("preset {preset} has no parameter to sweep")));
                }
                Ok(preset.spec(sweep.or(*param)).with_innovation(*innovation))
            }
            DgpChoice::Custom { label, spec } => {
                if sweep.is_some() {
                    return Err(Error::config(format!("custom process '{label}' cannot be swept")));
                }
                Ok(spec.clone().with_innovation(*innovation))
            }
        }
    }
}

/// The model fitted to every simulated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "String", into = "String"))]
pub enum FitChoice {
    Model(ModelSpec),
    /// AR(p) with intercept, `p` chosen by BIC.
    ArBic,
}

impl FromStr for FitChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "ar-bic" || t == "bic" {
            Ok(FitChoice::ArBic)
        } else {
            Ok(FitChoice::Model(t.parse()?))
        }
    }
}

impl TryFrom<String> for FitChoice {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FitChoice> for String {
    fn from(f: FitChoice) -> String {
        f.to_string()
    }
}

impl fmt::Display for FitChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitChoice::Model(m) => write!(f, "{m}"),
            FitChoice::ArBic => f.write_str("ar-bic"),
        }
    }
}

/// Which lags `m` are tested at each sample size.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "rule", content = "values", rename_all = "kebab-case"))]
pub enum LagRule {
    /// `m = ⌊√n⌋`.
    #[default]
    FloorSqrt,
    Explicit(Vec<usize>),
    /// `{2,4,6,8,10}`, `{3,6,9,13,17}` and `{3,8,13,18,22}` for
    /// `n = 100, 300, 500`.
    PaperLists,
}

impl LagRule {
    pub fn lags(&self, n: usize) -> Result<Vec<usize>> {
        let lags = match self {
            LagRule::FloorSqrt => vec![floor_sqrt(n)],
            LagRule::Explicit(v) => v.clone(),
            LagRule::PaperLists => match n {
                100 => vec![2, 4, 6, 8, 10],
                300 => vec![3, 6, 9, 13, 17],
                500 => vec![3, 8, 13, 18, 22],
                _ => return Err(Error::config(format!("no published lag list for n = {n}"))),
            },
        };
        if lags.is_empty() || lags.iter().any(|m| *m == 0 || *m >= n) {
            return Err(Error::config(format!("lags {lags:?} are not all in 1..{n}")));
        }
        Ok(lags)
    }
}

pub fn floor_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    while r * r > n {
        r -= 1;
    }
    r
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Processes to simulate. Size, power and null-distribution runs report
    /// each separately; contamination runs treat these as the linear list.
    pub dgps: Vec<DgpChoice>,
    /// Nonlinear list for contamination runs.
    #[cfg_attr(feature = "serde", serde(default))]
    pub alternatives: Vec<DgpChoice>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub innovation: InnovationLaw,
    pub fit: FitChoice,
    pub n: Vec<usize>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub lags: LagRule,
    pub replications: usize,
    #[cfg_attr(feature = "serde", serde(default = "default_alpha"))]
    pub alpha: f64,
    pub tests: Vec<TestId>,
    /// Preset parameter values (power) or noise-to-signal ratios ω²
    /// (contamination).
    #[cfg_attr(feature = "serde", serde(default))]
    pub grid: Vec<f64>,
    pub seed: u64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub battery: BatteryOptions,
    /// Burn-in as a fraction of `n` (the study simulates `n + n/2` points).
    #[cfg_attr(feature = "serde", serde(default = "default_burn_in"))]
    pub burn_in_fraction: f64,
}

#[cfg(feature = "serde")]
fn default_alpha() -> f64 {
    0.05
}

#[cfg(feature = "serde")]
fn default_burn_in() -> f64 {
    0.5
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, dgps: Vec<DgpChoice>, fit: FitChoice, n: Vec<usize>, tests: Vec<TestId>) -> Self {
        Self {
            kind,
            dgps,
            alternatives: Vec::new(),
            innovation: InnovationLaw::StandardNormal,
            fit,
            n,
            lags: LagRule::FloorSqrt,
            replications: 1000,
            alpha: 0.05,
            tests,
            grid: Vec::new(),
            seed: 0,
            battery: BatteryOptions::default(),
            burn_in_fraction: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 100 {
            return Err(Error::config("at least 100 replications are required"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::config("alpha must lie in (0, 1]"));
        }
        if self.dgps.is_empty() {
            return Err(Error::config("no data-generating process given"));
        }
        if self.kind == ExperimentKind::Contamination && self.alternatives.is_empty() {
            return Err(Error::config("contamination runs need a nonlinear process list"));
        }
        if self.n.is_empty() || self.tests.is_empty() {
            return Err(Error::config("sample sizes and tests must be nonempty"));
        }
        if self.kind == ExperimentKind::Contamination && self.grid.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::config("noise-to-signal ratios must be nonnegative"));
        }
        if !(self.burn_in_fraction >= 0.0) {
            return Err(Error::config("burn-in fraction must be nonnegative"));
        }
        self.innovation.validate()?;
        for &n in &self.n {
            self.lags.lags(n)?;
        }
        let sweep = self.kind == ExperimentKind::Power && !self.grid.is_empty();
        for d in self.dgps.iter().chain(&self.alternatives) {
            d.build(if sweep { self.grid.first().copied() } else { None }, &self.innovation)?.validate()?;
        }
        Ok(())
    }
}

/// Rejection frequency of one test in one cell.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellResult {
    pub dgp: String,
    pub n: usize,
    pub m: usize,
    /// Swept preset parameter or ω².
    pub param: Option<f64>,
    /// A test name, or `Cstar` / `Qstar`.
    pub test: String,
    pub rejections: usize,
    pub replications: usize,
    pub frequency: f64,
    pub std_error: f64,
}

/// Non-convergent fits redrawn for one `(dgp, n, param)` group.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiscardCount {
    pub dgp: String,
    pub n: usize,
    pub param: Option<f64>,
    pub discarded: usize,
    /// Replications for which no attempt converged.
    pub lost: usize,
}

/// Raw statistics of one test at one lag under the null.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NullSample {
    pub dgp: String,
    pub n: usize,
    pub m: usize,
    pub test: TestId,
    pub df: u32,
    pub values: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    /// Kolmogorov-Smirnov distance to `χ²(df)`.
    pub ks: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub alpha: f64,
    pub replications: usize,
    pub seed: u64,
    pub cells: Vec<CellResult>,
    pub discards: Vec<DiscardCount>,
    /// Set when some group discarded more than [`MAX_DISCARD_FRACTION`] of
    /// its replications.
    pub flagged: bool,
    /// Acceptance region of a frequency at the nominal level, 95% and 99%.
    pub band95: (f64, f64),
    pub band99: (f64, f64),
    pub null_samples: Vec<NullSample>,
}

impl ExperimentReport {
    pub fn cell(&self, dgp: &str, n: usize, m: usize, param: Option<f64>, test: &str) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.dgp == dgp && c.n == n && c.m == m && c.param == param && c.test == test)
    }
}

/// `α ± z √(α(1-α)/R)`.
pub fn null_band(alpha: f64, replications: usize, z: f64) -> (f64, f64) {
    let half = z * (alpha * (1.0 - alpha) / replications as f64).sqrt();
    (alpha - half, alpha + half)
}

/// `√(f(1-f)/R)`.
pub fn binomial_se(frequency: f64, replications: usize) -> f64 {
    if replications == 0 {
        return 0.0;
    }
    (frequency * (1.0 - frequency) / replications as f64).sqrt()
}

/// Kolmogorov-Smirnov distance between the empirical law of `sample` and
/// `χ²(df)`.
pub fn ks_chi_square(sample: &[f64], df: u32) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::domain("empty sample"));
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let mut d: f64 = 0.0;
    for (i, v) in x.iter().enumerate() {
        let f = chi_square_cdf(v.max(0.0), df)?;
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

const TAG_SERIES: u64 = 1;
const TAG_NOISE: u64 = 2;

/// Stream id for one replication attempt: replication in the top 32 bits,
/// then the attempt (8 bits), `n` (20 bits) and a purpose tag (4 bits).
pub fn stream_id(replication: u64, attempt: u32, n: usize, tag: u64) -> u64 {
    (replication << 32) | ((attempt as u64 & 0xff) << 24) | ((n as u64 & 0xf_ffff) << 4) | (tag & 0xf)
}

fn fit(choice: &FitChoice, series: &TimeSeries) -> Option<FittedModel> {
    match choice {
        FitChoice::Model(spec) => fit_qmle(spec, series, &FitOptions::default()).ok().filter(|f| f.converged),
        FitChoice::ArBic => select_order_bic(series).ok().map(|s| s.fitted),
    }
}

/// Outcome of one replication: statistic and p-value per `(m, test)`.
struct Replication {
    stats: Vec<f64>,
    p_values: Vec<f64>,
    discarded: usize,
    lost: bool,
}

struct Group<'a> {
    label: String,
    dgp: DgpSpec,
    n: usize,
    lags: Vec<usize>,
    param: Option<f64>,
    omega_sq: f64,
    config: &'a ExperimentConfig,
}

impl Group<'_> {
    fn replicate(&self, rep: usize) -> Replication {
        let cfg = self.config;
        let burn = ((self.n as f64 * cfg.burn_in_fraction) as usize).max(self.dgp.max_lag());
        let width = self.lags.len() * cfg.tests.len();
        let mut discarded = 0;
        for attempt in 0..MAX_ATTEMPTS {
            let mut stream = RngStream::new(cfg.seed, stream_id(rep as u64, attempt, self.n, TAG_SERIES));
            let Ok(mut series) = simulate(&self.dgp, self.n, burn, &mut stream) else {
                discarded += 1;
                continue;
            };
            if self.omega_sq > 0.0 {
                let mut noise = RngStream::new(cfg.seed, stream_id(rep as u64, attempt, self.n, TAG_NOISE));
                match contaminate(&series, self.omega_sq, &mut noise) {
                    Ok(s) => series = s,
                    Err(_) => {
                        discarded += 1;
                        continue;
                    }
                }
            }
            let Some(fitted) = fit(&cfg.fit, &series) else {
                discarded += 1;
                continue;
            };
            let Ok(results) = run_battery(&fitted, &self.lags, &cfg.tests, &cfg.battery) else {
                discarded += 1;
                continue;
            };
            return Replication {
                stats: results.iter().map(|r| r.statistic).collect(),
                p_values: results.iter().map(|r| r.p_value).collect(),
                discarded,
                lost: false,
            };
        }
        Replication { stats: vec![f64::NAN; width], p_values: vec![f64::NAN; width], discarded, lost: true }
    }
}

fn groups(config: &ExperimentConfig) -> Result<Vec<Group<'_>>> {
    let mut out = Vec::new();
    let sweep: Vec<Option<f64>> = if config.grid.is_empty() {
        vec![None]
    } else {
        config.grid.iter().map(|g| Some(*g)).collect()
    };
    let dgps: Vec<&DgpChoice> = config.dgps.iter().chain(&config.alternatives).collect();
    for &n in &config.n {
        let lags = config.lags.lags(n)?;
        for point in &sweep {
            for d in &dgps {
                let (dgp, omega_sq) = match config.kind {
                    ExperimentKind::Power => (d.build(*point, &config.innovation)?, 0.0),
                    ExperimentKind::Contamination => (d.build(None, &config.innovation)?, point.unwrap_or(0.0)),
                    _ => (d.build(None, &config.innovation)?, 0.0),
                };
                out.push(Group { label: d.label(), dgp, n, lags: lags.clone(), param: *point, omega_sq, config });
            }
        }
    }
    Ok(out)
}

fn tally(group: &Group<'_>, reps: &[Replication], alpha: f64) -> Vec<CellResult> {
    let tests = &group.config.tests;
    let kept: Vec<&Replication> = reps.iter().filter(|r| !r.lost).collect();
    let r = kept.len();
    let mut cells = Vec::new();
    for (mi, &m) in group.lags.iter().enumerate() {
        let freq_of = |test: TestId| -> Option<f64> {
            let j = tests.iter().position(|t| *t == test)?;
            Some(kept.iter().filter(|rep| rep.p_values[mi * tests.len() + j] <= alpha).count() as f64 / r.max(1) as f64)
        };
        let mut push = |name: String, rejections: usize, frequency: f64| {
            cells.push(CellResult {
                dgp: group.label.clone(),
                n: group.n,
                m,
                param: group.param,
                test: name,
                rejections,
                replications: r,
                frequency,
                std_error: binomial_se(frequency, r),
            });
        };
        for (j, test) in tests.iter().enumerate() {
            let rejections = kept.iter().filter(|rep| rep.p_values[mi * tests.len() + j] <= alpha).count();
            push(test.name().to_string(), rejections, rejections as f64 / r.max(1) as f64);
        }
        if group.config.kind == ExperimentKind::Power {
            for (name, a, b) in [("Cstar", TestId::C12, TestId::C21), ("Qstar", TestId::Q12, TestId::Q21)] {
                if let (Some(fa), Some(fb)) = (freq_of(a), freq_of(b)) {
                    let f = fa.max(fb);
                    push(name.to_string(), (f * r as f64).round() as usize, f);
                }
            }
        }
    }
    cells
}

fn average_cells(label: &str, cells: &[CellResult]) -> Vec<CellResult> {
    let mut out: Vec<CellResult> = Vec::new();
    for c in cells {
        match out.iter_mut().find(|o| o.n == c.n && o.m == c.m && o.param == c.param && o.test == c.test) {
            Some(o) => {
                o.rejections += c.rejections;
                o.replications += c.replications;
            }
            None => out.push(CellResult { dgp: label.to_string(), ..c.clone() }),
        }
    }
    for o in &mut out {
        o.frequency = o.rejections as f64 / o.replications.max(1) as f64;
        o.std_error = binomial_se(o.frequency, o.replications);
    }
    out
}

fn null_samples(group: &Group<'_>, reps: &[Replication]) -> Result<Vec<NullSample>> {
    let tests = &group.config.tests;
    let kept: Vec<&Replication> = reps.iter().filter(|r| !r.lost).collect();
    let mut out = Vec::new();
    let adjust = match group.config.fit {
        FitChoice::Model(spec) => group.config.battery.df_adjust.unwrap_or(spec.arma_order()),
        FitChoice::ArBic => group.config.battery.df_adjust.unwrap_or(0),
    };
    for (mi, &m) in group.lags.iter().enumerate() {
        for (j, &test) in tests.iter().enumerate() {
            let values: Vec<f64> = kept.iter().map(|rep| rep.stats[mi * tests.len() + j]).collect();
            let df = null_df(test, m, adjust);
            let k = values.len() as f64;
            let mean = values.iter().sum::<f64>() / k;
            let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
            let ks = ks_chi_square(&values, df)?;
            out.push(NullSample { dgp: group.label.clone(), n: group.n, m, test, df, values, mean, variance, ks });
        }
    }
    Ok(out)
}

/// Degrees of freedom used by the battery for `test` at lag `m`.
pub fn null_df(test: TestId, m: usize, adjust: usize) -> u32 {
    let m = m as i64;
    let a = adjust as i64;
    let raw = match test {
        TestId::Q11 => m - a,
        TestId::Q22 | TestId::Q12 | TestId::Q21 => m,
        TestId::WL => 2 * m - a,
        _ => 3 * m - a,
    };
    raw.max(1) as u32
}

/// Runs any experiment kind.
pub fn run_experiment<E: Executor>(config: &ExperimentConfig, executor: &E) -> Result<ExperimentReport> {
    config.validate()?;
    let groups = groups(config)?;
    let reps = config.replications;
    let outcomes: Vec<Replication> = executor.map(groups.len() * reps, |i| groups[i / reps].replicate(i % reps));

    let mut cells = Vec::new();
    let mut discards = Vec::new();
    let mut null = Vec::new();
    let mut flagged = false;
    let n_linear = config.dgps.len();
    let per_point = n_linear + config.alternatives.len();
    let mut linear_cells = Vec::new();
    let mut nonlinear_cells = Vec::new();
    for (g, group) in groups.iter().enumerate() {
        let chunk = &outcomes[g * reps..(g + 1) * reps];
        let discarded: usize = chunk.iter().map(|r| r.discarded).sum();
        let lost = chunk.iter().filter(|r| r.lost).count();
        if discarded as f64 > MAX_DISCARD_FRACTION * reps as f64 || lost > 0 {
            flagged = true;
        }
        discards.push(DiscardCount { dgp: group.label.clone(), n: group.n, param: group.param, discarded, lost });
        let group_cells = tally(group, chunk, config.alpha);
        if config.kind == ExperimentKind::Contamination {
            if g % per_point < n_linear {
                linear_cells.extend(group_cells.iter().cloned());
            } else {
                nonlinear_cells.extend(group_cells.iter().cloned());
            }
        }
        cells.extend(group_cells);
        if config.kind == ExperimentKind::NullDistribution {
            null.extend(null_samples(group, chunk)?);
        }
    }
    if config.kind == ExperimentKind::Contamination {
        cells.extend(average_cells("linear", &linear_cells));
        cells.extend(average_cells("nonlinear", &nonlinear_cells));
    }
    Ok(ExperimentReport {
        kind: config.kind,
        alpha: config.alpha,
        replications: reps,
        seed: config.seed,
        cells,
        discards,
        flagged,
        band95: null_band(config.alpha, reps, 1.959_963_984_540_054),
        band99: null_band(config.alpha, reps, 2.575_829_303_548_901),
        null_samples: null,
    })
}

fn expect_kind(config: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if config.kind != kind {
        return Err(Error::config(format!("expected a {kind} configuration, got {}", config.kind)));
    }
    Ok(())
}

/// Empirical sizes of correctly specified fits.
pub fn run_size<E: Executor>(config: &ExperimentConfig, executor: &E) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::Size)?;
    run_experiment(config, executor)
}

/// Rejection frequencies over the parameter grid, with `Cstar` and `Qstar`.
pub fn run_power<E: Executor>(config: &ExperimentConfig, executor: &E) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::Power)?;
    run_experiment(config, executor)
}

/// Frequencies per ω² for each process, plus `linear` and `nonlinear`
/// averages.
pub fn run_contamination<E: Executor>(config: &ExperimentConfig, executor: &E) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::Contamination)?;
    run_experiment(config, executor)
}

/// Raw statistic samples with moments and KS distances to their χ² law.
pub fn sample_null_distribution<E: Executor>(config: &ExperimentConfig, executor: &E) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::NullDistribution)?;
    run_experiment(config, executor)
}
