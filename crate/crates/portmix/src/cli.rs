//! Command definitions and handlers.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use portmix_core::correlation::{CorrelationSet, ScalingMode};
use portmix_core::dgp::{simulate, DgpSpec, Preset};
use portmix_core::estimation::{fit_qmle, select_order_bic, FitOptions, FittedModel};
use portmix_core::montecarlo::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport, FitChoice};
use portmix_core::numeric::{InnovationLaw, RngStream};
use portmix_core::portmanteau::{parse_tests, run_battery, BatteryOptions, TestResult, DEFAULT_EIGEN_THRESHOLD};
use serde::Serialize;

use crate::data::{DataFormat, DataSource, Transform};
use crate::error::{CliError, Result};
use crate::exec::Parallel;
use crate::output::{
    cells_csv, correlations_csv, ensure_dir, null_samples_csv, pvalue_table, report_csv, residuals_csv, series_csv,
    to_json, write_atomic,
};

/// Exit code when the diagnostics ran and at least one test rejected.
pub const EXIT_REJECTED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "portmix", version, about = "Mixed portmanteau diagnostics for time-series models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a preset or a JSON process spec and write it as CSV.
    Simulate(SimulateArgs),
    /// Fit a model to a series and run the diagnostic battery.
    Diagnose(DiagnoseArgs),
    /// Run a Monte Carlo experiment from a JSON config.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Preset name (A1-A4, B1-B4, C1-C2, D1-D4) or path to a JSON process spec.
    pub source: String,
    /// Number of observations to keep.
    #[arg(long)]
    pub n: usize,
    /// Free parameter of B1, B2, C1 or C2.
    #[arg(long)]
    pub param: Option<f64>,
    /// Innovation law: normal, t(df) or skew-normal(shape).
    #[arg(long)]
    pub innovation: Option<InnovationLaw>,
    /// Discarded leading draws (default n/2).
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, env = "PORTES_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output CSV file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// CSV file with one value per row or `date,value` rows.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = DataFormat::Auto)]
    pub format: DataFormat,
    /// Analyse differenced natural logs of the values.
    #[arg(long)]
    pub log_returns: bool,
    /// Model such as `ar(1)+garch(1,1)` or `ar-bic` for BIC order selection.
    #[arg(long, default_value = "ar-bic")]
    pub model: FitChoice,
    /// Comma-separated lags.
    #[arg(long, value_delimiter = ',', default_values_t = [5, 10, 15, 20, 25])]
    pub lags: Vec<usize>,
    /// Comma-separated test names or `all`.
    #[arg(long, default_value = "C12,C21,Q12,Q21,Q22")]
    pub tests: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Use the Gaussian value σ² = 2 instead of the sample fourth moment.
    #[arg(long)]
    pub gaussian_scaling: bool,
    /// Eigenvalue threshold for the covariance blocks of the C statistics.
    #[arg(long, default_value_t = DEFAULT_EIGEN_THRESHOLD)]
    pub eigen_threshold: f64,
    /// Directory for diagnose.json, residuals.csv and correlations.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment config.
    #[arg(long)]
    pub config: PathBuf,
    /// Worker threads (0 uses every core).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Overrides the config's master seed.
    #[arg(long, env = "PORTES_SEED")]
    pub seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Simulate(a) => simulate_cmd(&a),
        Command::Diagnose(a) => diagnose_cmd(&a),
        Command::Experiment(a) => experiment_cmd(&a),
    }
}

/// Resolves a preset name or reads a JSON spec file.
pub fn resolve_process(source: &str, param: Option<f64>) -> Result<DgpSpec> {
    if let Ok(preset) = source.parse::<Preset>() {
        if param.is_some() && preset.default_param().is_none() {
            return Err(CliError::Usage(format!("preset {preset} has no free parameter")));
        }
        return Ok(preset.spec(param));
    }
    let path = Path::new(source);
    if !path.is_file() {
        return Err(CliError::Usage(format!("'{source}' is neither a preset ({}) nor a spec file", Preset::list())));
    }
    if param.is_some() {
        return Err(CliError::Usage("--param applies to presets only".into()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.to_string()))
}

fn simulate_cmd(a: &SimulateArgs) -> Result<u8> {
    let mut spec = resolve_process(&a.source, a.param)?;
    if let Some(law) = a.innovation {
        spec = spec.with_innovation(law);
    }
    spec.validate()?;
    if a.n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let burn = a.burn_in.unwrap_or(a.n / 2);
    let series = simulate(&spec, a.n, burn, &mut RngStream::new(a.seed, 0))?;
    write_atomic(&a.out, &series_csv(&series))?;
    print!("{}", to_json(&spec));
    Ok(0)
}

#[derive(Debug, Serialize)]
struct Parameter {
    name: String,
    value: f64,
}

#[derive(Debug, Serialize)]
struct Diagnosis<'a> {
    data: &'a Path,
    n: usize,
    model: String,
    bic_order: Option<usize>,
    parameters: Vec<Parameter>,
    loglik: f64,
    converged: bool,
    alpha: f64,
    options: BatteryOptions,
    results: &'a [TestResult],
}

fn fit_failure(f: &FittedModel) -> CliError {
    CliError::Fit(format!(
        "{} did not converge after {} iterations (score norm {:.3e}, at boundary: {}, theta = {:?})",
        f.spec,
        f.iterations,
        f.gradient_norm(),
        f.at_boundary,
        f.theta
    ))
}

fn diagnose_cmd(a: &DiagnoseArgs) -> Result<u8> {
    if !(a.alpha > 0.0 && a.alpha <= 1.0) {
        return Err(CliError::Usage("--alpha must lie in (0, 1]".into()));
    }
    if a.lags.is_empty() || a.lags.contains(&0) {
        return Err(CliError::Usage("--lags must be positive".into()));
    }
    let tests = parse_tests(&a.tests)?;
    let options = BatteryOptions {
        scaling: if a.gaussian_scaling { ScalingMode::Gaussian } else { ScalingMode::Estimated },
        df_adjust: None,
        eigen_threshold: a.eigen_threshold,
    };
    let source = DataSource {
        path: a.data.clone(),
        format: a.format,
        transform: if a.log_returns { Transform::LogReturns } else { Transform::None },
    };
    let series = source.read()?;
    let max_lag = *a.lags.iter().max().expect("nonempty");
    let order = match a.model {
        FitChoice::Model(spec) => spec.n_params(),
        FitChoice::ArBic => 1,
    };
    if series.len() <= max_lag + order {
        return Err(CliError::Usage(format!(
            "{} observations are too few for lag {max_lag} with {order} model parameters",
            series.len()
        )));
    }
    let (fitted, bic_order) = match a.model {
        FitChoice::Model(spec) => {
            let f = fit_qmle(&spec, &series, &FitOptions::default()).map_err(|e| CliError::Fit(e.to_string()))?;
            if !f.converged {
                return Err(fit_failure(&f));
            }
            (f, None)
        }
        FitChoice::ArBic => {
            let s = select_order_bic(&series).map_err(|e| CliError::Fit(e.to_string()))?;
            (s.fitted, Some(s.order))
        }
    };
    let results = run_battery(&fitted, &a.lags, &tests, &options)?;

    println!("model: {}  n = {}  loglik = {:.4}", fitted.spec, fitted.n(), fitted.loglik);
    let names = fitted.spec.param_names();
    let params: Vec<String> = names.iter().zip(&fitted.theta).map(|(n, v)| format!("{n} = {v:.4}")).collect();
    println!("parameters: {}", params.join(", "));
    println!();
    print!("{}", pvalue_table(&results, &tests));

    if let Some(dir) = &a.out {
        ensure_dir(dir)?;
        let diagnosis = Diagnosis {
            data: &a.data,
            n: fitted.n(),
            model: fitted.spec.to_string(),
            bic_order,
            parameters: names.into_iter().zip(&fitted.theta).map(|(name, &value)| Parameter { name, value }).collect(),
            loglik: fitted.loglik,
            converged: fitted.converged,
            alpha: a.alpha,
            options,
            results: &results,
        };
        let rset = CorrelationSet::compute(&fitted.xi, max_lag, options.scaling)?;
        write_atomic(&dir.join("residuals.csv"), &residuals_csv(&fitted))?;
        write_atomic(&dir.join("correlations.csv"), &correlations_csv(&rset))?;
        write_atomic(&dir.join("diagnose.json"), to_json(&diagnosis).as_bytes())?;
    }
    let rejected = results.iter().any(|r| r.rejects(a.alpha));
    Ok(if rejected { EXIT_REJECTED } else { 0 })
}

/// Reads and validates an experiment config.
pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let config: ExperimentConfig = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.to_string()))?;
    config.validate().map_err(|e| CliError::parse(path, e.to_string()))?;
    Ok(config)
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    config: &'a ExperimentConfig,
    report: &'a ExperimentReport,
}

/// Every output file of an experiment, keyed by file name.
pub fn experiment_files(config: &ExperimentConfig, report: &ExperimentReport) -> Vec<(&'static str, Vec<u8>)> {
    let mut light = report.clone();
    for s in &mut light.null_samples {
        s.values.clear();
    }
    let mut files = vec![
        ("config.json", to_json(config).into_bytes()),
        ("report.csv", report_csv(report)),
        ("cells.csv", cells_csv(report)),
        ("summary.json", to_json(&Summary { config, report: &light }).into_bytes()),
    ];
    if config.kind == ExperimentKind::NullDistribution {
        files.push(("null_samples.csv", null_samples_csv(report)));
    }
    files
}

fn experiment_cmd(a: &ExperimentArgs) -> Result<u8> {
    let mut config = read_config(&a.config)?;
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    let exec = Parallel::new(a.workers).map_err(|e| CliError::Usage(e.to_string()))?;
    ensure_dir(&a.out)?;
    let started = Instant::now();
    eprintln!(
        "running {} experiment: {} replications per cell on {} worker(s)",
        config.kind,
        config.replications,
        exec.workers()
    );
    let report = run_experiment(&config, &exec)?;
    for (name, bytes) in experiment_files(&config, &report) {
        write_atomic(&a.out.join(name), &bytes)?;
    }
    eprintln!("finished in {:.1}s; outputs in {}", started.elapsed().as_secs_f64(), a.out.display());
    if report.flagged {
        let worst = report.discards.iter().map(|d| d.discarded).max().unwrap_or(0);
        return Err(CliError::Discards(format!(
            "discarded replications exceeded 5% in at least one cell (worst: {worst} of {})",
            config.replications
        )));
    }
    Ok(0)
}

/// Parses arguments and runs, mapping every failure to an exit code.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
