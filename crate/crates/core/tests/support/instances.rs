//! Random model, parameter and series triples for statistic checks.

use portmix_core::dgp::{simulate, Preset};
use portmix_core::estimation::ModelSpec;
use portmix_core::numeric::RngStream;
use portmix_core::TimeSeries;

/// A model, parameters inside its admissible region and a series simulated
/// from a nearby process.
pub fn instance(kind: usize, u: [f64; 4], n: usize, seed: u64) -> (ModelSpec, Vec<f64>, TimeSeries) {
    let (spec, theta, preset) = match kind {
        0 => (ModelSpec::arma(1, 0).with_intercept(), vec![u[0] - 0.5, 1.6 * u[1] - 0.8, 0.5 + 1.5 * u[2]], Preset::A1),
        1 => (ModelSpec::arma(1, 1), vec![1.6 * u[0] - 0.8, 1.4 * u[1] - 0.7, 0.5 + 1.5 * u[2]], Preset::A1),
        2 => (ModelSpec::arma(1, 0).with_garch(1, 0), vec![1.6 * u[0] - 0.8, 0.05 + 0.5 * u[1], 0.05 + 0.8 * u[2]], Preset::A3),
        3 => {
            let a = 0.05 + 0.4 * u[1];
            (ModelSpec::garch(1, 1), vec![0.05 + 0.5 * u[0], a, (0.9 - a) * u[2]], Preset::A2)
        }
        _ => {
            let a = 0.05 + 0.4 * u[2];
            (ModelSpec::arma(1, 0).with_garch(1, 1), vec![1.6 * u[0] - 0.8, 0.05 + 0.5 * u[1], a, (0.9 - a) * u[3]], Preset::A4)
        }
    };
    let series = simulate(&preset.spec(None), n, n / 2, &mut RngStream::new(seed, 0)).unwrap();
    (spec, theta, series)
}
