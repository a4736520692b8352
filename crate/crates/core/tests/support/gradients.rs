//! Analytic derivative paths against central finite differences.

use portmix_core::estimation::{filter, model_derivatives, ModelSpec};
use portmix_core::TimeSeries;

/// Largest per-column error of analytic gradients against central
/// differences, relative to the column's magnitude.
pub fn worst_relative_error(spec: &ModelSpec, theta: &[f64], series: &TimeSeries) -> f64 {
    let (dmu, dh) = model_derivatives(spec, theta, series).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..theta.len() {
        let step = 1e-5 * (1.0 + theta[k].abs());
        let mut up = theta.to_vec();
        up[k] += step;
        let mut down = theta.to_vec();
        down[k] -= step;
        let fu = filter(spec, &up, series).unwrap();
        let fd = filter(spec, &down, series).unwrap();
        let z = series.values();
        let mut col = |analytic: &dyn Fn(usize) -> f64, numeric: &dyn Fn(usize) -> f64| {
            let scale = (0..z.len()).map(|t| numeric(t).abs()).fold(1e-8, f64::max);
            let err = (0..z.len()).map(|t| (analytic(t) - numeric(t)).abs()).fold(0.0, f64::max);
            worst = worst.max(err / scale);
        };
        // μ_t = z_t - ε_t
        col(&|t| dmu[(t, k)], &|t| -(fu.eps[t] - fd.eps[t]) / (2.0 * step));
        col(&|t| dh[(t, k)], &|t| (fu.h[t] - fd.h[t]) / (2.0 * step));
    }
    worst
}
