//! Bijection between the admissible parameter set and ℝ^ℓ.
//!
//! ARMA blocks go through partial autocorrelations (`tanh`), the scale
//! parameter through `exp`, and GARCH coefficients through a softmax with an
//! implicit slack share so that `α, β > 0` and `Σα + Σβ < 1`.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::ModelSpec;
use crate::arma_poly;
use crate::numeric::Matrix;

const PACF_LIMIT: f64 = 0.999_999;
const SHARE_FLOOR: f64 = 1e-12;

pub(crate) fn to_theta(spec: &ModelSpec, u: &[f64]) -> Vec<f64> {
    let mut theta = u.to_vec();
    let ar = spec.ar_range();
    let pacf: Vec<f64> = u[ar.clone()].iter().map(|v| v.tanh()).collect();
    theta[ar].copy_from_slice(&arma_poly::pacf_to_ar(&pacf));
    let ma = spec.ma_range();
    let pacf: Vec<f64> = u[ma.clone()].iter().map(|v| v.tanh()).collect();
    let phi = arma_poly::pacf_to_ar(&pacf);
    for (dst, p) in theta[ma].iter_mut().zip(phi) {
        *dst = -p;
    }
    let si = spec.scale_index();
    theta[si] = u[si].exp();
    if spec.has_variance_model() {
        let coefs = spec.alpha_range().start..spec.beta_range().end;
        let top = u[coefs.clone()].iter().fold(0.0f64, |m, v| m.max(*v));
        let weights: Vec<f64> = u[coefs.clone()].iter().map(|v| (v - top).exp()).collect();
        let denom = (-top).exp() + weights.iter().sum::<f64>();
        for (dst, w) in theta[coefs].iter_mut().zip(weights) {
            *dst = w / denom;
        }
    }
    theta
}

/// Inverse of [`to_theta`]; inputs on or beyond the boundary are pulled
/// slightly inside.
pub(crate) fn to_unconstrained(spec: &ModelSpec, theta: &[f64]) -> Option<Vec<f64>> {
    let mut u = theta.to_vec();
    let ar = spec.ar_range();
    let pacf = arma_poly::ar_to_pacf(&theta[ar.clone()])?;
    for (dst, r) in u[ar].iter_mut().zip(pacf) {
        *dst = r.clamp(-PACF_LIMIT, PACF_LIMIT).atanh();
    }
    let ma = spec.ma_range();
    let neg: Vec<f64> = theta[ma.clone()].iter().map(|t| -t).collect();
    let pacf = arma_poly::ar_to_pacf(&neg)?;
    for (dst, r) in u[ma].iter_mut().zip(pacf) {
        *dst = r.clamp(-PACF_LIMIT, PACF_LIMIT).atanh();
    }
    let si = spec.scale_index();
    if !(theta[si] > 0.0) {
        return None;
    }
    u[si] = theta[si].ln();
    if spec.has_variance_model() {
        let coefs = spec.alpha_range().start..spec.beta_range().end;
        let shares: Vec<f64> = theta[coefs.clone()].iter().map(|c| c.max(SHARE_FLOOR)).collect();
        let slack = (1.0 - shares.iter().sum::<f64>()).max(SHARE_FLOOR);
        for (dst, s) in u[coefs].iter_mut().zip(shares) {
            *dst = (s / slack).ln();
        }
    }
    Some(u)
}

/// `∂θ/∂u` by central differences (ℓ × ℓ, row = θ index).
pub(crate) fn jacobian(spec: &ModelSpec, u: &[f64]) -> Matrix {
    let l = u.len();
    let mut jac = Matrix::zeros(l, l);
    let mut up = u.to_vec();
    for k in 0..l {
        let step = 1e-6 * (1.0 + u[k].abs());
        up[k] = u[k] + step;
        let plus = to_theta(spec, &up);
        up[k] = u[k] - step;
        let minus = to_theta(spec, &up);
        up[k] = u[k];
        for i in 0..l {
            jac[(i, k)] = (plus[i] - minus[i]) / (2.0 * step);
        }
    }
    jac
}

/// Coordinates of `u` that sit numerically on the boundary of the admissible
/// set, where a nonzero θ-gradient is expected at a constrained optimum.
pub(crate) fn boundary_mask(spec: &ModelSpec, u: &[f64], theta: &[f64]) -> Vec<bool> {
    let mut mask = alloc::vec![false; u.len()];
    for k in spec.ar_range().chain(spec.ma_range()) {
        mask[k] = u[k].abs() > 9.0;
    }
    if spec.has_variance_model() {
        let coefs = spec.alpha_range().start..spec.beta_range().end;
        let slack = 1.0 - theta[coefs.clone()].iter().sum::<f64>();
        for k in coefs {
            mask[k] = theta[k] < 1e-6 || slack < 1e-6;
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::filter::check_theta;

    #[test]
    fn roundtrip_interior_points() {
        let spec = ModelSpec::arma(2, 1).with_intercept().with_garch(2, 1);
        let theta = [0.3, 0.5, -0.2, 0.4, 0.05, 0.1, 0.15, 0.6];
        let u = to_unconstrained(&spec, &theta).unwrap();
        let back = to_theta(&spec, &u);
        for (a, b) in theta.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn images_are_admissible() {
        let spec = ModelSpec::arma(2, 2).with_garch(1, 1);
        for s in [-30.0, -3.0, 0.0, 2.5, 30.0] {
            let u = [s, -s, 0.5 * s, s, s, -s, 0.3 * s];
            let theta = to_theta(&spec, &u);
            if s.abs() < 10.0 {
                check_theta(&spec, &theta).unwrap();
            }
            assert!(theta.iter().all(|v| v.is_finite()));
        }
    }
}
