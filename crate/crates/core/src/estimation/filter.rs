//! Forward recursions for residuals, conditional variances, the Gaussian
//! quasi-log-likelihood and the parameter gradients of `μ_t` and `h_t`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::ModelSpec;
use crate::arma_poly;
use crate::error::{Error, Result};
use crate::numeric::Matrix;
use crate::series::{self, TimeSeries};

/// Output of [`filter`].
#[derive(Debug, Clone, PartialEq)]
pub struct Filtered {
    pub eps: Vec<f64>,
    pub h: Vec<f64>,
    pub xi: Vec<f64>,
    /// Per-observation terms `-½ log h_t - ε²_t / (2 h_t)`.
    pub loglik_terms: Vec<f64>,
    pub loglik: f64,
}

/// Checks the positivity and stationarity constraints of `theta`.
pub fn check_theta(spec: &ModelSpec, theta: &[f64]) -> Result<()> {
    spec.validate()?;
    if theta.len() != spec.n_params() {
        return Err(Error::domain(format!(
            "{spec} needs {} parameters, got {}",
            spec.n_params(),
            theta.len()
        )));
    }
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("parameters must be finite"));
    }
    if !arma_poly::is_stationary(&theta[spec.ar_range()]) {
        return Err(Error::domain("AR part is not stationary"));
    }
    if !arma_poly::is_invertible(&theta[spec.ma_range()]) {
        return Err(Error::domain("MA part is not invertible"));
    }
    let scale = theta[spec.scale_index()];
    if !(scale > 0.0) {
        return Err(Error::domain("ω (or σ²) must be positive"));
    }
    if spec.has_variance_model() {
        let coefs = &theta[spec.alpha_range().start..spec.beta_range().end];
        if coefs.iter().any(|c| *c < 0.0) {
            return Err(Error::domain("α and β must be nonnegative"));
        }
        if coefs.iter().sum::<f64>() >= 1.0 {
            return Err(Error::domain("Σα + Σβ must be below 1"));
        }
    }
    Ok(())
}

/// Runs the mean and variance recursions at `theta`.
pub fn filter(spec: &ModelSpec, theta: &[f64], series: &TimeSeries) -> Result<Filtered> {
    let pass = run(spec, theta, series.values(), false)?;
    Ok(pass.into_filtered())
}

/// Per-observation gradients `∂μ_t/∂θ` and `∂h_t/∂θ`, each `n × ℓ`.
pub fn model_derivatives(spec: &ModelSpec, theta: &[f64], series: &TimeSeries) -> Result<(Matrix, Matrix)> {
    let pass = run(spec, theta, series.values(), true)?;
    let (dmu, dh) = pass.derivatives.expect("derivatives requested");
    Ok((dmu, dh))
}

pub(crate) struct Pass {
    pub eps: Vec<f64>,
    pub h: Vec<f64>,
    pub terms: Vec<f64>,
    pub loglik: f64,
    pub derivatives: Option<(Matrix, Matrix)>,
}

impl Pass {
    pub(crate) fn into_filtered(self) -> Filtered {
        let xi = self.eps.iter().zip(&self.h).map(|(e, h)| e / h.sqrt()).collect();
        Filtered { eps: self.eps, h: self.h, xi, loglik_terms: self.terms, loglik: self.loglik }
    }

    /// Score `∂ℓ/∂θ = Σ ½ h⁻¹ ∂h (ε²/h - 1) + ε h⁻¹ ∂μ`.
    pub(crate) fn score(&self) -> Vec<f64> {
        let (dmu, dh) = self.derivatives.as_ref().expect("score needs derivatives");
        let l = dmu.cols();
        let mut g = vec![0.0; l];
        for t in 0..self.eps.len() {
            let (e, h) = (self.eps[t], self.h[t]);
            let wv = 0.5 / h * (e * e / h - 1.0);
            let wm = e / h;
            let (rm, rh) = (dmu.row(t), dh.row(t));
            for k in 0..l {
                g[k] += wv * rh[k] + wm * rm[k];
            }
        }
        g
    }
}

pub(crate) fn run(spec: &ModelSpec, theta: &[f64], z: &[f64], derivs: bool) -> Result<Pass> {
    check_theta(spec, theta)?;
    let n = z.len();
    let l = spec.n_params();
    let ar = &theta[spec.ar_range()];
    let ma = &theta[spec.ma_range()];
    let c = if spec.intercept { theta[0] } else { 0.0 };
    let si = spec.scale_index();
    let scale = theta[si];
    let alpha = &theta[spec.alpha_range()];
    let beta = &theta[spec.beta_range()];
    let (ar0, ma0, a0, b0) = (spec.ar_range().start, spec.ma_range().start, spec.alpha_range().start, spec.beta_range().start);
    let n_mean = spec.n_mean();

    let persistence: f64 = alpha.iter().chain(beta).sum();
    let h0 = if spec.has_variance_model() { scale / (1.0 - persistence) } else { scale };
    // ∂h0/∂θ for the presample variance ω / (1 - Σα - Σβ).
    let mut dh0 = vec![0.0; l];
    if spec.has_variance_model() {
        let slack = 1.0 - persistence;
        dh0[si] = 1.0 / slack;
        for k in a0..spec.beta_range().end {
            dh0[k] = scale / (slack * slack);
        }
    } else {
        dh0[si] = 1.0;
    }

    let mut eps = vec![0.0; n];
    let mut h = vec![0.0; n];
    let mut terms = vec![0.0; n];
    let mut dmu = if derivs { Matrix::zeros(n, l) } else { Matrix::zeros(0, 0) };
    let mut dh = if derivs { Matrix::zeros(n, l) } else { Matrix::zeros(0, 0) };
    let mut row = vec![0.0; l];
    let mut loglik = 0.0;

    for t in 0..n {
        let mut mu = c;
        for (i, p) in ar.iter().enumerate() {
            if t > i {
                mu += p * z[t - i - 1];
            }
        }
        for (j, q) in ma.iter().enumerate() {
            if t > j {
                mu += q * eps[t - j - 1];
            }
        }
        if derivs && n_mean > 0 {
            row.iter_mut().for_each(|v| *v = 0.0);
            if spec.intercept {
                row[0] = 1.0;
            }
            for i in 0..ar.len() {
                if t > i {
                    row[ar0 + i] = z[t - i - 1];
                }
            }
            for j in 0..ma.len() {
                if t > j {
                    row[ma0 + j] = eps[t - j - 1];
                }
            }
            for (j, q) in ma.iter().enumerate() {
                if t > j {
                    let prev = dmu.row(t - j - 1);
                    for k in 0..n_mean {
                        row[k] -= q * prev[k];
                    }
                }
            }
            dmu.row_mut(t).copy_from_slice(&row);
        }
        let e = z[t] - mu;
        eps[t] = e;

        let ht = if spec.has_variance_model() {
            let mut v = scale;
            for (i, a) in alpha.iter().enumerate() {
                if t > i {
                    let el = eps[t - i - 1];
                    v += a * el * el;
                }
            }
            for (j, b) in beta.iter().enumerate() {
                v += b * if t > j { h[t - j - 1] } else { h0 };
            }
            v
        } else {
            scale
        };
        if derivs {
            row.iter_mut().for_each(|v| *v = 0.0);
            if spec.has_variance_model() {
                row[si] = 1.0;
                for (i, a) in alpha.iter().enumerate() {
                    if t > i {
                        let el = eps[t - i - 1];
                        row[a0 + i] += el * el;
                        let prev = dmu.row(t - i - 1);
                        for k in 0..n_mean {
                            row[k] -= 2.0 * a * el * prev[k];
                        }
                    }
                }
                for (j, b) in beta.iter().enumerate() {
                    if t > j {
                        row[b0 + j] += h[t - j - 1];
                        let prev = dh.row(t - j - 1);
                        for k in 0..l {
                            row[k] += b * prev[k];
                        }
                    } else {
                        row[b0 + j] += h0;
                        for k in 0..l {
                            row[k] += b * dh0[k];
                        }
                    }
                }
            } else {
                row[si] = 1.0;
            }
            dh.row_mut(t).copy_from_slice(&row);
        }
        if !(ht > 0.0) || !ht.is_finite() || !e.is_finite() {
            return Err(Error::Filtering { index: t, reason: format!("conditional variance {ht} is not positive and finite") });
        }
        h[t] = ht;
        let term = -0.5 * ht.ln() - e * e / (2.0 * ht);
        terms[t] = term;
        loglik += term;
    }
    Ok(Pass { eps, h, terms, loglik, derivatives: derivs.then_some((dmu, dh)) })
}

/// Sample variance helper reused by the starting-value heuristics.
pub(crate) fn second_moment(x: &[f64]) -> f64 {
    series::variance(x)
}
