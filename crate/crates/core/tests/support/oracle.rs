//! Brute-force reference implementation of the portmanteau statistics.
//!
//! Everything is recomputed from the fitted innovations, variances and
//! derivative paths with explicit double loops, and `Ω̂` is inverted as a
//! dense matrix. Only the library's filter output is shared.

use nalgebra::{DMatrix, DVector};
use portmix_core::estimation::FittedModel;

pub struct OracleStats {
    pub q11: f64,
    pub q22: f64,
    pub q12: f64,
    pub q21: f64,
    pub cdot12: f64,
    pub cdot21: f64,
    pub c12: f64,
    pub c21: f64,
    /// Smallest eigenvalue of the dense `3m × 3m` matrix for the (1,2) and
    /// (2,1) pairs.
    pub min_eigen: f64,
    /// Spectral condition number of `Σ̂`.
    pub sigma_condition: f64,
}

/// `(r11, r22, r12, r21)` from the textbook sums.
pub fn correlations(xi: &[f64], m: usize) -> [Vec<f64>; 4] {
    let n = xi.len();
    let nf = n as f64;
    let mut mean_sq = 0.0;
    for v in xi {
        mean_sq += v * v;
    }
    mean_sq /= nf;
    let mut s2 = 0.0;
    for v in xi {
        s2 += (v * v - mean_sq) * (v * v - mean_sq);
    }
    s2 /= nf;
    let s = s2.sqrt();
    let mut out = [vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]];
    for k in 1..=m {
        let (mut a, mut b, mut c, mut d) = (0.0, 0.0, 0.0, 0.0);
        for t in k..n {
            let (x, y) = (xi[t], xi[t - k]);
            a += x * y;
            b += (x * x - 1.0) * (y * y - 1.0);
            c += x * (y * y - 1.0);
            d += (x * x - 1.0) * y;
        }
        out[0][k - 1] = a / nf;
        out[1][k - 1] = b / (nf * s2);
        out[2][k - 1] = c / (nf * s);
        out[3][k - 1] = d / (nf * s);
    }
    out
}

pub fn sigma2(xi: &[f64]) -> f64 {
    let n = xi.len() as f64;
    let m2 = xi.iter().map(|v| v * v).sum::<f64>() / n;
    xi.iter().map(|v| (v * v - m2).powi(2)).sum::<f64>() / n
}

fn q(n: usize, r: &[f64]) -> f64 {
    let nf = n as f64;
    let mut s = 0.0;
    for (i, v) in r.iter().enumerate() {
        s += v * v / (nf - (i + 1) as f64);
    }
    nf * (nf + 2.0) * s
}

/// Dense `Σ̂ = n⁻¹ Σ (½ h⁻² ∂h ∂h' + h⁻¹ ∂μ ∂μ')`.
fn information(f: &FittedModel) -> DMatrix<f64> {
    let n = f.h.len();
    let l = f.theta.len();
    let mut s = DMatrix::zeros(l, l);
    for t in 0..n {
        for i in 0..l {
            for j in 0..l {
                s[(i, j)] += 0.5 * f.dh[(t, i)] * f.dh[(t, j)] / (f.h[t] * f.h[t]) + f.dmu[(t, i)] * f.dmu[(t, j)] / f.h[t];
            }
        }
    }
    s / n as f64
}

/// Rows `k = 1..m` of the four `X` blocks.
fn x_blocks(f: &FittedModel, xi: &[f64], m: usize) -> [DMatrix<f64>; 4] {
    let n = xi.len();
    let l = f.theta.len();
    let variance = f.spec.has_variance_model();
    let mut x = [DMatrix::zeros(m, l), DMatrix::zeros(m, l), DMatrix::zeros(m, l), DMatrix::zeros(m, l)];
    for k in 1..=m {
        for t in k..n {
            for j in 0..l {
                x[0][(k - 1, j)] += f.dmu[(t, j)] * xi[t - k] / f.h[t].sqrt();
                if variance {
                    x[1][(k - 1, j)] += f.dh[(t, j)] * (xi[t - k] * xi[t - k] - 1.0) / f.h[t];
                    x[2][(k - 1, j)] += f.dmu[(t, j)] * (xi[t - k] * xi[t - k] - 1.0) / f.h[t].sqrt();
                    x[3][(k - 1, j)] += f.dmu[(t - k, j)] * (xi[t] * xi[t] - 1.0) / f.h[t - k].sqrt();
                }
            }
        }
    }
    for b in &mut x {
        *b /= n as f64;
    }
    x
}

fn omega(x11: &DMatrix<f64>, x22: &DMatrix<f64>, xrs: &DMatrix<f64>, sigma_inv: &DMatrix<f64>, s2: f64) -> DMatrix<f64> {
    let m = x11.nrows();
    let mut o = DMatrix::zeros(3 * m, 3 * m);
    let blocks = [(x11, 1.0), (x22, 0.5 / s2), (xrs, 1.0 / s2)];
    for (b, (x, c)) in blocks.iter().enumerate() {
        let inner = *x * sigma_inv * x.transpose();
        for i in 0..m {
            for j in 0..m {
                let id = if i == j { 1.0 } else { 0.0 };
                o[(b * m + i, b * m + j)] = id - c * inner[(i, j)];
            }
        }
    }
    o
}

fn quadratic(n: usize, o: &DMatrix<f64>, r: &[f64]) -> f64 {
    let inv = o.clone().try_inverse().expect("oracle Ω is invertible");
    let v = DVector::from_column_slice(r);
    n as f64 * (v.transpose() * inv * &v)[(0, 0)]
}

/// Every statistic for one fitted model at lag `m`, using estimated `σ̂²`.
pub fn statistics(f: &FittedModel, m: usize) -> OracleStats {
    let n = f.h.len();
    let xi: Vec<f64> = f.eps.iter().zip(&f.h).map(|(e, h)| e / h.sqrt()).collect();
    let r = correlations(&xi, m);
    let s2 = sigma2(&xi);
    let sigma = information(f);
    let spectrum = sigma.clone().symmetric_eigen().eigenvalues;
    let sigma_condition = spectrum.max() / spectrum.min();
    let sigma_inv = sigma.try_inverse().expect("information is invertible");
    let x = x_blocks(f, &xi, m);
    let o12 = omega(&x[0], &x[1], &x[2], &sigma_inv, s2);
    let o21 = omega(&x[0], &x[1], &x[3], &sigma_inv, s2);
    let stack = |third: &[f64], standardize: bool| -> Vec<f64> {
        let mut v: Vec<f64> = r[0].iter().chain(&r[1]).chain(third).copied().collect();
        if standardize {
            for (i, e) in v.iter_mut().enumerate() {
                let k = (i % m + 1) as f64;
                *e *= ((n as f64 + 2.0) / (n as f64 - k)).sqrt();
            }
        }
        v
    };
    let min_eigen = o12
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .chain(o21.clone().symmetric_eigen().eigenvalues.iter())
        .fold(f64::INFINITY, |a, b| a.min(*b));
    OracleStats {
        q11: q(n, &r[0]),
        q22: q(n, &r[1]),
        q12: q(n, &r[2]),
        q21: q(n, &r[3]),
        cdot12: quadratic(n, &o12, &stack(&r[2], false)),
        cdot21: quadratic(n, &o21, &stack(&r[3], false)),
        c12: quadratic(n, &o12, &stack(&r[2], true)),
        c21: quadratic(n, &o21, &stack(&r[3], true)),
        min_eigen,
        sigma_condition,
    }
}
