//! Auto- and cross-correlations of standardized residuals and their squares.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};

/// Power pair `(r, s)`: residuals raised to `r` at time `t` against residuals
/// raised to `s` at `t - k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Pair {
    P11,
    P22,
    P12,
    P21,
}

impl Pair {
    pub const ALL: [Pair; 4] = [Pair::P11, Pair::P22, Pair::P12, Pair::P21];

    pub fn powers(self) -> (u8, u8) {
        match self {
            Pair::P11 => (1, 1),
            Pair::P22 => (2, 2),
            Pair::P12 => (1, 2),
            Pair::P21 => (2, 1),
        }
    }

    pub fn from_powers(r: u8, s: u8) -> Result<Pair> {
        match (r, s) {
            (1, 1) => Ok(Pair::P11),
            (2, 2) => Ok(Pair::P22),
            (1, 2) => Ok(Pair::P12),
            (2, 1) => Ok(Pair::P21),
            _ => Err(Error::domain(alloc::format!("unsupported power pair ({r}, {s})"))),
        }
    }
}

/// How `σ² = E(ξ⁴) - 1` enters the normalizations: estimated from the
/// residuals, or fixed at its Gaussian value 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ScalingMode {
    #[default]
    Estimated,
    Gaussian,
}

impl ScalingMode {
    /// The σ² used by statistics: `sigma2_hat` or 2.
    pub fn sigma2(self, sigma2_hat: f64) -> f64 {
        match self {
            ScalingMode::Estimated => sigma2_hat,
            ScalingMode::Gaussian => 2.0,
        }
    }
}

/// `n⁻¹ Σ (ξ²_t - mean(ξ²))²`.
pub fn sigma2_hat(xi: &[f64]) -> Result<f64> {
    if xi.is_empty() {
        return Err(Error::domain("empty residual vector"));
    }
    let n = xi.len() as f64;
    let m2 = xi.iter().map(|x| x * x).sum::<f64>() / n;
    let s2 = xi.iter().map(|x| (x * x - m2).powi(2)).sum::<f64>() / n;
    if !(s2 > 1e-14 * m2.max(1.0).powi(2)) {
        return Err(Error::domain("squared residuals are constant"));
    }
    Ok(s2)
}

fn lagged_sum(a: &[f64], b: &[f64], k: usize) -> f64 {
    (k..a.len()).map(|t| a[t] * b[t - k]).sum()
}

fn check_lags(n: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::domain("the maximum lag must be at least 1"));
    }
    if m >= n {
        return Err(Error::domain(alloc::format!("maximum lag {m} must be below the sample size {n}")));
    }
    Ok(())
}

fn cross_with(xi: &[f64], pair: Pair, m: usize, sigma2: f64) -> Vec<f64> {
    let n = xi.len() as f64;
    let centered_sq: Vec<f64> = xi.iter().map(|x| x * x - 1.0).collect();
    let (a, b, denom) = match pair {
        Pair::P11 => (xi, xi, n),
        Pair::P22 => (&centered_sq[..], &centered_sq[..], n * sigma2),
        Pair::P12 => (xi, &centered_sq[..], n * sigma2.sqrt()),
        Pair::P21 => (&centered_sq[..], xi, n * sigma2.sqrt()),
    };
    (1..=m).map(|k| lagged_sum(a, b, k) / denom).collect()
}

/// `r̂_rs(k)` for `k = 1..=m`:
///
/// * `r̂₁₁(k) = n⁻¹ Σ ξ_t ξ_{t-k}`
/// * `r̂₂₂(k) = (n σ²)⁻¹ Σ (ξ²_t - 1)(ξ²_{t-k} - 1)`
/// * `r̂₁₂(k) = (n σ)⁻¹ Σ ξ_t (ξ²_{t-k} - 1)`
/// * `r̂₂₁(k) = (n σ)⁻¹ Σ (ξ²_t - 1) ξ_{t-k}`
///
/// with sums over `t = k+1..n` and `σ²` chosen by `mode`.
pub fn cross_correlation(xi: &[f64], pair: Pair, m: usize, mode: ScalingMode) -> Result<Vec<f64>> {
    check_lags(xi.len(), m)?;
    let sigma2 = match pair {
        Pair::P11 => 1.0,
        _ => mode.sigma2(sigma2_hat(xi)?),
    };
    Ok(cross_with(xi, pair, m, sigma2))
}

/// Mean-subtracted sample correlation between `x^r` at `t` and `x^s` at
/// `t - k`, normalized by the lag-0 autocovariances. Negative lags use
/// `γ_rs(-k) = γ_sr(k)`.
pub fn general_correlation(x: &[f64], pair: Pair, k: i64) -> Result<f64> {
    let n = x.len();
    if k.unsigned_abs() as usize >= n {
        return Err(Error::domain("lag must be below the sample size"));
    }
    let (r, s) = pair.powers();
    let pow = |p: u8| -> Vec<f64> {
        let v: Vec<f64> = x.iter().map(|v| if p == 1 { *v } else { v * v }).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        v.into_iter().map(|e| e - mean).collect()
    };
    let (xr, xs) = (pow(r), pow(s));
    let gamma = |a: &[f64], b: &[f64], k: usize| lagged_sum(a, b, k) / n as f64;
    let (grr, gss) = (gamma(&xr, &xr, 0), gamma(&xs, &xs, 0));
    if !(grr > 0.0 && gss > 0.0) {
        return Err(Error::domain("input powers are constant"));
    }
    let num = if k >= 0 { gamma(&xr, &xs, k as usize) } else { gamma(&xs, &xr, k.unsigned_abs() as usize) };
    Ok(num / (grr.sqrt() * gss.sqrt()))
}

/// `√((n+2)/(n-k))`, the per-lag standardization factor.
pub fn standardization_factor(n: usize, k: usize) -> f64 {
    ((n as f64 + 2.0) / (n as f64 - k as f64)).sqrt()
}

/// The four correlation vectors at lags `1..=m` for one residual series.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrelationSet {
    pub n: usize,
    pub m: usize,
    pub r11: Vec<f64>,
    pub r22: Vec<f64>,
    pub r12: Vec<f64>,
    pub r21: Vec<f64>,
    /// `n⁻¹ Σ (ξ²_t - mean(ξ²))²`, whatever `mode` was used.
    pub sigma2_hat: f64,
    pub mode: ScalingMode,
    /// Whether [`CorrelationSet::standardize`] has been applied.
    pub standardized: bool,
}

impl CorrelationSet {
    pub fn compute(xi: &[f64], m: usize, mode: ScalingMode) -> Result<Self> {
        check_lags(xi.len(), m)?;
        let s2 = sigma2_hat(xi)?;
        let sigma2 = mode.sigma2(s2);
        Ok(Self {
            n: xi.len(),
            m,
            r11: cross_with(xi, Pair::P11, m, sigma2),
            r22: cross_with(xi, Pair::P22, m, sigma2),
            r12: cross_with(xi, Pair::P12, m, sigma2),
            r21: cross_with(xi, Pair::P21, m, sigma2),
            sigma2_hat: s2,
            mode,
            standardized: false,
        })
    }

    pub fn get(&self, pair: Pair) -> &[f64] {
        match pair {
            Pair::P11 => &self.r11,
            Pair::P22 => &self.r22,
            Pair::P12 => &self.r12,
            Pair::P21 => &self.r21,
        }
    }

    /// The σ² actually used in the normalizations.
    pub fn sigma2(&self) -> f64 {
        self.mode.sigma2(self.sigma2_hat)
    }

    /// Applies `r̃(k) = √((n+2)/(n-k)) r̂(k)` to every vector.
    pub fn standardize(&self) -> Self {
        let scale = |v: &[f64]| -> Vec<f64> {
            v.iter().enumerate().map(|(i, r)| r * standardization_factor(self.n, i + 1)).collect()
        };
        Self {
            r11: scale(&self.r11),
            r22: scale(&self.r22),
            r12: scale(&self.r12),
            r21: scale(&self.r21),
            standardized: true,
            ..self.clone()
        }
    }

    /// Rows `(lag, r11, r22, r12, r21)`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, [f64; 4])> + '_ {
        (0..self.m).map(move |i| (i + 1, [self.r11[i], self.r22[i], self.r12[i], self.r21[i]]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_lag_one() {
        let xi = [1.0, -1.0, 1.0, -1.0];
        let r = cross_correlation(&xi, Pair::P11, 1, ScalingMode::Estimated).unwrap();
        assert!((r[0] + 0.75).abs() < 1e-15);
        assert!(sigma2_hat(&xi).is_err());
        assert!(CorrelationSet::compute(&xi, 1, ScalingMode::Estimated).is_err());
    }

    #[test]
    fn standardization_example() {
        assert!((standardization_factor(100, 1) * 0.1 - 0.10150).abs() < 5e-6);
        let mut last = 0.0;
        for k in 1..100 {
            let f = standardization_factor(100, k);
            assert!(f > last);
            last = f;
        }
        assert!((standardization_factor(100, 99) - 102f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lag_bounds() {
        let xi = [0.3, -1.2, 0.8, 1.9, -0.4];
        assert!(cross_correlation(&xi, Pair::P12, 5, ScalingMode::Estimated).is_err());
        assert!(cross_correlation(&xi, Pair::P12, 0, ScalingMode::Estimated).is_err());
        assert!(cross_correlation(&xi, Pair::P12, 4, ScalingMode::Estimated).is_ok());
    }

    #[test]
    fn gaussian_mode_fixes_sigma() {
        let xi = [0.3, -1.2, 0.8, 1.9, -0.4, 0.1, -0.7];
        let r = cross_correlation(&xi, Pair::P22, 2, ScalingMode::Gaussian).unwrap();
        let direct: f64 = (1..7).map(|t| (xi[t] * xi[t] - 1.0) * (xi[t - 1] * xi[t - 1] - 1.0)).sum::<f64>() / 14.0;
        assert!((r[0] - direct).abs() < 1e-15);
    }
}
