//! Data-generating processes for simulation experiments.
//!
//! A [`DgpSpec`] combines a conditional-mean recursion, a conditional-variance
//! recursion and a standardized innovation law. Presample values are `z = 0`,
//! `ε = 0` and `h` equal to the unconditional variance of the variance part.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::arma_poly;
use crate::error::{Error, Result};
use crate::numeric::{InnovationLaw, RngStream};
use crate::series::TimeSeries;

/// One regime of a threshold or smooth-transition autoregression.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Regime {
    #[cfg_attr(feature = "serde", serde(default))]
    pub intercept: f64,
    pub coeffs: Vec<f64>,
}

impl Regime {
    fn eval(&self, z: &[f64], t: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .fold(self.intercept, |acc, (i, c)| acc + c * lag(z, t, i + 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Transition {
    /// `{1 + exp[-γ(z_{t-d} - c)/σ]}⁻¹`
    Logistic,
    /// `{1 - exp[-γ((z_{t-d} - c)/σ)²]}⁻¹`, taken literally; it is unbounded
    /// at `z_{t-d} = c`.
    Exponential,
}

/// Conditional-mean recursion.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum MeanPart {
    #[default]
    None,
    Ar {
        #[cfg_attr(feature = "serde", serde(default))]
        intercept: f64,
        coeffs: Vec<f64>,
    },
    Ma {
        coeffs: Vec<f64>,
    },
    Arma {
        #[cfg_attr(feature = "serde", serde(default))]
        intercept: f64,
        ar: Vec<f64>,
        ma: Vec<f64>,
    },
    /// Regime `lower` applies when `z_{t-delay} ≤ threshold`.
    Tar {
        lower: Regime,
        upper: Regime,
        threshold: f64,
        delay: usize,
    },
    /// `lower·(1 - F) + upper·F` with transition `F` in `z_{t-delay}`.
    Star {
        lower: Regime,
        upper: Regime,
        transition: Transition,
        gamma: f64,
        threshold: f64,
        delay: usize,
        /// Standard deviation used to normalize the transition variable.
        #[cfg_attr(feature = "serde", serde(default = "one"))]
        scale: f64,
    },
    /// `c + φ z_{t-1} + ϕ z_{t-1} ε_{t-1}`
    Bilinear {
        intercept: f64,
        phi: f64,
        cross: f64,
    },
    /// `φ z_{t-1} + ϕ η_t z_{t-1}` with `η_t` i.i.d. N(0,1).
    Rca {
        phi: f64,
        scale: f64,
    },
}

#[cfg(feature = "serde")]
fn one() -> f64 {
    1.0
}

/// Conditional-variance recursion.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum VariancePart {
    Constant { variance: f64 },
    Arch { omega: f64, alpha: Vec<f64> },
    Garch { omega: f64, alpha: Vec<f64>, beta: Vec<f64> },
    /// `ω + (α + γ I{ε_{t-1} < 0}) ε²_{t-1} + β h_{t-1}`
    Gjr { omega: f64, alpha: f64, gamma: f64, beta: f64 },
}

impl Default for VariancePart {
    fn default() -> Self {
        VariancePart::Constant { variance: 1.0 }
    }
}

/// Declarative description of a simulatable process.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DgpSpec {
    #[cfg_attr(feature = "serde", serde(default))]
    pub mean: MeanPart,
    #[cfg_attr(feature = "serde", serde(default))]
    pub variance: VariancePart,
    #[cfg_attr(feature = "serde", serde(default))]
    pub innovation: InnovationLaw,
}

impl DgpSpec {
    pub fn new(mean: MeanPart, variance: VariancePart) -> Self {
        Self { mean, variance, innovation: InnovationLaw::StandardNormal }
    }

    pub fn with_innovation(mut self, law: InnovationLaw) -> Self {
        self.innovation = law;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.innovation.validate()?;
        validate_mean(&self.mean)?;
        validate_variance(&self.variance)
    }

    /// Largest lag touched by either recursion.
    pub fn max_lag(&self) -> usize {
        let mean = match &self.mean {
            MeanPart::None => 0,
            MeanPart::Ar { coeffs, .. } => coeffs.len(),
            MeanPart::Ma { coeffs } => coeffs.len(),
            MeanPart::Arma { ar, ma, .. } => ar.len().max(ma.len()),
            MeanPart::Tar { lower, upper, delay, .. } | MeanPart::Star { lower, upper, delay, .. } => {
                lower.coeffs.len().max(upper.coeffs.len()).max(*delay)
            }
            MeanPart::Bilinear { .. } | MeanPart::Rca { .. } => 1,
        };
        let var = match &self.variance {
            VariancePart::Constant { .. } => 0,
            VariancePart::Arch { alpha, .. } => alpha.len(),
            VariancePart::Garch { alpha, beta, .. } => alpha.len().max(beta.len()),
            VariancePart::Gjr { .. } => 1,
        };
        mean.max(var)
    }
}

fn check_finite(vals: &[f64], what: &str) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::domain(format!("{what}: coefficients must be finite")))
    }
}

fn validate_mean(mean: &MeanPart) -> Result<()> {
    match mean {
        MeanPart::None => Ok(()),
        MeanPart::Ar { intercept, coeffs } | MeanPart::Arma { intercept, ar: coeffs, .. } => {
            check_finite(coeffs, "AR")?;
            check_finite(&[*intercept], "AR intercept")?;
            if let MeanPart::Arma { ma, .. } = mean {
                check_finite(ma, "MA")?;
            }
            if !arma_poly::is_stationary(coeffs) {
                return Err(Error::domain("AR polynomial has a root on or inside the unit circle"));
            }
            Ok(())
        }
        MeanPart::Ma { coeffs } => check_finite(coeffs, "MA"),
        MeanPart::Tar { lower, upper, threshold, delay } => {
            check_finite(&lower.coeffs, "TAR")?;
            check_finite(&upper.coeffs, "TAR")?;
            check_finite(&[lower.intercept, upper.intercept, *threshold], "TAR")?;
            if *delay == 0 {
                return Err(Error::domain("TAR delay must be at least 1"));
            }
            Ok(())
        }
        MeanPart::Star { lower, upper, gamma, threshold, delay, scale, .. } => {
            check_finite(&lower.coeffs, "STAR")?;
            check_finite(&upper.coeffs, "STAR")?;
            check_finite(&[lower.intercept, upper.intercept, *threshold], "STAR")?;
            if !(*gamma > 0.0) {
                return Err(Error::domain("STAR smoothness γ must be positive"));
            }
            if !(*scale > 0.0) || !scale.is_finite() {
                return Err(Error::domain("STAR scale must be positive"));
            }
            if *delay == 0 {
                return Err(Error::domain("STAR delay must be at least 1"));
            }
            Ok(())
        }
        MeanPart::Bilinear { intercept, phi, cross } => check_finite(&[*intercept, *phi, *cross], "bilinear"),
        MeanPart::Rca { phi, scale } => check_finite(&[*phi, *scale], "RCA"),
    }
}

fn validate_variance(var: &VariancePart) -> Result<()> {
    match var {
        VariancePart::Constant { variance } => {
            if *variance > 0.0 && variance.is_finite() {
                Ok(())
            } else {
                Err(Error::domain("constant variance must be positive"))
            }
        }
        VariancePart::Arch { omega, alpha } => validate_garch(*omega, alpha, &[]),
        VariancePart::Garch { omega, alpha, beta } => validate_garch(*omega, alpha, beta),
        VariancePart::Gjr { omega, alpha, gamma, beta } => {
            validate_garch(*omega, &[*alpha], &[*beta])?;
            if !(*gamma >= 0.0) {
                return Err(Error::domain("GJR leverage γ must be nonnegative"));
            }
            if alpha + 0.5 * gamma + beta >= 1.0 {
                return Err(Error::domain("GJR persistence α + γ/2 + β must be below 1"));
            }
            Ok(())
        }
    }
}

fn validate_garch(omega: f64, alpha: &[f64], beta: &[f64]) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::domain("GARCH ω must be positive"));
    }
    if alpha.iter().chain(beta).any(|c| !(*c >= 0.0) || !c.is_finite()) {
        return Err(Error::domain("GARCH α and β must be nonnegative"));
    }
    if alpha.iter().chain(beta).sum::<f64>() >= 1.0 {
        return Err(Error::domain("GARCH persistence Σα + Σβ must be below 1"));
    }
    Ok(())
}

impl VariancePart {
    /// Unconditional variance used as presample `h`.
    pub fn unconditional(&self) -> f64 {
        match self {
            VariancePart::Constant { variance } => *variance,
            VariancePart::Arch { omega, alpha } => omega / (1.0 - alpha.iter().sum::<f64>()),
            VariancePart::Garch { omega, alpha, beta } => {
                omega / (1.0 - alpha.iter().sum::<f64>() - beta.iter().sum::<f64>())
            }
            VariancePart::Gjr { omega, alpha, gamma, beta } => omega / (1.0 - alpha - 0.5 * gamma - beta),
        }
    }
}

#[inline]
fn lag(x: &[f64], t: usize, k: usize) -> f64 {
    if t >= k {
        x[t - k]
    } else {
        0.0
    }
}

/// Simulates `n + burn_in` points of `spec` and returns the last `n`.
///
/// The innovation stream is consumed first (`n + burn_in` draws); the RCA
/// coefficient noise, when present, comes from the next `n + burn_in` draws.
pub fn simulate(spec: &DgpSpec, n: usize, burn_in: usize, stream: &mut RngStream) -> Result<TimeSeries> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::domain("cannot simulate an empty series"));
    }
    if burn_in < spec.max_lag() {
        return Err(Error::domain("burn-in shorter than the largest lag of the process"));
    }
    let total = n + burn_in;
    let xi = stream.draw(&spec.innovation, total)?;
    let eta = match spec.mean {
        MeanPart::Rca { .. } => stream.draw(&InnovationLaw::StandardNormal, total)?,
        _ => Vec::new(),
    };
    let h0 = spec.variance.unconditional();
    let mut z = vec![0.0; total];
    let mut eps = vec![0.0; total];
    let mut h = vec![0.0; total];
    for t in 0..total {
        let ht = match &spec.variance {
            VariancePart::Constant { variance } => *variance,
            VariancePart::Arch { omega, alpha } => garch_step(*omega, alpha, &[], &eps, &h, h0, t),
            VariancePart::Garch { omega, alpha, beta } => garch_step(*omega, alpha, beta, &eps, &h, h0, t),
            VariancePart::Gjr { omega, alpha, gamma, beta } => {
                let e1 = lag(&eps, t, 1);
                let lev = if e1 < 0.0 { *gamma } else { 0.0 };
                let h1 = if t >= 1 { h[t - 1] } else { h0 };
                omega + (alpha + lev) * e1 * e1 + beta * h1
            }
        };
        h[t] = ht;
        let et = ht.sqrt() * xi[t];
        eps[t] = et;
        let mu = conditional_mean(&spec.mean, &z, &eps, &eta, t);
        let zt = mu + et;
        if !zt.is_finite() || !ht.is_finite() {
            return Err(Error::Generation {
                index: t,
                reason: "recursion overflowed".to_string(),
            });
        }
        z[t] = zt;
    }
    TimeSeries::new(z.split_off(burn_in))
}

fn garch_step(omega: f64, alpha: &[f64], beta: &[f64], eps: &[f64], h: &[f64], h0: f64, t: usize) -> f64 {
    let mut v = omega;
    for (i, a) in alpha.iter().enumerate() {
        let e = lag(eps, t, i + 1);
        v += a * e * e;
    }
    for (j, b) in beta.iter().enumerate() {
        let hl = if t > j { h[t - j - 1] } else { h0 };
        v += b * hl;
    }
    v
}

fn conditional_mean(mean: &MeanPart, z: &[f64], eps: &[f64], eta: &[f64], t: usize) -> f64 {
    match mean {
        MeanPart::None => 0.0,
        MeanPart::Ar { intercept, coeffs } => arma_mean(*intercept, coeffs, &[], z, eps, t),
        MeanPart::Ma { coeffs } => arma_mean(0.0, &[], coeffs, z, eps, t),
        MeanPart::Arma { intercept, ar, ma } => arma_mean(*intercept, ar, ma, z, eps, t),
        MeanPart::Tar { lower, upper, threshold, delay } => {
            if lag(z, t, *delay) <= *threshold {
                lower.eval(z, t)
            } else {
                upper.eval(z, t)
            }
        }
        MeanPart::Star { lower, upper, transition, gamma, threshold, delay, scale } => {
            let s = (lag(z, t, *delay) - threshold) / scale;
            let f = match transition {
                Transition::Logistic => 1.0 / (1.0 + (-gamma * s).exp()),
                Transition::Exponential => 1.0 / (1.0 - (-gamma * s * s).exp()),
            };
            lower.eval(z, t) * (1.0 - f) + upper.eval(z, t) * f
        }
        MeanPart::Bilinear { intercept, phi, cross } => {
            let z1 = lag(z, t, 1);
            intercept + phi * z1 + cross * z1 * lag(eps, t, 1)
        }
        MeanPart::Rca { phi, scale } => {
            let z1 = lag(z, t, 1);
            phi * z1 + scale * eta[t] * z1
        }
    }
}

fn arma_mean(c: f64, ar: &[f64], ma: &[f64], z: &[f64], eps: &[f64], t: usize) -> f64 {
    let mut mu = c;
    for (i, p) in ar.iter().enumerate() {
        mu += p * lag(z, t, i + 1);
    }
    for (j, q) in ma.iter().enumerate() {
        mu += q * lag(eps, t, j + 1);
    }
    mu
}

/// Adds measurement error `σ_η η_t` with `η_t` unit-variance Student-t(10)
/// and `σ²_η = omega_sq · var(series)`.
pub fn contaminate(series: &TimeSeries, omega_sq: f64, stream: &mut RngStream) -> Result<TimeSeries> {
    if !(omega_sq >= 0.0) || !omega_sq.is_finite() {
        return Err(Error::domain("noise-to-signal ratio must be nonnegative"));
    }
    if omega_sq == 0.0 {
        return Ok(series.clone());
    }
    let sd = (omega_sq * series.variance()).sqrt();
    let eta = stream.draw(&InnovationLaw::StudentT { df: 10.0 }, series.len())?;
    let values = series.values().iter().zip(&eta).map(|(z, e)| z + sd * e).collect();
    let mut out = TimeSeries::new(values)?;
    if let Some(ts) = series.timestamps() {
        out = TimeSeries::with_timestamps(out.into_values(), ts.to_vec())?;
    }
    Ok(out)
}

/// Named processes from the simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Preset {
    A1,
    A2,
    A3,
    A4,
    B1,
    B2,
    B3,
    B4,
    C1,
    C2,
    D1,
    D2,
    D3,
    D4,
}

impl Preset {
    pub const ALL: [Preset; 14] = [
        Preset::A1,
        Preset::A2,
        Preset::A3,
        Preset::A4,
        Preset::B1,
        Preset::B2,
        Preset::B3,
        Preset::B4,
        Preset::C1,
        Preset::C2,
        Preset::D1,
        Preset::D2,
        Preset::D3,
        Preset::D4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::A1 => "A1",
            Preset::A2 => "A2",
            Preset::A3 => "A3",
            Preset::A4 => "A4",
            Preset::B1 => "B1",
            Preset::B2 => "B2",
            Preset::B3 => "B3",
            Preset::B4 => "B4",
            Preset::C1 => "C1",
            Preset::C2 => "C2",
            Preset::D1 => "D1",
            Preset::D2 => "D2",
            Preset::D3 => "D3",
            Preset::D4 => "D4",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Preset::A1 => "AR(1): z = .5 z[-1] + e",
            Preset::A2 => "GARCH(1,1): h = .1 + .3 e²[-1] + .5 h[-1]",
            Preset::A3 => "AR(1)-ARCH(1): z = .5 z[-1] + e, h = .1 + .4 e²[-1]",
            Preset::A4 => "AR(1)-GARCH(1,1): z = .5 z[-1] + e, h = .1 + .3 e²[-1] + .5 h[-1]",
            Preset::B1 => "bilinear: z = .2 + .4 z[-1] + e + p z[-1] e[-1]  (param p, default 1)",
            Preset::B2 => "random coefficient AR: z = .2 z[-1] + p η z[-1] + e  (param p, default 1)",
            Preset::B3 => "TAR: z = .8 z[-1] if z[-1] <= -1 else -.8 z[-1], plus e",
            Preset::B4 => "AR(1)-ARCH(2): z = .2 z[-1] + e, h = .2 + .2 e²[-1] + .2 e²[-2]",
            Preset::C1 => "MA(1)-GARCH(1,1): z = e + p e[-1], h = .1 + .3 e²[-1] + .5 h[-1]  (param p, default .5)",
            Preset::C2 => "AR(1)-GARCH(1,1): z = p z[-1] + e, h = .3 + .3 e²[-1] + .3 h[-1]  (param p, default .5)",
            Preset::D1 => "AR(1)-ARCH(2): z = .5 z[-1] + e, h = .01 + .4 e²[-1] + .3 e²[-2]",
            Preset::D2 => "AR(1)-GARCH(1,1): z = .5 z[-1] + e, h = .01 + .4 e²[-1] + .5 h[-1]",
            Preset::D3 => "AR(2)-ARCH(2): z = .5 z[-1] + .2 z[-2] + e, h = .01 + .4 e²[-1] + .2 e²[-2]",
            Preset::D4 => "TAR with GJR errors: z = .4 z[-1] + .5 z[-1] I(z[-1] > 0) + e, h = .1 + (.3 + .4 I(e[-1] < 0)) e²[-1] + .4 h[-1]",
        }
    }

    /// Whether the preset takes a free parameter (swept in power curves).
    pub fn default_param(&self) -> Option<f64> {
        match self {
            Preset::B1 | Preset::B2 => Some(1.0),
            Preset::C1 | Preset::C2 => Some(0.5),
            _ => None,
        }
    }

    /// Builds the preset with Gaussian innovations. `param` is ignored by
    /// presets without a free parameter.
    pub fn spec(&self, param: Option<f64>) -> DgpSpec {
        let p = param.or(self.default_param()).unwrap_or(0.0);
        let ar = |c: &[f64]| MeanPart::Ar { intercept: 0.0, coeffs: c.to_vec() };
        let garch = |w: f64, a: f64, b: f64| VariancePart::Garch { omega: w, alpha: vec![a], beta: vec![b] };
        let arch = |w: f64, a: &[f64]| VariancePart::Arch { omega: w, alpha: a.to_vec() };
        let unit = VariancePart::Constant { variance: 1.0 };
        let (mean, variance) = match self {
            Preset::A1 => (ar(&[0.5]), unit),
            Preset::A2 => (MeanPart::None, garch(0.1, 0.3, 0.5)),
            Preset::A3 => (ar(&[0.5]), arch(0.1, &[0.4])),
            Preset::A4 => (ar(&[0.5]), garch(0.1, 0.3, 0.5)),
            Preset::B1 => (MeanPart::Bilinear { intercept: 0.2, phi: 0.4, cross: p }, unit),
            Preset::B2 => (MeanPart::Rca { phi: 0.2, scale: p }, unit),
            Preset::B3 => (
                MeanPart::Tar {
                    lower: Regime { intercept: 0.0, coeffs: vec![0.8] },
                    upper: Regime { intercept: 0.0, coeffs: vec![-0.8] },
                    threshold: -1.0,
                    delay: 1,
                },
                unit,
            ),
            Preset::B4 => (ar(&[0.2]), arch(0.2, &[0.2, 0.2])),
            Preset::C1 => (MeanPart::Ma { coeffs: vec![p] }, garch(0.1, 0.3, 0.5)),
            Preset::C2 => (ar(&[p]), garch(0.3, 0.3, 0.3)),
            Preset::D1 => (ar(&[0.5]), arch(0.01, &[0.4, 0.3])),
            Preset::D2 => (ar(&[0.5]), garch(0.01, 0.4, 0.5)),
            Preset::D3 => (ar(&[0.5, 0.2]), arch(0.01, &[0.4, 0.2])),
            Preset::D4 => (
                MeanPart::Tar {
                    lower: Regime { intercept: 0.0, coeffs: vec![0.4] },
                    upper: Regime { intercept: 0.0, coeffs: vec![0.9] },
                    threshold: 0.0,
                    delay: 1,
                },
                VariancePart::Gjr { omega: 0.1, alpha: 0.3, gamma: 0.4, beta: 0.4 },
            ),
        };
        DgpSpec::new(mean, variance)
    }

    pub fn list() -> String {
        Preset::ALL.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        Preset::ALL
            .iter()
            .copied()
            .find(|p| p.name() == up)
            .ok_or_else(|| Error::domain(format!("unknown preset '{s}'; available: {}", Preset::list())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acf1(x: &[f64]) -> f64 {
        let m = crate::series::mean(x);
        let num: f64 = x.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
        let den: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
        num / den
    }

    #[test]
    fn ar1_lag_one_autocorrelation() {
        let s = simulate(&Preset::A1.spec(None), 100_000, 1000, &mut RngStream::new(3, 0)).unwrap();
        assert!((acf1(s.values()) - 0.5).abs() < 0.01);
    }

    #[test]
    fn garch_unconditional_variance() {
        let s = simulate(&Preset::A2.spec(None), 100_000, 1000, &mut RngStream::new(4, 0)).unwrap();
        assert!((s.variance() - 0.5).abs() < 0.05, "{}", s.variance());
    }

    #[test]
    fn degenerate_spec_reproduces_innovations() {
        let spec = DgpSpec::new(MeanPart::Ar { intercept: 0.0, coeffs: vec![0.0] }, VariancePart::Constant { variance: 1.0 });
        let s = simulate(&spec, 500, 10, &mut RngStream::new(5, 1)).unwrap();
        let raw = RngStream::new(5, 1).draw(&InnovationLaw::StandardNormal, 510).unwrap();
        assert!(s.values().iter().zip(&raw[10..]).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn garch_paths_keep_h_above_omega() {
        // Reconstruct h from the simulated path with the same recursion.
        let spec = Preset::A2.spec(None);
        let s = simulate(&spec, 5000, 1, &mut RngStream::new(6, 0)).unwrap();
        let mut h = 0.1 / 0.2;
        let mut e_prev = 0.0;
        for &e in s.values() {
            h = 0.1 + 0.3 * e_prev * e_prev + 0.5 * h;
            assert!(h >= 0.1);
            e_prev = e;
        }
    }

    #[test]
    fn steep_logistic_star_matches_tar() {
        let tar = Preset::B3.spec(None);
        let MeanPart::Tar { lower, upper, threshold, delay } = tar.mean.clone() else { unreachable!() };
        let star = DgpSpec::new(
            MeanPart::Star { lower, upper, transition: Transition::Logistic, gamma: 1e6, threshold, delay, scale: 1.0 },
            VariancePart::Constant { variance: 1.0 },
        );
        let a = simulate(&tar, 2000, 100, &mut RngStream::new(7, 0)).unwrap();
        let b = simulate(&star, 2000, 100, &mut RngStream::new(7, 0)).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-6);
        }
    }

    #[test]
    fn bilinear_and_rca_reduce_to_ar1() {
        let unit = VariancePart::Constant { variance: 1.0 };
        let bl = simulate(&Preset::B1.spec(Some(0.0)), 1000, 50, &mut RngStream::new(8, 0)).unwrap();
        let ar = DgpSpec::new(MeanPart::Ar { intercept: 0.2, coeffs: vec![0.4] }, unit.clone());
        let base = simulate(&ar, 1000, 50, &mut RngStream::new(8, 0)).unwrap();
        assert_eq!(bl.values(), base.values());

        let rca = simulate(&Preset::B2.spec(Some(0.0)), 1000, 50, &mut RngStream::new(9, 0)).unwrap();
        let ar = DgpSpec::new(MeanPart::Ar { intercept: 0.0, coeffs: vec![0.2] }, unit);
        let base = simulate(&ar, 1000, 50, &mut RngStream::new(9, 0)).unwrap();
        assert_eq!(rca.values(), base.values());
    }

    #[test]
    fn invalid_specs_rejected() {
        let explosive = DgpSpec::new(MeanPart::Ar { intercept: 0.0, coeffs: vec![1.2] }, VariancePart::default());
        assert!(matches!(simulate(&explosive, 10, 5, &mut RngStream::new(0, 0)), Err(Error::Domain(_))));
        let garch = DgpSpec::new(MeanPart::None, VariancePart::Garch { omega: 0.1, alpha: vec![0.6], beta: vec![0.5] });
        assert!(garch.validate().is_err());
        let star = DgpSpec::new(
            MeanPart::Star {
                lower: Regime::default(),
                upper: Regime::default(),
                transition: Transition::Logistic,
                gamma: 0.0,
                threshold: 0.0,
                delay: 1,
                scale: 1.0,
            },
            VariancePart::default(),
        );
        assert!(star.validate().is_err());
        assert!(simulate(&Preset::D3.spec(None), 10, 1, &mut RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn overflow_names_index() {
        let spec = DgpSpec::new(MeanPart::Bilinear { intercept: 0.0, phi: 0.9, cross: 50.0 }, VariancePart::default());
        match simulate(&spec, 5000, 10, &mut RngStream::new(1, 1)) {
            Err(Error::Generation { index, .. }) => assert!(index < 5010),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn contamination_contracts() {
        let s = simulate(&Preset::A1.spec(None), 100_000, 100, &mut RngStream::new(10, 0)).unwrap();
        let same = contaminate(&s, 0.0, &mut RngStream::new(10, 1)).unwrap();
        assert_eq!(same, s);
        let noisy = contaminate(&s, 0.065, &mut RngStream::new(10, 1)).unwrap();
        assert!((noisy.variance() / s.variance() - 1.065).abs() < 0.01);
        let a = contaminate(&s, 0.005, &mut RngStream::new(10, 2)).unwrap();
        let b = contaminate(&s, 0.005, &mut RngStream::new(10, 2)).unwrap();
        assert_eq!(a, b);
        assert!(contaminate(&s, -0.1, &mut RngStream::new(10, 2)).is_err());
    }

    #[test]
    fn presets_parse_and_validate() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
            p.spec(None).validate().unwrap();
        }
        assert!("Z9".parse::<Preset>().is_err());
        assert!(matches!(Preset::D4.spec(None).variance, VariancePart::Gjr { .. }));
    }
}
