//! Portmanteau statistics on standardized residuals: the Ljung-Box-type
//! `Q_rs`, the quadratic form `WL` in first and second powers, and the mixed
//! statistics `Ċ_rs` / `C_rs` weighted by the block-diagonal covariance `Ω̂_rs`.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::correlation::{sigma2_hat, CorrelationSet, Pair, ScalingMode};
use crate::error::{Error, Result};
use crate::estimation::FittedModel;
use crate::numeric::{chi_square_sf, sym_eigen, Matrix};

/// Default eigenvalue threshold below which a direction of an `Ω̂` block is
/// treated as degenerate and left out of the quadratic form.
pub const DEFAULT_EIGEN_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TestId {
    Q11,
    Q22,
    Q12,
    Q21,
    WL,
    Cdot12,
    Cdot21,
    C12,
    C21,
}

impl TestId {
    pub const ALL: [TestId; 9] = [
        TestId::Q11,
        TestId::Q22,
        TestId::Q12,
        TestId::Q21,
        TestId::WL,
        TestId::Cdot12,
        TestId::Cdot21,
        TestId::C12,
        TestId::C21,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestId::Q11 => "Q11",
            TestId::Q22 => "Q22",
            TestId::Q12 => "Q12",
            TestId::Q21 => "Q21",
            TestId::WL => "WL",
            TestId::Cdot12 => "Cdot12",
            TestId::Cdot21 => "Cdot21",
            TestId::C12 => "C12",
            TestId::C21 => "C21",
        }
    }

    /// Correlation pair behind a `Q` test, or the cross pair of a `C` test.
    pub fn pair(self) -> Option<Pair> {
        match self {
            TestId::Q11 => Some(Pair::P11),
            TestId::Q22 => Some(Pair::P22),
            TestId::Q12 | TestId::Cdot12 | TestId::C12 => Some(Pair::P12),
            TestId::Q21 | TestId::Cdot21 | TestId::C21 => Some(Pair::P21),
            TestId::WL => None,
        }
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim();
        TestId::ALL.into_iter().find(|t| t.name().eq_ignore_ascii_case(key)).ok_or_else(|| {
            let names: Vec<&str> = TestId::ALL.iter().map(|t| t.name()).collect();
            Error::config(alloc::format!("unknown test '{key}' (expected one of {})", names.join(", ")))
        })
    }
}

/// One statistic at one lag.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestResult {
    pub test: TestId,
    pub m: usize,
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
    /// `Ω̂` (or `Σ̂`) needed an eigenvalue floor or ridge before inversion.
    pub omega_regularized: bool,
    /// The parameter adjustment would have left no degrees of freedom; df
    /// was floored at 1.
    pub df_adjusted: bool,
}

impl TestResult {
    fn new(test: TestId, m: usize, statistic: f64, raw_df: i64, omega_regularized: bool) -> Result<Self> {
        let df_adjusted = raw_df < 1;
        let df = raw_df.max(1) as u32;
        let statistic = statistic.max(0.0);
        let p_value = chi_square_sf(statistic, df)?;
        Ok(Self { test, m, statistic, df, p_value, omega_regularized, df_adjusted })
    }

    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }
}

/// Settings shared by every statistic in a battery.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct BatteryOptions {
    pub scaling: ScalingMode,
    /// Overrides the number of conditional-mean parameters (`p + q`) that is
    /// subtracted from the degrees of freedom of `Q11`, `WL` and `C`.
    pub df_adjust: Option<usize>,
    /// Eigen-directions of an `Ω̂` block with eigenvalue below this value are
    /// dropped from the quadratic form (a truncated pseudo-inverse).
    pub eigen_threshold: f64,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        Self { scaling: ScalingMode::default(), df_adjust: None, eigen_threshold: DEFAULT_EIGEN_THRESHOLD }
    }
}

impl BatteryOptions {
    fn adjust(&self, fitted: &FittedModel) -> usize {
        self.df_adjust.unwrap_or_else(|| fitted.spec.arma_order())
    }
}

fn check_lag(fitted: &FittedModel, m: usize) -> Result<()> {
    if m == 0 || m >= fitted.n() {
        return Err(Error::domain(alloc::format!("lag {m} outside 1..{}", fitted.n())));
    }
    Ok(())
}

/// `X_rs`, an `m × ℓ` matrix whose row `k` is
///
/// * `X₁₁(k) = n⁻¹ Σ h_t^{-1/2} ∂μ_t ξ_{t-k}`
/// * `X₂₂(k) = n⁻¹ Σ h_t⁻¹ ∂h_t (ξ²_{t-k} - 1)`
/// * `X₁₂(k) = n⁻¹ Σ h_t^{-1/2} ∂μ_t (ξ²_{t-k} - 1)`
/// * `X₂₁(k) = n⁻¹ Σ h_{t-k}^{-1/2} ∂μ_{t-k} (ξ²_t - 1)`
///
/// For fits without a conditional-variance model, `X₂₂`, `X₁₂` and `X₂₁` are
/// zero by convention; their sample values only carry noise of order `n^{-1/2}`.
pub fn x_block(fitted: &FittedModel, pair: Pair, m: usize) -> Result<Matrix> {
    check_lag(fitted, m)?;
    let n = fitted.n();
    let l = fitted.theta.len();
    let mut x = Matrix::zeros(m, l);
    if pair != Pair::P11 && !fitted.spec.has_variance_model() {
        return Ok(x);
    }
    let xi = &fitted.xi;
    let h = &fitted.h;
    let sq: Vec<f64> = xi.iter().map(|v| v * v - 1.0).collect();
    for k in 1..=m {
        let row = x.row_mut(k - 1);
        for t in k..n {
            let (w, grad) = match pair {
                Pair::P11 => (xi[t - k] / h[t].sqrt(), fitted.dmu.row(t)),
                Pair::P22 => (sq[t - k] / h[t], fitted.dh.row(t)),
                Pair::P12 => (sq[t - k] / h[t].sqrt(), fitted.dmu.row(t)),
                Pair::P21 => (sq[t] / h[t - k].sqrt(), fitted.dmu.row(t - k)),
            };
            for (r, g) in row.iter_mut().zip(grad) {
                *r += w * g;
            }
        }
        row.iter_mut().for_each(|r| *r /= n as f64);
    }
    Ok(x)
}

/// `I - c · X Σ̂⁻¹ X'`, symmetrized; the flag reports eigenvalues below the
/// threshold.
fn covariance_block(x: &Matrix, sigma_inv: &Matrix, c: f64, tau: f64) -> Result<(Matrix, bool)> {
    let xs = x.matmul(sigma_inv)?;
    let mut b = xs.matmul(&x.transpose())?;
    b.scale(-c);
    b.add_diagonal(1.0);
    b.symmetrize();
    let low = sym_eigen(&b)?.0.first().is_some_and(|v| *v < tau);
    Ok((b, low))
}

/// Block-diagonal estimate of the covariance of `√n (R̂₁₁, R̂₂₂, R̂_rs)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OmegaMatrix {
    pub pair: Pair,
    pub m: usize,
    /// Diagonal blocks for `R̂₁₁`, `R̂₂₂` and `R̂_rs`, each `m × m`.
    pub blocks: [Matrix; 3],
    pub regularized: bool,
}

impl OmegaMatrix {
    /// Dense `3m × 3m` form.
    pub fn matrix(&self) -> Matrix {
        let m = self.m;
        Matrix::from_fn(3 * m, 3 * m, |i, j| {
            let (bi, bj) = (i / m, j / m);
            if bi == bj {
                self.blocks[bi][(i % m, j % m)]
            } else {
                0.0
            }
        })
    }
}

/// `Ω̂_rs = blockdiag(I - X₁₁Σ̂⁻¹X₁₁', I - X₂₂Σ̂⁻¹X₂₂'/(2σ²), I - X_rsΣ̂⁻¹X_rs'/σ²)`
/// with `σ²` from `scaling` (2 in the Gaussian case).
pub fn omega_matrix(fitted: &FittedModel, pair: Pair, m: usize, options: &BatteryOptions) -> Result<OmegaMatrix> {
    if !matches!(pair, Pair::P12 | Pair::P21) {
        return Err(Error::domain("the covariance is defined for the cross pairs (1,2) and (2,1)"));
    }
    let s2 = options.scaling.sigma2(sigma2_hat(&fitted.xi)?);
    let tau = options.eigen_threshold;
    let (b1, f1) = covariance_block(&x_block(fitted, Pair::P11, m)?, &fitted.sigma_inv, 1.0, tau)?;
    let (b2, f2) = covariance_block(&x_block(fitted, Pair::P22, m)?, &fitted.sigma_inv, 0.5 / s2, tau)?;
    let (b3, f3) = covariance_block(&x_block(fitted, pair, m)?, &fitted.sigma_inv, 1.0 / s2, tau)?;
    Ok(OmegaMatrix { pair, m, blocks: [b1, b2, b3], regularized: f1 || f2 || f3 || fitted.sigma_regularized })
}

/// `n r' B⁺ r`, where eigen-directions of `B` below the threshold are dropped.
fn quadratic(n: usize, block: &Matrix, r: &[f64], tau: f64) -> Result<(f64, bool)> {
    let (values, vectors) = sym_eigen(block)?;
    let mut q = 0.0;
    let mut dropped = false;
    for (k, lam) in values.iter().enumerate() {
        if *lam < tau {
            dropped = true;
            continue;
        }
        let proj: f64 = (0..r.len()).map(|i| vectors[(i, k)] * r[i]).sum();
        q += proj * proj / lam;
    }
    Ok((n as f64 * q, dropped))
}

/// `Q_rs = n(n+2) Σ_k r̂²_rs(k) / (n-k)`. The degrees of freedom are
/// `m - adjust` for `(1,1)` and `m` otherwise.
pub fn q_statistic(rset: &CorrelationSet, pair: Pair, adjust: usize) -> Result<TestResult> {
    if rset.standardized {
        return Err(Error::domain("Q statistics take unstandardized correlations"));
    }
    let n = rset.n as f64;
    let stat = n * (n + 2.0) * rset.get(pair).iter().enumerate().map(|(i, r)| r * r / (n - (i + 1) as f64)).sum::<f64>();
    let (test, df) = match pair {
        Pair::P11 => (TestId::Q11, rset.m as i64 - adjust as i64),
        Pair::P22 => (TestId::Q22, rset.m as i64),
        Pair::P12 => (TestId::Q12, rset.m as i64),
        Pair::P21 => (TestId::Q21, rset.m as i64),
    };
    TestResult::new(test, rset.m, stat, df, false)
}

fn wl_from(fitted: &FittedModel, rset: &CorrelationSet, options: &BatteryOptions) -> Result<TestResult> {
    let m = rset.m;
    let s2 = rset.sigma2();
    let tau = options.eigen_threshold;
    let (b2, low) = covariance_block(&x_block(fitted, Pair::P22, m)?, &fitted.sigma_inv, 0.5 / s2, tau)?;
    let first = rset.n as f64 * rset.r11.iter().map(|r| r * r).sum::<f64>();
    let (second, dropped) = quadratic(rset.n, &b2, &rset.r22, tau)?;
    let df = 2 * m as i64 - options.adjust(fitted) as i64;
    TestResult::new(TestId::WL, m, first + second, df, low || dropped || fitted.sigma_regularized)
}

/// `WL = n (R̂₁₁', R̂₂₂') blockdiag(I, I - X₂₂Σ̂⁻¹X₂₂'/(2σ²))⁻¹ (R̂₁₁, R̂₂₂)` with
/// `2m - (p+q)` degrees of freedom.
pub fn wl_statistic(fitted: &FittedModel, m: usize, options: &BatteryOptions) -> Result<TestResult> {
    let rset = CorrelationSet::compute(&fitted.xi, m, options.scaling)?;
    wl_from(fitted, &rset, options)
}

fn c_from(
    fitted: &FittedModel,
    raw: &CorrelationSet,
    omega: &OmegaMatrix,
    standardized: bool,
    options: &BatteryOptions,
) -> Result<TestResult> {
    let owned;
    let rset = if standardized {
        owned = raw.standardize();
        &owned
    } else {
        raw
    };
    let mut stat = 0.0;
    let mut dropped = false;
    for (block, pair) in omega.blocks.iter().zip([Pair::P11, Pair::P22, omega.pair]) {
        let (q, r) = quadratic(rset.n, block, rset.get(pair), options.eigen_threshold)?;
        stat += q;
        dropped |= r;
    }
    let test = match (omega.pair, standardized) {
        (Pair::P12, false) => TestId::Cdot12,
        (Pair::P21, false) => TestId::Cdot21,
        (Pair::P12, true) => TestId::C12,
        _ => TestId::C21,
    };
    let df = 3 * raw.m as i64 - options.adjust(fitted) as i64;
    TestResult::new(test, raw.m, stat, df, omega.regularized || dropped)
}

/// `Ċ_rs` (raw correlations) or `C_rs` (standardized correlations):
/// `n R' Ω̂_rs⁻¹ R` with `R = (R₁₁, R₂₂, R_rs)` and `3m - (p+q)` degrees of
/// freedom.
pub fn c_statistic(
    fitted: &FittedModel,
    pair: Pair,
    m: usize,
    standardized: bool,
    options: &BatteryOptions,
) -> Result<TestResult> {
    let rset = CorrelationSet::compute(&fitted.xi, m, options.scaling)?;
    let omega = omega_matrix(fitted, pair, m, options)?;
    c_from(fitted, &rset, &omega, standardized, options)
}

/// Every requested test at every requested lag, ordered by lag (as given)
/// and then by test (as given). One correlation set is computed per lag.
pub fn run_battery(
    fitted: &FittedModel,
    lags: &[usize],
    tests: &[TestId],
    options: &BatteryOptions,
) -> Result<Vec<TestResult>> {
    let mut out = Vec::with_capacity(lags.len() * tests.len());
    for &m in lags {
        check_lag(fitted, m)?;
        let rset = CorrelationSet::compute(&fitted.xi, m, options.scaling)?;
        let mut omegas: [Option<OmegaMatrix>; 2] = [None, None];
        for &test in tests {
            let result = match test {
                TestId::Q11 | TestId::Q22 | TestId::Q12 | TestId::Q21 => {
                    let pair = test.pair().expect("Q tests have a pair");
                    q_statistic(&rset, pair, options.adjust(fitted))?
                }
                TestId::WL => wl_from(fitted, &rset, options)?,
                TestId::Cdot12 | TestId::Cdot21 | TestId::C12 | TestId::C21 => {
                    let pair = test.pair().expect("C tests have a pair");
                    let slot = usize::from(pair == Pair::P21);
                    if omegas[slot].is_none() {
                        omegas[slot] = Some(omega_matrix(fitted, pair, m, options)?);
                    }
                    let omega = omegas[slot].as_ref().expect("filled above");
                    c_from(fitted, &rset, omega, matches!(test, TestId::C12 | TestId::C21), options)?
                }
            };
            out.push(result);
        }
    }
    Ok(out)
}

/// Parses a comma-separated list of test names; `all` selects every test.
pub fn parse_tests(list: &str) -> Result<Vec<TestId>> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(TestId::ALL.to_vec());
    }
    let tests = list.split(',').filter(|s| !s.trim().is_empty()).map(TestId::from_str).collect::<Result<Vec<_>>>()?;
    if tests.is_empty() {
        return Err(Error::config("empty test list"));
    }
    Ok(tests)
}
