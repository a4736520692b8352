use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::filter::{check_theta, run, second_moment, Pass};
use super::optimize::bfgs;
use super::transform::{boundary_mask, jacobian, to_theta, to_unconstrained};
use super::ModelSpec;
use crate::arma_poly;
use crate::error::{Error, Result};
use crate::numeric::{sym_inverse, sym_solve, Matrix};
use crate::series::TimeSeries;

/// Quasi-maximum likelihood fit and everything the portmanteau statistics
/// need from it.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub spec: ModelSpec,
    pub theta: Vec<f64>,
    pub eps: Vec<f64>,
    pub h: Vec<f64>,
    pub xi: Vec<f64>,
    pub loglik: f64,
    /// Σ̂, the average conditional information per observation.
    pub sigma: Matrix,
    /// Σ̂⁻¹.
    pub sigma_inv: Matrix,
    /// Set when Σ̂ had to be ridge-regularized before inversion.
    pub sigma_regularized: bool,
    /// `∂μ_t/∂θ`, `n × ℓ`.
    pub dmu: Matrix,
    /// `∂h_t/∂θ`, `n × ℓ`.
    pub dh: Matrix,
    /// `∂ℓ/∂θ` at `theta`.
    pub score: Vec<f64>,
    /// Score test passed (ignoring coordinates pinned at a constraint).
    pub converged: bool,
    pub at_boundary: bool,
    pub iterations: usize,
}

impl FittedModel {
    /// Evaluates every fitted quantity at a given admissible `theta` without
    /// optimizing. `converged` reports whether `theta` passes the score test.
    pub fn evaluate(spec: &ModelSpec, theta: &[f64], series: &TimeSeries) -> Result<FittedModel> {
        let pass = run(spec, theta, series.values(), true)?;
        let mask = mask_for(spec, theta);
        Ok(assemble(spec, theta.to_vec(), pass, &mask, 0))
    }

    pub fn n(&self) -> usize {
        self.eps.len()
    }

    /// `‖∂ℓ/∂θ‖∞`.
    pub fn gradient_norm(&self) -> f64 {
        self.score.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Score tolerance `1e-5 · max(1, |ℓ|) / n`.
pub fn score_tolerance(loglik: f64, n: usize) -> f64 {
    1e-5 * loglik.abs().max(1.0) / n as f64
}

fn passes_score_test(score: &[f64], mask: &[bool], loglik: f64, n: usize) -> bool {
    let tol = score_tolerance(loglik, n);
    score.iter().zip(mask).all(|(g, pinned)| *pinned || g.abs() <= tol)
}

fn assemble(spec: &ModelSpec, theta: Vec<f64>, pass: Pass, mask: &[bool], iterations: usize) -> FittedModel {
    let score = pass.score();
    let n = pass.eps.len();
    let converged = passes_score_test(&score, mask, pass.loglik, n);
    let at_boundary = mask.iter().any(|m| *m);
    let (dmu, dh) = pass.derivatives.clone().expect("derivatives");
    let sigma = information_from(&pass.h, &dmu, &dh);
    let inv = sym_inverse(&sigma).expect("information matrix is symmetric by construction");
    let filtered = pass.into_filtered();
    FittedModel {
        spec: *spec,
        theta,
        eps: filtered.eps,
        h: filtered.h,
        xi: filtered.xi,
        loglik: filtered.loglik,
        sigma,
        sigma_inv: inv.solution,
        sigma_regularized: inv.regularized,
        dmu,
        dh,
        score,
        converged,
        at_boundary,
        iterations,
    }
}

/// `Σ̂ = n⁻¹ Σ_t [½ h_t⁻² ∂h_t ∂h_t' + h_t⁻¹ ∂μ_t ∂μ_t']`.
pub fn information_matrix(fitted: &FittedModel) -> Matrix {
    information_from(&fitted.h, &fitted.dmu, &fitted.dh)
}

fn information_from(h: &[f64], dmu: &Matrix, dh: &Matrix) -> Matrix {
    let n = h.len();
    let l = dmu.cols();
    let mut acc = Matrix::zeros(l, l);
    for t in 0..n {
        let (wv, wm) = (0.5 / (h[t] * h[t]), 1.0 / h[t]);
        let (rh, rm) = (dh.row(t), dmu.row(t));
        for i in 0..l {
            for j in 0..=i {
                acc[(i, j)] += wv * rh[i] * rh[j] + wm * rm[i] * rm[j];
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    for i in 0..l {
        for j in 0..=i {
            let v = acc[(i, j)] * inv_n;
            acc[(i, j)] = v;
            acc[(j, i)] = v;
        }
    }
    acc
}

/// Options for [`fit_qmle`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub max_iter: usize,
    /// Starting point in θ; heuristics are used when absent.
    pub start: Option<Vec<f64>>,
    /// Retry from alternative GARCH starting points when the first run fails
    /// the score test.
    pub restarts: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_iter: 400, start: None, restarts: true }
    }
}

/// Maximizes the Gaussian quasi-log-likelihood over the admissible set.
pub fn fit_qmle(spec: &ModelSpec, series: &TimeSeries, options: &FitOptions) -> Result<FittedModel> {
    spec.validate()?;
    let n = series.len();
    let l = spec.n_params();
    if n < 10 * l {
        return Err(Error::domain(alloc::format!("{n} observations are too few for {l} parameters")));
    }
    if options.start.is_none() && spec.ma == 0 && !spec.has_variance_model() {
        if let Some(fit) = least_squares_ar(spec, series) {
            return Ok(fit);
        }
    }
    let starts: Vec<Vec<f64>> = match &options.start {
        Some(s) => {
            check_theta(spec, s)?;
            vec![s.clone()]
        }
        None => starting_points(spec, series.values()),
    };
    let mut best: Option<FittedModel> = None;
    for (i, start) in starts.iter().enumerate() {
        if i > 0 && !options.restarts {
            break;
        }
        let Some(fit) = optimize_from(spec, series, start, options.max_iter) else {
            continue;
        };
        let better = match &best {
            None => true,
            Some(b) => (fit.converged && !b.converged) || (fit.converged == b.converged && fit.loglik > b.loglik),
        };
        if better {
            best = Some(fit);
        }
        if best.as_ref().is_some_and(|b| b.converged) {
            break;
        }
    }
    best.ok_or_else(|| Error::domain("no admissible starting point produced a finite likelihood"))
}

/// With constant variance and zero presample, the AR likelihood is maximized
/// by ordinary least squares whenever the solution is stationary.
fn least_squares_ar(spec: &ModelSpec, series: &TimeSeries) -> Option<FittedModel> {
    let z = series.values();
    let n = z.len();
    let mut cols: Vec<Vec<f64>> = Vec::new();
    if spec.intercept {
        cols.push(vec![1.0; n]);
    }
    cols.extend((1..=spec.ar).map(|k| lagged(z, k)));
    let mut theta = ols(z, &cols)?;
    let off = usize::from(spec.intercept);
    if !arma_poly::is_stationary(&theta[off..]) {
        return None;
    }
    let rss: f64 = (0..n)
        .map(|t| {
            let fit: f64 = cols.iter().zip(&theta).map(|(c, b)| c[t] * b).sum();
            (z[t] - fit).powi(2)
        })
        .sum();
    theta.push(rss / n as f64);
    let fit = FittedModel::evaluate(spec, &theta, series).ok()?;
    fit.converged.then_some(fit)
}

/// `(u, score, loglik)` of one objective evaluation.
type CachedScore = (Vec<f64>, Vec<f64>, f64);

fn optimize_from(spec: &ModelSpec, series: &TimeSeries, start: &[f64], max_iter: usize) -> Option<FittedModel> {
    let z = series.values();
    let n = z.len() as f64;
    let u0 = to_unconstrained(spec, start)?;
    // Score of the most recent evaluation, keyed by its u.
    let last: RefCell<Option<CachedScore>> = RefCell::new(None);
    let objective = |u: &[f64]| -> Option<(f64, Vec<f64>)> {
        let theta = to_theta(spec, u);
        let pass = run(spec, &theta, z, true).ok()?;
        let score = pass.score();
        let jac = jacobian(spec, u);
        let l = u.len();
        let grad: Vec<f64> = (0..l).map(|k| -(0..l).map(|i| jac[(i, k)] * score[i]).sum::<f64>() / n).collect();
        *last.borrow_mut() = Some((u.to_vec(), score, pass.loglik));
        Some((-pass.loglik / n, grad))
    };
    let done = |u: &[f64], _f: f64, _g: &[f64]| -> bool {
        let cache = last.borrow();
        let Some((cu, score, loglik)) = cache.as_ref() else { return false };
        if cu.as_slice() != u {
            return false;
        }
        let theta = to_theta(spec, u);
        let mask = boundary_mask(spec, u, &theta);
        passes_score_test(score, &mask, *loglik, z.len())
    };
    let out = bfgs(objective, u0, max_iter, done)?;
    let mut theta = to_theta(spec, &out.x);
    let mut mask = boundary_mask(spec, &out.x, &theta);
    let mut pass = run(spec, &theta, z, true).ok()?;
    if !passes_score_test(&pass.score(), &mask, pass.loglik, z.len()) {
        if let Some((t, p, m)) = polish(spec, z, theta.clone()) {
            theta = t;
            pass = p;
            mask = m;
        }
    }
    Some(assemble(spec, theta, pass, &mask, out.iterations))
}

fn mask_for(spec: &ModelSpec, theta: &[f64]) -> Vec<bool> {
    match to_unconstrained(spec, theta) {
        Some(u) => boundary_mask(spec, &u, theta),
        None => vec![true; theta.len()],
    }
}

/// Fisher-scoring steps on the free coordinates with step halving. GARCH
/// coefficients that would turn negative are set to zero and pinned.
fn polish(spec: &ModelSpec, z: &[f64], mut theta: Vec<f64>) -> Option<(Vec<f64>, Pass, Vec<bool>)> {
    let n = z.len() as f64;
    let mut pass = run(spec, &theta, z, true).ok()?;
    let mut mask = mask_for(spec, &theta);
    let nonneg = spec.alpha_range().start..spec.beta_range().end;
    for _ in 0..25 {
        let score = pass.score();
        if passes_score_test(&score, &mask, pass.loglik, z.len()) {
            return Some((theta, pass, mask));
        }
        let free: Vec<usize> = (0..theta.len()).filter(|k| !mask[*k]).collect();
        if free.is_empty() {
            return None;
        }
        let (dmu, dh) = pass.derivatives.as_ref()?;
        let info = information_from(&pass.h, dmu, dh);
        let sub = Matrix::from_fn(free.len(), free.len(), |i, j| info[(free[i], free[j])] * n);
        let rhs = Matrix::from_fn(free.len(), 1, |i, _| score[free[i]]);
        let step = sym_solve(&sub, &rhs).ok()?.solution;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let mut cand = theta.clone();
            for (i, &k) in free.iter().enumerate() {
                cand[k] += scale * step[(i, 0)];
                if nonneg.contains(&k) && cand[k] < 0.0 {
                    cand[k] = 0.0;
                }
            }
            if let Ok(p) = run(spec, &cand, z, true) {
                if p.loglik >= pass.loglik - 1e-12 * pass.loglik.abs() {
                    mask = mask_for(spec, &cand);
                    theta = cand;
                    pass = p;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    passes_score_test(&pass.score(), &mask, pass.loglik, z.len()).then_some((theta, pass, mask))
}

fn ols(y: &[f64], cols: &[Vec<f64>]) -> Option<Vec<f64>> {
    let k = cols.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let xtx = Matrix::from_fn(k, k, |i, j| cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum());
    let xty = Matrix::from_fn(k, 1, |i, _| cols[i].iter().zip(y).map(|(a, b)| a * b).sum());
    let sol = sym_solve(&xtx, &xty).ok()?;
    Some((0..k).map(|i| sol.solution[(i, 0)]).collect())
}

fn lagged(x: &[f64], k: usize) -> Vec<f64> {
    (0..x.len()).map(|t| if t >= k { x[t - k] } else { 0.0 }).collect()
}

/// Shrinks a polynomial toward zero until it is strictly inside the
/// stationarity region.
fn shrink_into_region(coefs: &mut [f64]) {
    for _ in 0..60 {
        if arma_poly::is_stationary(coefs) {
            if let Some(p) = arma_poly::ar_to_pacf(coefs) {
                if p.iter().all(|r| r.abs() < 0.98) {
                    return;
                }
            }
        }
        coefs.iter_mut().for_each(|c| *c *= 0.8);
    }
    coefs.iter_mut().for_each(|c| *c = 0.0);
}

/// Conditional least squares (Hannan-Rissanen for MA terms) for the mean,
/// then variance starts scaled to the residual variance.
fn starting_points(spec: &ModelSpec, z: &[f64]) -> Vec<Vec<f64>> {
    let n = z.len();
    let mut mean = Vec::with_capacity(spec.n_mean());
    let mut resid_proxy: Option<Vec<f64>> = None;
    if spec.ma > 0 {
        let long = (spec.ar + spec.ma + 4).max(((n as f64).ln() * 2.0) as usize).min(n / 4).max(1);
        let mut cols: Vec<Vec<f64>> = Vec::new();
        if spec.intercept {
            cols.push(vec![1.0; n]);
        }
        cols.extend((1..=long).map(|k| lagged(z, k)));
        if let Some(b) = ols(z, &cols) {
            let fitted: Vec<f64> = (0..n).map(|t| cols.iter().zip(&b).map(|(c, bk)| c[t] * bk).sum()).collect();
            resid_proxy = Some(z.iter().zip(&fitted).map(|(a, f)| a - f).collect());
        }
    }
    let mut cols: Vec<Vec<f64>> = Vec::new();
    if spec.intercept {
        cols.push(vec![1.0; n]);
    }
    cols.extend((1..=spec.ar).map(|k| lagged(z, k)));
    if spec.ma > 0 {
        let e = resid_proxy.clone().unwrap_or_else(|| z.to_vec());
        cols.extend((1..=spec.ma).map(|k| lagged(&e, k)));
    }
    let beta = ols(z, &cols).unwrap_or_else(|| vec![0.0; cols.len()]);
    mean.extend_from_slice(&beta);
    let off = usize::from(spec.intercept);
    shrink_into_region(&mut mean[off..off + spec.ar]);
    {
        let ma = &mut mean[off + spec.ar..];
        let mut neg: Vec<f64> = ma.iter().map(|t| -t).collect();
        shrink_into_region(&mut neg);
        for (dst, v) in ma.iter_mut().zip(neg) {
            *dst = -v;
        }
    }
    // Residual variance at the mean start.
    let mut probe = mean.clone();
    probe.push(1.0);
    let probe_spec = ModelSpec { arch: 0, garch: 0, ..*spec };
    let var = match run(&probe_spec, &probe, z, false) {
        Ok(p) => p.eps.iter().map(|e| e * e).sum::<f64>() / n as f64,
        Err(_) => second_moment(z),
    }
    .max(1e-8);

    if !spec.has_variance_model() {
        let mut theta = mean;
        theta.push(var);
        return vec![theta];
    }
    let candidates: &[(f64, f64)] = if spec.garch > 0 {
        &[(0.1, 0.8), (0.2, 0.5), (0.05, 0.9), (0.4, 0.2)]
    } else {
        &[(0.2, 0.0), (0.5, 0.0), (0.05, 0.0)]
    };
    candidates
        .iter()
        .map(|&(a_tot, b_tot)| {
            let mut theta = mean.clone();
            let persistence = a_tot + b_tot;
            theta.push(var * (1.0 - persistence));
            theta.extend((0..spec.arch).map(|_| a_tot / spec.arch as f64));
            theta.extend((0..spec.garch).map(|_| b_tot / spec.garch as f64));
            theta
        })
        .collect()
}

/// Result of [`select_order_bic`].
#[derive(Debug, Clone)]
pub struct BicSelection {
    pub order: usize,
    /// BIC per candidate order; `None` where the fit failed.
    pub bic: Vec<Option<f64>>,
    pub fitted: FittedModel,
}

/// Largest candidate AR order, `⌊8 (n/100)^{1/4}⌋`.
pub fn max_bic_order(n: usize) -> usize {
    (8.0 * (n as f64 / 100.0).powf(0.25) + 1e-12).floor() as usize
}

/// Fits AR(p) with intercept and constant variance for `p = 0..=max_bic_order(n)`
/// and returns the BIC minimizer (smallest `p` on ties).
pub fn select_order_bic(series: &TimeSeries) -> Result<BicSelection> {
    let n = series.len();
    if n < 20 {
        return Err(Error::domain("BIC order selection needs at least 20 observations"));
    }
    let max_p = max_bic_order(n);
    let mut bic = Vec::with_capacity(max_p + 1);
    let mut best: Option<(usize, f64, FittedModel)> = None;
    for p in 0..=max_p {
        let spec = ModelSpec::arma(p, 0).with_intercept();
        if n < 10 * spec.n_params() {
            bic.push(None);
            continue;
        }
        match fit_qmle(&spec, series, &FitOptions::default()) {
            Ok(fit) if fit.converged => {
                let value = -2.0 * fit.loglik + spec.n_params() as f64 * (n as f64).ln();
                bic.push(Some(value));
                if best.as_ref().is_none_or(|(_, b, _)| value < *b) {
                    best = Some((p, value, fit));
                }
            }
            _ => bic.push(None),
        }
    }
    let (order, _, fitted) = best.ok_or_else(|| Error::Selection("every candidate AR fit failed".into()))?;
    Ok(BicSelection { order, bic, fitted })
}
