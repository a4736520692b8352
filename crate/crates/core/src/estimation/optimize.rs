//! BFGS with a Wolfe line search (bracketing and zoom).

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `objective`, which returns `None` outside its domain.
/// `done(x, f, g)` is polled after each accepted step.
pub(crate) fn bfgs<F, D>(mut objective: F, x0: Vec<f64>, max_iter: usize, mut done: D) -> Option<Outcome>
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
    D: FnMut(&[f64], f64, &[f64]) -> bool,
{
    let n = x0.len();
    let (mut f, mut g) = objective(&x0)?;
    let mut x = x0;
    let mut hinv = identity(n);
    let mut fresh = true;
    let mut stalls = 0;
    for iter in 0..max_iter {
        if done(&x, f, &g) {
            return Some(Outcome { x, iterations: iter });
        }
        let mut d = matvec_neg(&hinv, &g);
        let mut slope = dot(&d, &g);
        if !(slope < 0.0) {
            hinv = identity(n);
            d = g.iter().map(|v| -v).collect();
            slope = dot(&d, &g);
            fresh = true;
        }
        if slope == 0.0 {
            return Some(Outcome { x, iterations: iter });
        }
        let init = if fresh {
            let gn = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (1.0 / gn.max(1e-12)).min(1.0)
        } else {
            1.0
        };
        let step = line_search(&mut objective, &x, f, &g, &d, init);
        let Some((alpha, fnew, gnew)) = step else {
            if fresh {
                return Some(Outcome { x, iterations: iter });
            }
            hinv = identity(n);
            fresh = true;
            continue;
        };
        let s: Vec<f64> = d.iter().map(|v| alpha * v).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let xnew: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a + b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
            if fresh {
                let scale = sy / dot(&y, &y);
                hinv = identity(n);
                hinv.iter_mut().for_each(|v| *v *= scale);
            }
            update(&mut hinv, &s, &y, sy);
            fresh = false;
        }
        if (f - fnew).abs() <= 1e-15 * f.abs().max(1.0) {
            stalls += 1;
        } else {
            stalls = 0;
        }
        x = xnew;
        f = fnew;
        g = gnew;
        if stalls >= 4 {
            let _ = done(&x, f, &g);
            return Some(Outcome { x, iterations: iter + 1 });
        }
    }
    Some(Outcome { x, iterations: max_iter })
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn matvec_neg(m: &[f64], g: &[f64]) -> Vec<f64> {
    let n = g.len();
    (0..n).map(|i| -dot(&m[i * n..(i + 1) * n], g)).collect()
}

fn update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
        }
    }
}

fn line_search<F>(objective: &mut F, x: &[f64], f0: f64, g0: &[f64], d: &[f64], init: f64) -> Option<(f64, f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    let slope0 = dot(g0, d);
    let mut eval = |a: f64| -> Option<(f64, Vec<f64>, f64)> {
        let xt: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + a * di).collect();
        let (f, g) = objective(&xt)?;
        if !f.is_finite() {
            return None;
        }
        let slope = dot(&g, d);
        Some((f, g, slope))
    };
    let mut a_prev = 0.0;
    let mut f_prev = f0;
    let mut slope_prev = slope0;
    let mut a = init;
    for i in 0..30 {
        let Some((fa, ga, sa)) = eval(a) else {
            // Outside the domain: shrink toward the last good point.
            a = a_prev + 0.25 * (a - a_prev);
            if a - a_prev < 1e-16 {
                return None;
            }
            continue;
        };
        if fa > f0 + C1 * a * slope0 || (i > 0 && fa >= f_prev) {
            return zoom(&mut eval, f0, slope0, a_prev, f_prev, slope_prev, a, fa);
        }
        if sa.abs() <= -C2 * slope0 {
            return Some((a, fa, ga));
        }
        if sa >= 0.0 {
            return zoom(&mut eval, f0, slope0, a, fa, sa, a_prev, f_prev);
        }
        a_prev = a;
        f_prev = fa;
        slope_prev = sa;
        a *= 2.0;
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn zoom<E>(
    eval: &mut E,
    f0: f64,
    slope0: f64,
    mut lo: f64,
    mut f_lo: f64,
    mut s_lo: f64,
    mut hi: f64,
    mut f_hi: f64,
) -> Option<(f64, f64, Vec<f64>)>
where
    E: FnMut(f64) -> Option<(f64, Vec<f64>, f64)>,
{
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for _ in 0..40 {
        // Quadratic interpolation from (lo, f_lo, s_lo) and (hi, f_hi), safeguarded.
        let width = hi - lo;
        let denom = 2.0 * (f_hi - f_lo - s_lo * width);
        let mut a = if denom.abs() > 0.0 { lo - s_lo * width * width / denom } else { lo + 0.5 * width };
        let (left, right) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let margin = 0.1 * (right - left);
        if !(a > left + margin && a < right - margin) {
            a = 0.5 * (lo + hi);
        }
        if (right - left) < 1e-16 * right.abs().max(1.0) {
            break;
        }
        let Some((fa, ga, sa)) = eval(a) else {
            hi = a;
            f_hi = f64::INFINITY;
            continue;
        };
        if fa > f0 + C1 * a * slope0 || fa >= f_lo {
            hi = a;
            f_hi = fa;
        } else {
            if sa.abs() <= -C2 * slope0 {
                return Some((a, fa, ga));
            }
            if sa * (hi - lo) >= 0.0 {
                hi = lo;
                f_hi = f_lo;
            }
            lo = a;
            f_lo = fa;
            s_lo = sa;
            best = Some((a, fa, ga));
        }
    }
    // Accept the best sufficient-decrease point even without the curvature condition.
    best
}
