use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Null-hypothesis model: ARMA(p, q) mean with optional intercept and a
/// GARCH(b, a) variance (`a = 0` gives ARCH(b), `b = a = 0` a constant
/// variance `σ²`).
///
/// Parameters are laid out as `[c] φ₁..φ_p θ₁..θ_q` followed by either
/// `ω α₁..α_b β₁..β_a` or `σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelSpec {
    #[cfg_attr(feature = "serde", serde(default))]
    pub intercept: bool,
    #[cfg_attr(feature = "serde", serde(default))]
    pub ar: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub ma: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub arch: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub garch: usize,
}

impl ModelSpec {
    pub fn arma(p: usize, q: usize) -> Self {
        Self { ar: p, ma: q, ..Self::default() }
    }

    pub fn garch(b: usize, a: usize) -> Self {
        Self { arch: b, garch: a, ..Self::default() }
    }

    pub fn with_intercept(mut self) -> Self {
        self.intercept = true;
        self
    }

    pub fn with_garch(mut self, b: usize, a: usize) -> Self {
        self.arch = b;
        self.garch = a;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.arch == 0 && self.garch > 0 {
            return Err(Error::domain("GARCH(0, a) with a > 0 is not identified"));
        }
        Ok(())
    }

    pub fn has_variance_model(&self) -> bool {
        self.arch > 0
    }

    /// `p + q`, the order count that reduces portmanteau degrees of freedom.
    pub fn arma_order(&self) -> usize {
        self.ar + self.ma
    }

    pub fn n_mean(&self) -> usize {
        usize::from(self.intercept) + self.ar + self.ma
    }

    pub fn n_params(&self) -> usize {
        self.n_mean() + if self.has_variance_model() { 1 + self.arch + self.garch } else { 1 }
    }

    pub(crate) fn ar_range(&self) -> Range<usize> {
        let s = usize::from(self.intercept);
        s..s + self.ar
    }

    pub(crate) fn ma_range(&self) -> Range<usize> {
        let s = usize::from(self.intercept) + self.ar;
        s..s + self.ma
    }

    /// Index of `ω` (or of `σ²` for constant variance).
    pub(crate) fn scale_index(&self) -> usize {
        self.n_mean()
    }

    pub(crate) fn alpha_range(&self) -> Range<usize> {
        let s = self.n_mean() + 1;
        s..s + self.arch
    }

    pub(crate) fn beta_range(&self) -> Range<usize> {
        let s = self.n_mean() + 1 + self.arch;
        s..s + self.garch
    }

    /// Human-readable parameter names in layout order.
    pub fn param_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.n_params());
        if self.intercept {
            names.push("const".into());
        }
        names.extend((1..=self.ar).map(|i| format!("ar{i}")));
        names.extend((1..=self.ma).map(|i| format!("ma{i}")));
        if self.has_variance_model() {
            names.push("omega".into());
            names.extend((1..=self.arch).map(|i| format!("alpha{i}")));
            names.extend((1..=self.garch).map(|i| format!("beta{i}")));
        } else {
            names.push("sigma2".into());
        }
        names
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.intercept {
            parts.push("const".into());
        }
        match (self.ar, self.ma) {
            (0, 0) => {}
            (p, 0) => parts.push(format!("ar({p})")),
            (0, q) => parts.push(format!("ma({q})")),
            (p, q) => parts.push(format!("arma({p},{q})")),
        }
        match (self.arch, self.garch) {
            (0, _) => {}
            (b, 0) => parts.push(format!("arch({b})")),
            (b, a) => parts.push(format!("garch({b},{a})")),
        }
        if parts.is_empty() {
            parts.push("none".into());
        }
        f.write_str(&parts.join("+"))
    }
}

fn parse_args(s: &str, name: &str) -> Option<Vec<usize>> {
    let inner = s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    inner.split(',').map(|a| a.trim().parse().ok()).collect()
}

impl FromStr for ModelSpec {
    type Err = Error;

    /// Parses `+`-joined terms: `const`, `none`, `ar(p)`, `ma(q)`,
    /// `arma(p,q)`, `arch(b)`, `garch(b,a)`.
    fn from_str(s: &str) -> Result<Self> {
        let mut spec = ModelSpec::default();
        let bad = |t: &str| Error::domain(format!("cannot parse model term '{t}'"));
        for term in s.split('+') {
            let t: String = term.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
            if t == "const" || t == "c" {
                spec.intercept = true;
            } else if t == "none" {
            } else if let Some(a) = parse_args(&t, "arma") {
                let [p, q] = a[..] else { return Err(bad(&t)) };
                spec.ar = p;
                spec.ma = q;
            } else if let Some(a) = parse_args(&t, "ar") {
                let [p] = a[..] else { return Err(bad(&t)) };
                spec.ar = p;
            } else if let Some(a) = parse_args(&t, "ma") {
                let [q] = a[..] else { return Err(bad(&t)) };
                spec.ma = q;
            } else if let Some(a) = parse_args(&t, "garch") {
                let [b, g] = a[..] else { return Err(bad(&t)) };
                spec.arch = b;
                spec.garch = g;
            } else if let Some(a) = parse_args(&t, "arch") {
                let [b] = a[..] else { return Err(bad(&t)) };
                spec.arch = b;
            } else {
                return Err(bad(&t));
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}
