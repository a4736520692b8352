use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};

/// Deterministic random stream keyed by `(seed, stream_id)`.
///
/// Two streams built from the same key produce identical draws regardless of
/// which thread consumes them.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// `n` i.i.d. draws with mean 0 and variance 1 from `law`.
    pub fn draw(&mut self, law: &InnovationLaw, n: usize) -> Result<Vec<f64>> {
        law.validate()?;
        let mut out = Vec::with_capacity(n);
        match *law {
            InnovationLaw::StandardNormal => {
                out.extend((0..n).map(|_| -> f64 { StandardNormal.sample(&mut self.rng) }));
            }
            InnovationLaw::StudentT { df } => {
                let dist = StudentT::new(df).map_err(|_| Error::domain("invalid Student-t degrees of freedom"))?;
                let scale = ((df - 2.0) / df).sqrt();
                out.extend((0..n).map(|_| scale * dist.sample(&mut self.rng)));
            }
            InnovationLaw::SkewNormal { shape } => {
                let delta = shape / (1.0 + shape * shape).sqrt();
                let tail = (1.0 - delta * delta).sqrt();
                let mean = delta * (2.0 / core::f64::consts::PI).sqrt();
                let sd = (1.0 - 2.0 * delta * delta / core::f64::consts::PI).sqrt();
                for _ in 0..n {
                    let u0: f64 = StandardNormal.sample(&mut self.rng);
                    let u1: f64 = StandardNormal.sample(&mut self.rng);
                    let x = delta * u0.abs() + tail * u1;
                    out.push((x - mean) / sd);
                }
            }
        }
        Ok(out)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Innovation distributions, all standardized to mean 0 and variance 1.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "law", rename_all = "kebab-case"))]
pub enum InnovationLaw {
    #[default]
    StandardNormal,
    /// Student-t with `df` degrees of freedom rescaled by `sqrt((df-2)/df)`.
    StudentT { df: f64 },
    /// Azzalini skew-normal with shape `shape`, centred and scaled.
    SkewNormal { shape: f64 },
}

impl InnovationLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InnovationLaw::StandardNormal => Ok(()),
            InnovationLaw::StudentT { df } if df > 4.0 && df.is_finite() => Ok(()),
            InnovationLaw::StudentT { .. } => Err(Error::domain(
                "Student-t innovations need more than 4 degrees of freedom (finite fourth moment)",
            )),
            InnovationLaw::SkewNormal { shape } if shape.is_finite() => Ok(()),
            InnovationLaw::SkewNormal { .. } => Err(Error::domain("skew-normal shape must be finite")),
        }
    }

    /// `E(ξ^4) - 1` of the standardized law.
    pub fn fourth_moment_minus_one(&self) -> f64 {
        match *self {
            InnovationLaw::StandardNormal => 2.0,
            InnovationLaw::StudentT { df } => 3.0 * (df - 2.0) / (df - 4.0) - 1.0,
            InnovationLaw::SkewNormal { shape } => {
                let pi = core::f64::consts::PI;
                let delta = shape / (1.0 + shape * shape).sqrt();
                let b = (2.0 / pi).sqrt();
                let excess = 2.0 * (pi - 3.0) * (delta * b).powi(4) / (1.0 - 2.0 * delta * delta / pi).powi(2);
                2.0 + excess
            }
        }
    }
}

impl fmt::Display for InnovationLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InnovationLaw::StandardNormal => f.write_str("normal"),
            InnovationLaw::StudentT { df } => write!(f, "t({df})"),
            InnovationLaw::SkewNormal { shape } => write!(f, "skew-normal({shape})"),
        }
    }
}

impl FromStr for InnovationLaw {
    type Err = Error;

    /// Parses `normal`, `t(df)` or `skew-normal(shape)`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
        let arg = |name: &str| -> Option<f64> { t.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?.parse().ok() };
        let law = if t == "normal" || t == "gaussian" {
            InnovationLaw::StandardNormal
        } else if let Some(df) = arg("t") {
            InnovationLaw::StudentT { df }
        } else if let Some(shape) = arg("skew-normal") {
            InnovationLaw::SkewNormal { shape }
        } else {
            return Err(Error::domain(format!("cannot parse innovation law '{s}'; use normal, t(df) or skew-normal(shape)")));
        };
        law.validate()?;
        Ok(law)
    }
}
