//! The weighted-mean abstraction.
//!
//! A weighted mean maps a vector of positive points together with a vector of
//! strictly positive weights to a single point. Points are always `f64`;
//! weights carry exact rationals so that identities about weights
//! (nullhomogeneity, reduction, partition coarsening) can be checked exactly.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{HardyError, Result};
use crate::families::{self, Generator};
use crate::rational;

/// Capability claims about a mean. Each `true` flag is verified empirically by
/// [`crate::axioms::check_axioms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct MeanFlags {
    pub symmetric: bool,
    pub monotone: bool,
    pub concave: bool,
    pub homogeneous: bool,
    pub continuous_in_weights: bool,
}

impl MeanFlags {
    pub const fn all() -> Self {
        MeanFlags {
            symmetric: true,
            monotone: true,
            concave: true,
            homogeneous: true,
            continuous_in_weights: true,
        }
    }
}

/// Anything that behaves like a weighted mean. [`MeanSpec`] is the main
/// implementor; the trait exists so that checks can be run against arbitrary
/// (including deliberately broken) means.
pub trait WeightedMean: Send + Sync {
    fn label(&self) -> String;

    fn flags(&self) -> MeanFlags;

    /// Evaluates on already validated input: equal nonzero lengths, strictly
    /// positive finite points and weights.
    fn eval_unchecked(&self, x: &[f64], w: &[f64]) -> Result<f64>;
}

#[derive(Clone)]
pub enum MeanFamily {
    /// Power mean with exponent in the extended reals.
    Power(f64),
    Quasiarithmetic(Generator),
}

#[derive(Clone)]
pub struct MeanSpec {
    family: MeanFamily,
    flags: MeanFlags,
}

impl MeanSpec {
    /// Power mean `P_p`, `p` in `[-inf, +inf]`. Flags follow the family:
    /// always symmetric, monotone and homogeneous; concave iff `p <= 1`;
    /// continuous in the weights iff `p` is finite.
    pub fn power(p: f64) -> Result<Self> {
        if p.is_nan() {
            return Err(HardyError::Parameter("power exponent is NaN".into()));
        }
        Ok(MeanSpec {
            family: MeanFamily::Power(p),
            flags: MeanFlags {
                symmetric: true,
                monotone: true,
                concave: p <= 1.0,
                homogeneous: true,
                continuous_in_weights: p.is_finite(),
            },
        })
    }

    pub fn arithmetic() -> Self {
        Self::power(1.0).expect("p = 1 is valid")
    }

    pub fn geometric() -> Self {
        Self::power(0.0).expect("p = 0 is valid")
    }

    /// Quasi-arithmetic mean generated by `g`, with user-declared flags.
    /// Symmetry and monotonicity hold for every strictly monotone generator.
    pub fn quasiarithmetic(g: Generator, flags: MeanFlags) -> Self {
        MeanSpec {
            family: MeanFamily::Quasiarithmetic(g),
            flags,
        }
    }

    pub fn family(&self) -> &MeanFamily {
        &self.family
    }

    /// The power exponent, if this is a power mean.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.family {
            MeanFamily::Power(p) => Some(p),
            MeanFamily::Quasiarithmetic(_) => None,
        }
    }

    pub fn with_flags(mut self, flags: MeanFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn is_arithmetic(&self) -> bool {
        self.power_exponent() == Some(1.0)
    }
}

impl WeightedMean for MeanSpec {
    fn label(&self) -> String {
        self.to_string()
    }

    fn flags(&self) -> MeanFlags {
        self.flags
    }

    fn eval_unchecked(&self, x: &[f64], w: &[f64]) -> Result<f64> {
        match &self.family {
            MeanFamily::Power(p) => Ok(families::power_mean_raw(*p, x, w)),
            MeanFamily::Quasiarithmetic(g) => families::quasiarithmetic_raw(g, x, w),
        }
    }
}

impl fmt::Debug for MeanSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeanSpec")
            .field("descriptor", &self.to_string())
            .field("flags", &self.flags)
            .finish()
    }
}

impl fmt::Display for MeanSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            MeanFamily::Power(p) if *p == f64::INFINITY => write!(f, "power:inf"),
            MeanFamily::Power(p) if *p == f64::NEG_INFINITY => write!(f, "power:-inf"),
            MeanFamily::Power(p) => write!(f, "power:{p}"),
            MeanFamily::Quasiarithmetic(g) => write!(f, "quasiarithmetic:{}", g.name()),
        }
    }
}

/// Parses `power:P` (`P` a float, `p/q`, `inf` or `-inf`), `quasiarithmetic:G`
/// (see [`Generator::parse`]) and the aliases `arithmetic`, `geometric`,
/// `harmonic`, `min`, `max`.
impl FromStr for MeanSpec {
    type Err = HardyError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "arithmetic" => return Ok(Self::arithmetic()),
            "geometric" => return Ok(Self::geometric()),
            "harmonic" => return Self::power(-1.0),
            "min" => return Self::power(f64::NEG_INFINITY),
            "max" => return Self::power(f64::INFINITY),
            _ => {}
        }
        let (family, param) = s
            .split_once(':')
            .ok_or_else(|| HardyError::descriptor(s, "expected FAMILY:PARAM"))?;
        match family {
            "power" => {
                let p = rational::parse_number(param)
                    .map_err(|_| HardyError::descriptor(s, "bad exponent"))?;
                Self::power(p)
            }
            "quasiarithmetic" => {
                let (g, flags) = Generator::parse(param).map_err(|e| match e {
                    HardyError::Descriptor { reason, .. } => HardyError::descriptor(s, reason),
                    other => other,
                })?;
                Ok(Self::quasiarithmetic(g, flags))
            }
            _ => Err(HardyError::descriptor(s, "unknown mean family")),
        }
    }
}

/// A finite vector of strictly positive, finite points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointVector(Vec<f64>);

impl PointVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(HardyError::Empty);
        }
        if let Some((index, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(HardyError::NonPositive {
                index,
                value: v.to_string(),
            });
        }
        Ok(PointVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NumberMode {
    ExactRational,
    Float,
}

/// A finite vector of strictly positive weights.
///
/// Entries are stored as exact rationals in both modes; float weights are
/// converted losslessly. The mode records whether exactness is meaningful,
/// which matters for checks that refuse float input.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    entries: Vec<BigRational>,
    mode: NumberMode,
}

impl WeightVector {
    pub fn from_rationals(entries: Vec<BigRational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(HardyError::Empty);
        }
        if let Some((index, v)) = entries.iter().enumerate().find(|(_, v)| !v.is_positive()) {
            return Err(HardyError::NonPositive {
                index,
                value: rational::render(v),
            });
        }
        Ok(WeightVector {
            entries,
            mode: NumberMode::ExactRational,
        })
    }

    pub fn from_ints(entries: &[i64]) -> Result<Self> {
        Self::from_rationals(entries.iter().map(|&v| rational::int(v)).collect())
    }

    pub fn from_f64(entries: &[f64]) -> Result<Self> {
        if entries.is_empty() {
            return Err(HardyError::Empty);
        }
        let mut out = Vec::with_capacity(entries.len());
        for (index, &v) in entries.iter().enumerate() {
            match rational::from_f64(v) {
                Some(r) if v.is_finite() && v > 0.0 => out.push(r),
                _ => {
                    return Err(HardyError::NonPositive {
                        index,
                        value: v.to_string(),
                    })
                }
            }
        }
        Ok(WeightVector {
            entries: out,
            mode: NumberMode::Float,
        })
    }

    /// Parses a comma-separated list of `p/q` literals.
    pub fn parse(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(rational::parse_rational)
            .collect::<Result<Vec<_>>>()?;
        Self::from_rationals(entries)
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn mode(&self) -> NumberMode {
        self.mode
    }

    pub fn is_exact(&self) -> bool {
        self.mode == NumberMode::ExactRational
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> BigRational {
        self.entries
            .iter()
            .fold(BigRational::zero(), |acc, v| acc + v)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(rational::to_f64).collect()
    }

    /// Weights divided by their total, computed exactly and then rounded.
    /// Scaling the vector by any positive factor leaves this bit-identical.
    pub fn normalized_f64(&self) -> Vec<f64> {
        let total = self.total();
        self.entries
            .iter()
            .map(|v| rational::to_f64(&(v / &total)))
            .collect()
    }

    pub fn scaled(&self, t: &BigRational) -> Result<Self> {
        if !t.is_positive() {
            return Err(HardyError::Parameter(
                "scale factor must be positive".into(),
            ));
        }
        Ok(WeightVector {
            entries: self.entries.iter().map(|v| v * t).collect(),
            mode: self.mode,
        })
    }

    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(HardyError::Parameter(format!(
                "prefix length {n} out of range"
            )));
        }
        Ok(WeightVector {
            entries: self.entries[..n].to_vec(),
            mode: self.mode,
        })
    }

    pub fn render(&self) -> Vec<String> {
        self.entries.iter().map(rational::render).collect()
    }
}

impl Serialize for WeightVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.mode {
            NumberMode::ExactRational => self.render().serialize(s),
            NumberMode::Float => self.to_f64().serialize(s),
        }
    }
}

/// `M(x, w)`. Weights are normalized exactly before evaluation, so the result
/// is invariant under scaling `w` by any positive rational.
pub fn evaluate<M: WeightedMean + ?Sized>(
    mean: &M,
    x: &PointVector,
    w: &WeightVector,
) -> Result<f64> {
    if x.len() != w.len() {
        return Err(HardyError::LengthMismatch {
            left: x.len(),
            right: w.len(),
        });
    }
    mean.eval_unchecked(x.as_slice(), &w.normalized_f64())
}

/// `M(x, w)` on raw slices, validating the kernel preconditions.
pub fn evaluate_f64<M: WeightedMean + ?Sized>(mean: &M, x: &[f64], w: &[f64]) -> Result<f64> {
    if x.len() != w.len() {
        return Err(HardyError::LengthMismatch {
            left: x.len(),
            right: w.len(),
        });
    }
    if x.is_empty() {
        return Err(HardyError::Empty);
    }
    for (index, v) in x.iter().chain(w.iter()).enumerate() {
        if !(v.is_finite() && *v > 0.0) {
            return Err(HardyError::NonPositive {
                index: index % x.len(),
                value: v.to_string(),
            });
        }
    }
    mean.eval_unchecked(x, w)
}

/// The shuffle operator: `(p1, q1, p2, q2, ..., pn, qn)`.
pub fn shuffle<T: Clone>(p: &[T], q: &[T]) -> Result<Vec<T>> {
    if p.len() != q.len() {
        return Err(HardyError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(p.iter()
        .zip(q)
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .collect())
}
