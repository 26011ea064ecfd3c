//! Infinite positive weight sequences.
//!
//! A [`WeightSeq`] is lazy: terms and partial sums are produced on demand.
//! Built-in sequences know closed forms for their exact partial sums, their
//! tail mass and whether the partial sums diverge. Float partial sums are
//! accumulated once (compensated) and cached.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{HardyError, Result};
use crate::mean::NumberMode;
use crate::rational::{self, int, powi};

/// Consecutive block sizes for partition coarsening: the listed sizes first,
/// then `tail` forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Blocks {
    head: Vec<usize>,
    tail: usize,
}

impl Blocks {
    /// Listed sizes, then blocks of size one.
    pub fn list(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(HardyError::Parameter("block list is empty".into()));
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(HardyError::EmptyBlock(i + 1));
        }
        Ok(Blocks {
            head: sizes,
            tail: 1,
        })
    }

    /// Every block has size `r`.
    pub fn uniform(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(HardyError::EmptyBlock(1));
        }
        Ok(Blocks {
            head: Vec::new(),
            tail: r,
        })
    }

    /// A bare number means uniform blocks; a comma list means those sizes
    /// followed by ones.
    pub fn parse(s: &str) -> Result<Self> {
        let sizes = s
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| {
                    HardyError::descriptor(s, "block sizes must be nonnegative integers")
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if sizes.len() == 1 {
            Self::uniform(sizes[0])
        } else {
            Self::list(sizes)
        }
    }

    pub fn size(&self, k: usize) -> usize {
        self.head.get(k - 1).copied().unwrap_or(self.tail)
    }

    /// `n_k`: index of the last base term in block `k` (`n_0 = 0`).
    pub fn boundary(&self, k: usize) -> usize {
        let listed = k.min(self.head.len());
        self.head[..listed].iter().sum::<usize>() + (k - listed) * self.tail
    }
}

impl fmt::Display for Blocks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.head.is_empty() {
            write!(f, "{}", self.tail)
        } else {
            let list: Vec<String> = self.head.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", list.join(","))
        }
    }
}

/// Whether the partial sums diverge, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "justification", rename_all = "snake_case")]
pub enum Divergence {
    Diverges(String),
    Converges(String),
    Inconclusive(String),
}

impl Divergence {
    pub fn diverges(&self) -> bool {
        matches!(self, Divergence::Diverges(_))
    }

    pub fn converges(&self) -> bool {
        matches!(self, Divergence::Converges(_))
    }
}

type TermFn = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

enum Kind {
    Ones,
    Dyadic,
    Geometric(BigRational, NumberMode),
    PerturbedDyadic(u64),
    Power { alpha: f64, exact: Option<i64> },
    Periodic(Vec<BigRational>, NumberMode),
    Coarsened { base: WeightSeq, blocks: Blocks },
    Custom { label: String, f: TermFn },
}

#[derive(Default)]
struct SumCache {
    sums: Vec<f64>,
    running: f64,
    compensation: f64,
}

/// A positive weight sequence `lambda_1, lambda_2, ...` (1-based).
#[derive(Clone)]
pub struct WeightSeq {
    kind: Arc<Kind>,
    cache: Arc<Mutex<SumCache>>,
}

impl fmt::Debug for WeightSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightSeq({})", self.descriptor())
    }
}

impl fmt::Display for WeightSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

fn half_pow(n: u64) -> BigRational {
    powi(&rational::ratio(1, 2), n as i64)
}

impl WeightSeq {
    fn from_kind(kind: Kind) -> Self {
        WeightSeq {
            kind: Arc::new(kind),
            cache: Arc::new(Mutex::new(SumCache::default())),
        }
    }

    /// The all-ones sequence.
    pub fn ones() -> Self {
        Self::from_kind(Kind::Ones)
    }

    /// `2^-n`.
    pub fn dyadic() -> Self {
        Self::from_kind(Kind::Dyadic)
    }

    /// `q^n`, `q > 0`.
    pub fn geometric(q: BigRational) -> Result<Self> {
        if !q.is_positive() {
            return Err(HardyError::Parameter(
                "geometric ratio must be positive".into(),
            ));
        }
        Ok(Self::from_kind(Kind::Geometric(
            q,
            NumberMode::ExactRational,
        )))
    }

    pub fn geometric_f64(q: f64) -> Result<Self> {
        let r = rational::from_f64(q)
            .filter(|_| q > 0.0 && q.is_finite())
            .ok_or_else(|| HardyError::Parameter("geometric ratio must be positive".into()))?;
        Ok(Self::from_kind(Kind::Geometric(r, NumberMode::Float)))
    }

    /// `2^-n` with the `k`-th term replaced by `1`.
    pub fn perturbed_dyadic(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(HardyError::Parameter(
                "perturbation index must be >= 1".into(),
            ));
        }
        Ok(Self::from_kind(Kind::PerturbedDyadic(k)))
    }

    /// `n^alpha`; exact when `alpha` is an integer.
    pub fn power(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(HardyError::Parameter(
                "power exponent must be finite".into(),
            ));
        }
        let exact = (alpha.fract() == 0.0 && alpha.abs() <= 64.0).then_some(alpha as i64);
        Ok(Self::from_kind(Kind::Power { alpha, exact }))
    }

    /// The finite block repeated forever.
    pub fn periodic(block: Vec<BigRational>) -> Result<Self> {
        Self::periodic_with_mode(block, NumberMode::ExactRational)
    }

    pub fn periodic_f64(block: &[f64]) -> Result<Self> {
        let block = block
            .iter()
            .map(|&v| rational::from_f64(v).filter(|_| v.is_finite()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| HardyError::Parameter("non-finite periodic weight".into()))?;
        Self::periodic_with_mode(block, NumberMode::Float)
    }

    fn periodic_with_mode(block: Vec<BigRational>, mode: NumberMode) -> Result<Self> {
        if block.is_empty() {
            return Err(HardyError::Empty);
        }
        if let Some((index, v)) = block.iter().enumerate().find(|(_, v)| !v.is_positive()) {
            return Err(HardyError::NonPositive {
                index,
                value: rational::render(v),
            });
        }
        Ok(Self::from_kind(Kind::Periodic(block, mode)))
    }

    /// A float sequence given by a closure. Nothing is known about its tail.
    pub fn from_fn(
        label: impl Into<String>,
        f: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::from_kind(Kind::Custom {
            label: label.into(),
            f: Arc::new(f),
        })
    }

    pub fn descriptor(&self) -> String {
        match &*self.kind {
            Kind::Ones => "ones".into(),
            Kind::Dyadic => "dyadic".into(),
            Kind::Geometric(q, NumberMode::ExactRational) => format!("geometric:{}", short(q)),
            Kind::Geometric(q, NumberMode::Float) => format!("geometric:{}", rational::to_f64(q)),
            Kind::PerturbedDyadic(k) => format!("perturbed-dyadic:{k}"),
            Kind::Power { alpha, .. } => format!("power:{alpha}"),
            Kind::Periodic(b, mode) => {
                let items: Vec<String> = match mode {
                    NumberMode::ExactRational => b.iter().map(short).collect(),
                    NumberMode::Float => {
                        b.iter().map(|v| rational::to_f64(v).to_string()).collect()
                    }
                };
                format!("periodic:{}", items.join(","))
            }
            Kind::Coarsened { base, blocks } => {
                format!("coarsen({};{})", base.descriptor(), blocks)
            }
            Kind::Custom { label, .. } => format!("custom:{label}"),
        }
    }

    pub fn mode(&self) -> NumberMode {
        match &*self.kind {
            Kind::Ones | Kind::Dyadic | Kind::PerturbedDyadic(_) => NumberMode::ExactRational,
            Kind::Geometric(_, m) | Kind::Periodic(_, m) => *m,
            Kind::Power { exact, .. } => {
                if exact.is_some() {
                    NumberMode::ExactRational
                } else {
                    NumberMode::Float
                }
            }
            Kind::Coarsened { base, .. } => base.mode(),
            Kind::Custom { .. } => NumberMode::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.mode() == NumberMode::ExactRational
    }

    /// `lambda_n` as a float, `n >= 1`.
    pub fn term(&self, n: usize) -> f64 {
        assert!(n >= 1, "weight sequences are 1-based");
        match &*self.kind {
            Kind::Ones => 1.0,
            Kind::Dyadic => 0.5f64.powi(n as i32),
            Kind::Geometric(q, _) => rational::to_f64(q).powi(n as i32),
            Kind::PerturbedDyadic(k) => {
                if n as u64 == *k {
                    1.0
                } else {
                    0.5f64.powi(n as i32)
                }
            }
            Kind::Power { alpha, .. } => (n as f64).powf(*alpha),
            Kind::Periodic(b, _) => rational::to_f64(&b[(n - 1) % b.len()]),
            Kind::Coarsened { base, blocks } => {
                let (lo, hi) = (blocks.boundary(n - 1), blocks.boundary(n));
                neumaier((lo + 1..=hi).map(|j| base.term(j)))
            }
            Kind::Custom { f, .. } => f(n as u64),
        }
    }

    /// `ln lambda_n`, exact in form for the geometric families so that
    /// tiny terms keep their magnitude.
    pub fn ln_term(&self, n: usize) -> f64 {
        match &*self.kind {
            Kind::Dyadic => -(n as f64) * std::f64::consts::LN_2,
            Kind::Geometric(q, _) => n as f64 * rational::to_f64(q).ln(),
            Kind::PerturbedDyadic(k) if n as u64 != *k => -(n as f64) * std::f64::consts::LN_2,
            _ => self.term(n).ln(),
        }
    }

    /// The first `n` terms, validated to be positive and finite.
    pub fn terms(&self, n: usize) -> Result<Vec<f64>> {
        (1..=n)
            .map(|j| {
                let v = self.term(j);
                if v.is_finite() && v > 0.0 {
                    Ok(v)
                } else {
                    Err(HardyError::NonPositive {
                        index: j,
                        value: v.to_string(),
                    })
                }
            })
            .collect()
    }

    /// `Lambda_n` as a float (`Lambda_0 = 0`).
    pub fn partial_sum(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.fill_cache(n);
        self.cache.lock().unwrap().sums[n - 1]
    }

    /// `Lambda_1, ..., Lambda_n`.
    pub fn partial_sums(&self, n: usize) -> Vec<f64> {
        self.fill_cache(n);
        self.cache.lock().unwrap().sums[..n].to_vec()
    }

    fn fill_cache(&self, n: usize) {
        let mut c = self.cache.lock().unwrap();
        while c.sums.len() < n {
            let v = self.term(c.sums.len() + 1);
            let t = c.running + v;
            if c.running.abs() >= v.abs() {
                c.compensation += (c.running - t) + v;
            } else {
                c.compensation += (v - t) + c.running;
            }
            c.running = t;
            let total = c.running + c.compensation;
            c.sums.push(total);
        }
    }

    /// `lambda_n` exactly, when the sequence is in exact mode.
    pub fn term_exact(&self, n: usize) -> Option<BigRational> {
        if !self.is_exact() {
            return None;
        }
        Some(match &*self.kind {
            Kind::Ones => BigRational::one(),
            Kind::Dyadic => half_pow(n as u64),
            Kind::Geometric(q, _) => powi(q, n as i64),
            Kind::PerturbedDyadic(k) => {
                if n as u64 == *k {
                    BigRational::one()
                } else {
                    half_pow(n as u64)
                }
            }
            Kind::Power { exact, .. } => powi(&int(n as i64), exact.expect("exact mode")),
            Kind::Periodic(b, _) => b[(n - 1) % b.len()].clone(),
            Kind::Coarsened { base, blocks } => {
                let (lo, hi) = (blocks.boundary(n - 1), blocks.boundary(n));
                (lo + 1..=hi)
                    .map(|j| base.term_exact(j).expect("exact base"))
                    .sum()
            }
            Kind::Custom { .. } => unreachable!("custom sequences are float"),
        })
    }

    /// `Lambda_n` exactly, from the closed form where one exists.
    pub fn partial_sum_exact(&self, n: usize) -> Option<BigRational> {
        if !self.is_exact() {
            return None;
        }
        if n == 0 {
            return Some(BigRational::zero());
        }
        Some(match &*self.kind {
            Kind::Ones => int(n as i64),
            Kind::Dyadic => BigRational::one() - half_pow(n as u64),
            Kind::Geometric(q, _) => {
                if q.is_one() {
                    int(n as i64)
                } else {
                    q * (BigRational::one() - powi(q, n as i64)) / (BigRational::one() - q)
                }
            }
            Kind::PerturbedDyadic(k) => {
                let mut s = BigRational::one() - half_pow(n as u64);
                if n as u64 >= *k {
                    s += BigRational::one() - half_pow(*k);
                }
                s
            }
            Kind::Power { .. } => (1..=n).map(|j| self.term_exact(j).unwrap()).sum(),
            Kind::Periodic(b, _) => {
                let full = int((n / b.len()) as i64) * b.iter().sum::<BigRational>();
                full + b[..n % b.len()].iter().sum::<BigRational>()
            }
            Kind::Coarsened { base, blocks } => base.partial_sum_exact(blocks.boundary(n))?,
            Kind::Custom { .. } => unreachable!("custom sequences are float"),
        })
    }

    /// The first `n` terms as exact rationals.
    pub fn exact_prefix(&self, n: usize) -> Result<Vec<BigRational>> {
        if !self.is_exact() {
            return Err(HardyError::ExactRequired);
        }
        Ok((1..=n).map(|j| self.term_exact(j).unwrap()).collect())
    }

    /// An upper bound on `sum_{m > n} lambda_m`, when one is known.
    pub fn tail_bound(&self, n: usize) -> Option<f64> {
        match &*self.kind {
            Kind::Dyadic => Some(0.5f64.powi(n as i32)),
            Kind::Geometric(q, _) => {
                let q = rational::to_f64(q);
                (q < 1.0).then(|| q.powi(n as i32 + 1) / (1.0 - q))
            }
            Kind::PerturbedDyadic(k) => {
                let t = 0.5f64.powi(n as i32);
                Some(if n as u64 >= *k {
                    t
                } else {
                    t - 0.5f64.powi(*k as i32) + 1.0
                })
            }
            // Integral comparison, valid from n = 1; the first term is 1.
            Kind::Power { alpha, .. } if *alpha < -1.0 => Some(if n == 0 {
                1.0 + 1.0 / (-alpha - 1.0)
            } else {
                (n as f64).powf(alpha + 1.0) / (-alpha - 1.0)
            }),
            Kind::Coarsened { base, blocks } => base.tail_bound(blocks.boundary(n)),
            _ => None,
        }
    }

    /// [`Self::tail_bound`] as an exact rational, for exact sequences.
    pub fn tail_bound_exact(&self, n: usize) -> Option<BigRational> {
        if !self.is_exact() {
            return None;
        }
        match &*self.kind {
            Kind::Dyadic => Some(half_pow(n as u64)),
            Kind::Geometric(q, _) if *q < BigRational::one() => {
                Some(powi(q, n as i64 + 1) / (BigRational::one() - q))
            }
            Kind::PerturbedDyadic(k) => {
                let t = half_pow(n as u64);
                Some(if n as u64 >= *k {
                    t
                } else {
                    t - half_pow(*k) + BigRational::one()
                })
            }
            Kind::Power { exact: Some(a), .. } if *a < -1 => Some(if n == 0 {
                BigRational::one() + BigRational::one() / int(-a - 1)
            } else {
                powi(&int(n as i64), a + 1) / int(-a - 1)
            }),
            Kind::Coarsened { base, blocks } => base.tail_bound_exact(blocks.boundary(n)),
            _ => None,
        }
    }

    /// Divergence of `Lambda_n`, decided from closed-form knowledge only.
    pub fn divergence(&self) -> Divergence {
        use Divergence::*;
        match &*self.kind {
            Kind::Ones => Diverges("Lambda_n = n".into()),
            Kind::Dyadic => Converges("Lambda_n = 1 - 2^-n".into()),
            Kind::Geometric(q, _) => {
                if *q >= BigRational::one() {
                    Diverges("geometric ratio >= 1".into())
                } else {
                    Converges("geometric series with ratio < 1".into())
                }
            }
            Kind::PerturbedDyadic(_) => Converges("dyadic series plus one term".into()),
            Kind::Power { alpha, .. } => {
                if *alpha >= -1.0 {
                    Diverges("p-series with exponent >= -1".into())
                } else {
                    Converges("p-series with exponent < -1".into())
                }
            }
            Kind::Periodic(..) => Diverges("periodic positive terms".into()),
            Kind::Coarsened { base, .. } => match base.divergence() {
                Diverges(r) => Diverges(format!(
                    "partial sums are a subsequence of a divergent sequence ({r})"
                )),
                Converges(r) => Converges(format!(
                    "partial sums are a subsequence of a convergent sequence ({r})"
                )),
                other => other,
            },
            Kind::Custom { .. } => Inconclusive("finite data cannot decide divergence".into()),
        }
    }

    /// `lim lambda_n / Lambda_n` when known in closed form.
    pub fn ratio_limit(&self) -> Option<f64> {
        match &*self.kind {
            Kind::Geometric(q, _) => {
                let q = rational::to_f64(q);
                Some(if q > 1.0 { 1.0 - 1.0 / q } else { 0.0 })
            }
            Kind::Ones
            | Kind::Dyadic
            | Kind::PerturbedDyadic(_)
            | Kind::Power { .. }
            | Kind::Periodic(..) => Some(0.0),
            Kind::Coarsened { .. } | Kind::Custom { .. } => None,
        }
    }

    /// Largest `n` for which the float path is meaningful (terms stay normal).
    pub fn float_horizon(&self) -> usize {
        match &*self.kind {
            Kind::Dyadic | Kind::PerturbedDyadic(_) => 1000,
            _ => usize::MAX,
        }
    }
}

fn short(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        rational::render(r)
    }
}

pub(crate) fn neumaier(it: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in it {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Parses a sequence descriptor. Decimal literals are rejected; use
/// [`make_sequence_float`] to accept them.
///
/// Grammar: `ones`, `dyadic`, `geometric:Q`, `perturbed-dyadic:K`,
/// `power:ALPHA`, `periodic:A,B,...`.
pub fn make_sequence(desc: &str) -> Result<WeightSeq> {
    parse_sequence(desc, false)
}

/// Like [`make_sequence`] but decimal parameters are accepted and produce
/// float-mode sequences.
pub fn make_sequence_float(desc: &str) -> Result<WeightSeq> {
    parse_sequence(desc, true)
}

fn parse_sequence(desc: &str, allow_float: bool) -> Result<WeightSeq> {
    let d = desc.trim();
    let bad = |why: &str| HardyError::descriptor(d, why);
    let exact_or_float = |s: &str| -> Result<std::result::Result<BigRational, f64>> {
        match rational::parse_rational(s) {
            Ok(r) => Ok(Ok(r)),
            Err(_) if allow_float => s
                .trim()
                .parse::<f64>()
                .map(Err)
                .map_err(|_| bad("not a number")),
            Err(_) => Err(bad(
                "decimal literal needs --float; use p/q for exact weights",
            )),
        }
    };
    let rewrap = |e: HardyError| match e {
        HardyError::Parameter(reason) | HardyError::Descriptor { reason, .. } => {
            HardyError::descriptor(d, reason)
        }
        HardyError::NonPositive { .. } | HardyError::Empty => {
            HardyError::descriptor(d, "weights must be positive")
        }
        other => other,
    };
    match d {
        "ones" => return Ok(WeightSeq::ones()),
        "dyadic" => return Ok(WeightSeq::dyadic()),
        _ => {}
    }
    let (name, param) = d.split_once(':').ok_or_else(|| bad("unknown sequence"))?;
    match name {
        "geometric" => match exact_or_float(param)? {
            Ok(q) => WeightSeq::geometric(q),
            Err(q) => WeightSeq::geometric_f64(q),
        }
        .map_err(rewrap),
        "perturbed-dyadic" => {
            let k: u64 = param
                .trim()
                .parse()
                .map_err(|_| bad("K must be a positive integer"))?;
            WeightSeq::perturbed_dyadic(k).map_err(rewrap)
        }
        "power" => {
            let alpha = match exact_or_float(param)? {
                Ok(r) if r.is_integer() => r.to_integer().to_f64().unwrap_or(f64::NAN),
                Ok(_) if !allow_float => {
                    return Err(bad(
                        "non-integer exponent gives float weights; needs --float",
                    ))
                }
                Ok(r) => rational::to_f64(&r),
                Err(v) => v,
            };
            WeightSeq::power(alpha).map_err(rewrap)
        }
        "periodic" => {
            let items = param
                .split(',')
                .map(exact_or_float)
                .collect::<Result<Vec<_>>>()?;
            if items.iter().all(|i| i.is_ok()) {
                WeightSeq::periodic(items.into_iter().map(|i| i.unwrap()).collect()).map_err(rewrap)
            } else {
                let floats: Vec<f64> = items
                    .into_iter()
                    .map(|i| i.map_or_else(|v| v, |r| rational::to_f64(&r)))
                    .collect();
                WeightSeq::periodic_f64(&floats).map_err(rewrap)
            }
        }
        _ => Err(bad("unknown sequence")),
    }
}

/// Ratio diagnostics for `lambda_n / Lambda_n`.
#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub ratios: Vec<f64>,
    pub is_nonincreasing: bool,
    pub ratio_limit_estimate: f64,
    pub max_term_ratio: f64,
    pub partial_sum_at_n: f64,
    pub divergence: Divergence,
}

/// Ratios `lambda_n / Lambda_n` up to `n`, their monotonicity, the max-term
/// ratio `max(lambda_1..lambda_n) / Lambda_n` and the divergence verdict.
/// Monotonicity is decided exactly for exact sequences with `n <= 512`.
pub fn ratio_diagnostics(w: &WeightSeq, n: usize) -> Result<RatioReport> {
    if n < 2 {
        return Err(HardyError::Parameter(
            "ratio diagnostics need N >= 2".into(),
        ));
    }
    let terms = w.terms(n)?;
    let sums = w.partial_sums(n);
    let ratios: Vec<f64> = terms.iter().zip(&sums).map(|(a, b)| a / b).collect();
    let is_nonincreasing = if w.is_exact() && n <= 512 {
        let mut sum = BigRational::zero();
        let mut prev: Option<BigRational> = None;
        let mut ok = true;
        for j in 1..=n {
            let t = w.term_exact(j).unwrap();
            sum += &t;
            let r = t / &sum;
            if let Some(p) = &prev {
                if &r > p {
                    ok = false;
                    break;
                }
            }
            prev = Some(r);
        }
        ok
    } else {
        ratios.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-12))
    };
    let max_term = terms.iter().copied().fold(0.0, f64::max);
    Ok(RatioReport {
        ratio_limit_estimate: w.ratio_limit().unwrap_or(ratios[n - 1]),
        max_term_ratio: max_term / sums[n - 1],
        partial_sum_at_n: sums[n - 1],
        divergence: w.divergence(),
        ratios,
        is_nonincreasing,
    })
}

/// `psi_k = sum of lambda_n over the k-th block`.
pub fn coarsen(w: &WeightSeq, blocks: Blocks) -> WeightSeq {
    WeightSeq::from_kind(Kind::Coarsened {
        base: w.clone(),
        blocks,
    })
}

const PREC_SCAN_BUDGET: usize = 100_000;

/// Indices `n_1 < ... < n_N` with `Psi_k = Lambda_{n_k}`, or `None` when some
/// partial sum of `psi` is not a partial sum of `lambda`. Exact comparison.
pub fn prec_boundaries(psi: &WeightSeq, lam: &WeightSeq, n: usize) -> Result<Option<Vec<usize>>> {
    if !psi.is_exact() || !lam.is_exact() {
        return Err(HardyError::ExactRequired);
    }
    let mut out = Vec::with_capacity(n);
    let mut psi_sum = BigRational::zero();
    let mut lam_sum = BigRational::zero();
    let mut j = 0usize;
    for k in 1..=n {
        psi_sum += psi.term_exact(k).unwrap();
        while lam_sum < psi_sum {
            if j >= PREC_SCAN_BUDGET {
                return Ok(None);
            }
            // Lambda_m < Lambda_j + tail for every m, so the target is out of reach.
            if let Some(tail) = lam.tail_bound_exact(j) {
                if &lam_sum + tail <= psi_sum {
                    return Ok(None);
                }
            }
            j += 1;
            lam_sum += lam.term_exact(j).unwrap();
        }
        if lam_sum != psi_sum {
            return Ok(None);
        }
        out.push(j);
    }
    Ok(Some(out))
}

/// True iff the first `n` partial sums of `psi` all occur among the partial
/// sums of `lam`. This certifies `psi ≺ lam` on the examined prefix only.
pub fn check_prec(psi: &WeightSeq, lam: &WeightSeq, n: usize) -> Result<bool> {
    if n == 0 {
        return Err(HardyError::Parameter("prefix length must be >= 1".into()));
    }
    Ok(prec_boundaries(psi, lam, n)?.is_some())
}
