//! Hardy constants of weighted means.
//!
//! For a mean `M` and weights `lambda` the Hardy constant is the least `C`
//! with `sum lambda_n M(x_1..x_n; lambda_1..lambda_n) <= C sum lambda_n x_n`.
//! Closed forms live here; the finite-section search is in [`finite`] and the
//! limit formulas in [`limits`].

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{HardyError, Result};
use crate::json::{ext, serialize_ext};
use crate::rational;
use crate::weights::{neumaier, Divergence, WeightSeq};

pub mod finite;
pub(crate) mod kernel;
pub mod limits;

pub use finite::{finite_lower_bound, finite_sweep, hardy_ratio, OptimizerConfig};
pub use limits::{default_y_grid, geometric_probe, kedlaya_estimate, nonweighted_limit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Exact,
    LowerBound,
    UpperBound,
    LimitApprox,
}

/// A value of a Hardy constant (or an approximation of it) plus provenance.
#[derive(Debug, Clone, Serialize)]
pub struct HardyEstimate {
    pub schema: &'static str,
    #[serde(serialize_with = "serialize_ext")]
    pub value: f64,
    pub direction: Direction,
    #[serde(rename = "N")]
    pub n: usize,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    pub diagnostics: BTreeMap<String, Value>,
}

impl HardyEstimate {
    pub(crate) fn new(value: f64, direction: Direction, n: usize, method: &str) -> Self {
        HardyEstimate {
            schema: crate::SCHEMA,
            value,
            direction,
            n,
            method: method.into(),
            witness: None,
            diagnostics: BTreeMap::new(),
        }
    }

    pub(crate) fn diag(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.into(), v.into());
        self
    }

    pub fn warning(&self) -> Option<&str> {
        self.diagnostics.get("warning").and_then(Value::as_str)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("estimate serializes")
    }
}

/// `C(p) = (1 - p)^(-1/p)`, the Hardy constant of the power mean `P_p` for
/// unit weights, extended by `C(0) = e`, `C(-inf) = 1` and `C(p) = +inf` for
/// `p >= 1`.
pub fn copson_constant(p: f64) -> f64 {
    if p.is_nan() {
        f64::NAN
    } else if p >= 1.0 {
        f64::INFINITY
    } else if p == f64::NEG_INFINITY {
        1.0
    } else if p == 0.0 {
        std::f64::consts::E
    } else if p.abs() < 1e-4 {
        (-(-p).ln_1p() / p).exp()
    } else {
        (1.0 - p).powf(-1.0 / p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithmeticMode {
    /// `sum_{m <= N} lambda_m / Lambda_m` as a lower bound.
    Partial,
    /// The full series, when a tail bound or a divergence proof exists.
    Certified,
}

/// Largest `N` for which the partial sum is also reported as an exact rational.
const EXACT_REPORT_LIMIT: usize = 256;

/// Hardy constant of the arithmetic mean, `sum_m lambda_m / Lambda_m`.
///
/// Certified mode returns `+inf` when the partial sums of `w` provably diverge
/// and the truncated sum (with a bound on the remainder) when a tail bound
/// for `w` is known. The remainder is at most `tail_bound(N) / Lambda_N`.
pub fn arithmetic_hardy(w: &WeightSeq, n: usize, mode: ArithmeticMode) -> Result<HardyEstimate> {
    arithmetic_estimate(w, n, mode, true)
}

/// As [`arithmetic_hardy`]; `report_exact` controls the rational
/// `exact_partial_sum` diagnostic, which dominates the cost for small N.
pub(crate) fn arithmetic_estimate(
    w: &WeightSeq,
    n: usize,
    mode: ArithmeticMode,
    report_exact: bool,
) -> Result<HardyEstimate> {
    if n == 0 {
        return Err(HardyError::Parameter("N must be >= 1".into()));
    }
    let terms = w.terms(n)?;
    let sums = w.partial_sums(n);
    let partial = neumaier(terms.iter().zip(&sums).map(|(a, b)| a / b));
    let exact = (report_exact && w.is_exact() && n <= EXACT_REPORT_LIMIT)
        .then(|| exact_arithmetic_sum(w, n));
    let with_exact = |mut e: HardyEstimate| {
        if let Some(v) = &exact {
            e = e.diag("exact_partial_sum", rational::render(v));
        }
        e
    };
    let divergence = w.divergence();
    let est = match mode {
        ArithmeticMode::Partial => {
            HardyEstimate::new(partial, Direction::LowerBound, n, "arithmetic-partial")
                .diag("divergence", json!(divergence))
        }
        ArithmeticMode::Certified => match (&divergence, w.tail_bound(n)) {
            (Divergence::Diverges(_), _) => {
                HardyEstimate::new(f64::INFINITY, Direction::Exact, n, "arithmetic-closed-form")
                    .diag("partial_sum", ext(partial))
                    .diag("divergence", json!(divergence))
            }
            (_, Some(tail)) => {
                HardyEstimate::new(partial, Direction::Exact, n, "arithmetic-closed-form")
                    .diag("tail_bound", ext(tail))
                    .diag("truncation_error_bound", ext(tail / sums[n - 1]))
                    .diag("divergence", json!(divergence))
            }
            _ => {
                return Err(HardyError::Inconclusive(format!(
                    "no tail bound and no divergence proof for {}",
                    w.descriptor()
                )))
            }
        },
    };
    Ok(with_exact(est))
}

/// `sum_{m <= n} lambda_m / Lambda_m` in exact arithmetic.
pub fn exact_arithmetic_sum(w: &WeightSeq, n: usize) -> BigRational {
    let mut total = BigRational::zero();
    let mut cum = BigRational::zero();
    for m in 1..=n {
        let t = w.term_exact(m).expect("exact sequence");
        cum += &t;
        total += t / &cum;
    }
    total
}
