//! Reproductions and sweeps built on the Hardy-constant estimators.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{argmin, CheckReport, CheckWitness, Verdict};
use crate::error::{HardyError, Result};
use crate::hardy::{
    arithmetic_estimate, copson_constant, finite_lower_bound, ArithmeticMode, OptimizerConfig,
};
use crate::json::serialize_ext;
use crate::mean::{MeanSpec, WeightedMean};
use crate::rational::{self, ratio};
use crate::weights::WeightSeq;

#[derive(Debug, Clone, Serialize)]
pub struct LscRow {
    pub k: usize,
    pub value: f64,
}

/// Arithmetic Hardy constants of the dyadic weights with the `k`-th term
/// replaced by `1`. These converge pointwise to the dyadic weights while
/// their constants converge to `E + 1/2`, strictly above `E`.
#[derive(Debug, Clone, Serialize)]
pub struct LscTable {
    pub schema: &'static str,
    pub rows: Vec<LscRow>,
    /// The constant of the dyadic weights, `E`.
    pub baseline: f64,
    /// `E + 1/2`.
    pub limit: f64,
    pub tolerance: f64,
    /// `|value(kmax) - limit|`.
    pub limit_error: f64,
    /// Smallest value over the trailing half `k >= kmax/2`, standing in for
    /// the liminf.
    pub tail_min: f64,
    /// Rows whose value is below the baseline.
    pub below_baseline: Vec<usize>,
    pub pass: bool,
}

impl LscTable {
    pub fn csv_rows(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.rows.iter().map(|r| (r.k, r.value))
    }
}

/// Builds the table for `k = 1..=kmax` with truncation `n > kmax`. Passes when
/// the last value is within `tol` of `E + 1/2` and the trailing values stay
/// at or above `E` (the lower-semicontinuity direction).
pub fn reproduce_lsc_example(kmax: usize, n: usize, tol: f64) -> Result<LscTable> {
    if kmax == 0 {
        return Err(HardyError::Parameter("kmax must be >= 1".into()));
    }
    if n <= kmax {
        return Err(HardyError::Parameter(format!(
            "N = {n} must exceed kmax = {kmax}"
        )));
    }
    let baseline =
        arithmetic_estimate(&WeightSeq::dyadic(), n, ArithmeticMode::Certified, false)?.value;
    let rows = (1..=kmax)
        .map(|k| {
            let psi = WeightSeq::perturbed_dyadic(k as u64)?;
            Ok(LscRow {
                k,
                value: arithmetic_estimate(&psi, n, ArithmeticMode::Certified, false)?.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let limit = baseline + 0.5;
    let limit_error = (rows[kmax - 1].value - limit).abs();
    let tail_min = rows[(kmax - 1) / 2..]
        .iter()
        .map(|r| r.value)
        .fold(f64::INFINITY, f64::min);
    let below_baseline = rows
        .iter()
        .filter(|r| r.value < baseline)
        .map(|r| r.k)
        .collect();
    Ok(LscTable {
        schema: crate::SCHEMA,
        pass: limit_error <= tol && tail_min >= baseline,
        rows,
        baseline,
        limit,
        tolerance: tol,
        limit_error,
        tail_min,
        below_baseline,
    })
}

/// Finite-section lower bounds of a power mean `P_p` under random rational
/// weights never exceed its unit-weight constant `C(p)` (plus `tol`).
pub fn mu1_sweep(
    mean: &MeanSpec,
    instances: usize,
    n: usize,
    seed: u64,
    tol: f64,
    opt: &OptimizerConfig,
) -> Result<CheckReport> {
    let p = mean.power_exponent().ok_or_else(|| {
        HardyError::Parameter("the unit-weight constant is known only for power means".into())
    })?;
    let f = mean.flags();
    if !(f.symmetric && f.monotone) {
        return Err(HardyError::Hypothesis(format!(
            "{} is not declared symmetric and monotone",
            mean.label()
        )));
    }
    let bound = copson_constant(p);
    let weights: Vec<Vec<BigRational>> = (0..instances)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            (0..n)
                .map(|_| ratio(rng.gen_range(1..=20), rng.gen_range(1..=10)))
                .collect()
        })
        .collect();
    let estimates = weights
        .par_iter()
        .map(|w| {
            let seq = WeightSeq::periodic(w.clone())?;
            finite_lower_bound(mean, &seq, n, opt)
        })
        .collect::<Result<Vec<_>>>()?;
    let margins: Vec<f64> = estimates.iter().map(|e| bound - e.value).collect();
    let worst = argmin(&margins).unwrap_or(0);
    let failures = margins.iter().filter(|m| **m < -tol).count();
    let verdict = if failures == 0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let mut rep = CheckReport::new(
        "mu1-sweep",
        verdict,
        instances,
        margins.get(worst).copied().unwrap_or(f64::INFINITY),
    )
    .detail("mean", mean.label())
    .detail("bound", crate::json::ext(bound))
    .detail("N", n)
    .detail("seed", seed)
    .detail("tolerance", tol)
    .detail("failures", failures)
    .detail(
        "values",
        json!(estimates.iter().map(|e| e.value).collect::<Vec<_>>()),
    );
    if let Some(e) = estimates.get(worst) {
        rep.witness = Some(CheckWitness {
            x: e.witness.clone().unwrap_or_default(),
            weights: weights[worst].iter().map(rational::render).collect(),
            extra: Default::default(),
        });
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityRow {
    pub t: f64,
    #[serde(serialize_with = "serialize_ext")]
    pub value: f64,
}

/// Finite-section lower bounds along the pointwise perturbation
/// `lambda_k -> lambda_k + t`. Informational only: there is nothing to pass.
pub fn explore_continuity(
    mean: &MeanSpec,
    base: &WeightSeq,
    k: usize,
    ts: &[f64],
    n: usize,
    opt: &OptimizerConfig,
) -> Result<Vec<ContinuityRow>> {
    if k == 0 || k > n {
        return Err(HardyError::Parameter(format!(
            "perturbed index must lie in 1..={n}"
        )));
    }
    if let Some(t) = ts
        .iter()
        .find(|t| !(t.is_finite() && base.term(k) + **t > 0.0))
    {
        return Err(HardyError::Parameter(format!(
            "perturbation {t} makes lambda_{k} nonpositive"
        )));
    }
    ts.iter()
        .map(|&t| {
            let b = base.clone();
            let w = WeightSeq::from_fn(format!("{}+{t}e{k}", base.descriptor()), move |j| {
                let v = b.term(j as usize);
                if j as usize == k {
                    v + t
                } else {
                    v
                }
            });
            Ok(ContinuityRow {
                t,
                value: finite_lower_bound(mean, &w, n, opt)?.value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: f64 = 1.606_695_152_415_291_8;

    #[test]
    fn lsc_values() {
        let t = reproduce_lsc_example(20, 200, 1e-4).unwrap();
        assert!((t.baseline - E).abs() < 1e-12);
        assert!((t.rows[19].value - (E + 0.5)).abs() < 1e-4);
        assert!(t.pass);
        // k = 1: 1 + sum_{m>=2} 2^-m / (3/2 - 2^-m).
        let k1 = 1.0
            + (2..200)
                .map(|m| 0.5f64.powi(m) / (1.5 - 0.5f64.powi(m)))
                .sum::<f64>();
        assert!((t.rows[0].value - k1).abs() < 1e-12);
        assert!((k1 - 1.3766).abs() < 1e-4);
        // Only the first perturbation drops below E.
        assert_eq!(t.below_baseline, vec![1]);
        assert!(reproduce_lsc_example(5, 5, 1e-3).is_err());
        assert!(reproduce_lsc_example(0, 5, 1e-3).is_err());
    }

    #[test]
    fn mu1_small_sweep() {
        let rep = mu1_sweep(
            &MeanSpec::power(0.5).unwrap(),
            4,
            32,
            1,
            1e-3,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert!(rep.pass);
        assert!(rep.worst_margin > 0.0);
        assert!(mu1_sweep(
            &"quasiarithmetic:exp".parse().unwrap(),
            1,
            4,
            0,
            1e-3,
            &OptimizerConfig::default()
        )
        .is_err());
    }

    #[test]
    fn continuity_rows() {
        let rows = explore_continuity(
            &MeanSpec::arithmetic(),
            &WeightSeq::ones(),
            2,
            &[0.0, 0.5, 1.0],
            8,
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        let h8: f64 = (1..=8).map(|k| 1.0 / k as f64).sum();
        assert!((rows[0].value - h8).abs() < 1e-6);
        assert!(explore_continuity(
            &MeanSpec::arithmetic(),
            &WeightSeq::ones(),
            2,
            &[-2.0],
            8,
            &OptimizerConfig::default()
        )
        .is_err());
    }
}
