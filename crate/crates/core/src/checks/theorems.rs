//! Checks of the comparison theorems: prefix means of the nonincreasing
//! rearrangement, monotonicity of Hardy constants along the partition order,
//! and monotonicity of integral means of nonincreasing step functions.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::rearrange::{rearrange_samesum, RearrangementResult};
use super::{argmin, CheckReport, CheckWitness, Verdict};
use crate::error::{HardyError, Result};
use crate::hardy::{finite_lower_bound, OptimizerConfig};
use crate::mean::{evaluate, MeanSpec, PointVector, WeightVector, WeightedMean};
use crate::rational::{self, ratio};
use crate::step::{integral_eval, StepFunction};
use crate::weights::{prec_boundaries, WeightSeq};

const JCIN_TOL: f64 = 1e-10;

fn require(mean: &dyn WeightedMean, monotone: bool, concave: bool) -> Result<()> {
    let f = mean.flags();
    let mut missing = Vec::new();
    if monotone && !f.monotone {
        missing.push("monotone");
    }
    if concave && !f.concave {
        missing.push("concave");
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(HardyError::Hypothesis(format!(
            "{} is not declared {}",
            mean.label(),
            missing.join(" and ")
        )))
    }
}

/// `min_n [M(y_1..y_n) - M(x_1..x_n)]` (prefix weights `w_1..w_n`) with `y`
/// the nonincreasing rearrangement, the prefix where it is attained, and the
/// rearrangement itself.
pub fn jcin_margin(
    mean: &MeanSpec,
    x: &PointVector,
    w: &WeightVector,
) -> Result<(f64, usize, RearrangementResult)> {
    let r = rearrange_samesum(x, w)?;
    let y = r.points();
    let mut margins = Vec::with_capacity(x.len());
    for n in 1..=x.len() {
        let wp = w.prefix(n)?;
        let lhs = evaluate(mean, &PointVector::new(x.as_slice()[..n].to_vec())?, &wp)?;
        let rhs = evaluate(mean, &PointVector::new(y.as_slice()[..n].to_vec())?, &wp)?;
        margins.push(rhs - lhs);
    }
    let at = argmin(&margins).expect("nonempty");
    Ok((margins[at], at + 1, r))
}

fn jcin_witness(
    x: &PointVector,
    w: &WeightVector,
    prefix: usize,
    r: &RearrangementResult,
) -> CheckWitness {
    let mut extra = BTreeMap::new();
    extra.insert("prefix".into(), json!(prefix));
    extra.insert("y".into(), json!(r.y));
    CheckWitness {
        x: x.as_slice().to_vec(),
        weights: w.render(),
        extra,
    }
}

/// Prefix means of `x` never exceed those of its nonincreasing rearrangement
/// (for monotone concave means).
pub fn verify_jcin(mean: &MeanSpec, x: &PointVector, w: &WeightVector) -> Result<CheckReport> {
    require(mean, true, true)?;
    let (margin, prefix, r) = jcin_margin(mean, x, w)?;
    let verdict = if margin >= -JCIN_TOL {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let mut rep = CheckReport::new("jcin", verdict, 1, margin)
        .detail("mean", mean.label())
        .detail("tolerance", JCIN_TOL);
    rep.witness = Some(jcin_witness(x, w, prefix, &r));
    Ok(rep)
}

/// Recomputes the margin stored in a jcin witness.
pub fn replay_jcin(mean: &MeanSpec, witness: &CheckWitness) -> Result<f64> {
    let x = PointVector::new(witness.x.clone())?;
    let w = WeightVector::from_rationals(
        witness
            .weights
            .iter()
            .map(|s| rational::parse_rational(s))
            .collect::<Result<Vec<_>>>()?,
    )?;
    Ok(jcin_margin(mean, &x, &w)?.0)
}

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub instances: usize,
    pub seed: u64,
    pub max_len: usize,
    /// Integer weights `1..=6`; otherwise `p/q` with `p <= 6`, `q <= 4`.
    pub integer_weights: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            instances: 200,
            seed: 0,
            max_len: 8,
            integer_weights: false,
        }
    }
}

fn random_instance(rng: &mut ChaCha8Rng, cfg: &SweepConfig) -> (PointVector, WeightVector) {
    let n = rng.gen_range(1..=cfg.max_len.max(1));
    let x: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(0.1f64.ln()..10f64.ln()).exp())
        .collect();
    let w: Vec<BigRational> = (0..n)
        .map(|_| {
            let p = rng.gen_range(1..=6);
            let q = if cfg.integer_weights {
                1
            } else {
                rng.gen_range(1..=4)
            };
            ratio(p, q)
        })
        .collect();
    (
        PointVector::new(x).expect("positive"),
        WeightVector::from_rationals(w).expect("positive"),
    )
}

/// Random-instance sweep of the rearrangement inequality. A mean without the
/// monotone and concave flags is searched for counterexamples: finding none
/// is reported as inconclusive, never as a pass.
pub fn jcin_sweep(mean: &MeanSpec, cfg: &SweepConfig) -> Result<CheckReport> {
    let claimed = require(mean, true, true).is_ok();
    let instances: Vec<(PointVector, WeightVector)> = (0..cfg.instances)
        .map(|i| {
            random_instance(
                &mut ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64)),
                cfg,
            )
        })
        .collect();
    let results = instances
        .par_iter()
        .map(|(x, w)| jcin_margin(mean, x, w))
        .collect::<Result<Vec<_>>>()?;
    let margins: Vec<f64> = results.iter().map(|r| r.0).collect();
    let failures = margins.iter().filter(|m| **m < -JCIN_TOL).count();
    let verdict = match (failures, claimed) {
        (0, true) => Verdict::Pass,
        (0, false) => Verdict::Inconclusive,
        _ => Verdict::Fail,
    };
    let worst = argmin(&margins).unwrap_or(0);
    let mut rep = CheckReport::new(
        "jcin",
        verdict,
        cfg.instances,
        margins.get(worst).copied().unwrap_or(0.0),
    )
    .detail("mean", mean.label())
    .detail("failures", failures)
    .detail("hypotheses_declared", claimed)
    .detail("seed", cfg.seed)
    .detail("tolerance", JCIN_TOL);
    if verdict == Verdict::Inconclusive {
        rep = rep.detail("note", "no counterexample found");
    }
    if let Some((_, prefix, r)) = results.get(worst) {
        let (x, w) = &instances[worst];
        rep.witness = Some(jcin_witness(x, w, *prefix, r));
    }
    Ok(rep)
}

pub enum CutMode {
    /// Compare the exact partial sums of `sum lambda_n / Lambda_n`.
    Arithmetic,
    /// Compare finite-section lower bounds of a monotone concave mean.
    Mean(MeanSpec, OptimizerConfig),
}

/// `H(psi) <= H(lambda)` for `psi ≺ lambda`, checked on the first `n` terms of
/// `psi` and the matched `n_n` terms of `lambda`.
pub fn verify_cut(
    mode: &CutMode,
    psi: &WeightSeq,
    lam: &WeightSeq,
    n: usize,
    tol: f64,
) -> Result<CheckReport> {
    let bounds = prec_boundaries(psi, lam, n)?.ok_or_else(|| {
        HardyError::NotPreceding(format!(
            "partial sums of {} are not partial sums of {} within the first {n} terms",
            psi.descriptor(),
            lam.descriptor()
        ))
    })?;
    match mode {
        CutMode::Arithmetic => Ok(cut_arithmetic(psi, lam, &bounds)),
        CutMode::Mean(mean, opt) => cut_mean(mean, opt, psi, lam, &bounds, tol),
    }
}

fn cut_arithmetic(psi: &WeightSeq, lam: &WeightSeq, bounds: &[usize]) -> CheckReport {
    let (mut a, mut a_cum) = (BigRational::zero(), BigRational::zero());
    let (mut b, mut b_cum) = (BigRational::zero(), BigRational::zero());
    let mut j = 0usize;
    let mut worst: Option<(BigRational, usize)> = None;
    for (m, &nm) in bounds.iter().enumerate() {
        let t = psi.term_exact(m + 1).expect("exact");
        a_cum += &t;
        a += t / &a_cum;
        while j < nm {
            j += 1;
            let t = lam.term_exact(j).expect("exact");
            b_cum += &t;
            b += t / &b_cum;
        }
        let slack = &b - &a;
        if worst.as_ref().is_none_or(|(w, _)| slack < *w) {
            worst = Some((slack, m + 1));
        }
    }
    let (slack, at) = worst.expect("n >= 1");
    let verdict = if slack >= BigRational::zero() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    CheckReport::new("cut", verdict, bounds.len(), rational::to_f64(&slack))
        .detail("mode", "arithmetic")
        .detail("psi", psi.descriptor())
        .detail("lambda", lam.descriptor())
        .detail("worst_prefix", at)
        .detail("worst_slack_exact", rational::render(&slack))
        .detail("psi_sum", rational::to_f64(&a))
        .detail("lambda_sum", rational::to_f64(&b))
        .detail("lambda_terms", j)
}

fn cut_mean(
    mean: &MeanSpec,
    opt: &OptimizerConfig,
    psi: &WeightSeq,
    lam: &WeightSeq,
    bounds: &[usize],
    tol: f64,
) -> Result<CheckReport> {
    require(mean, true, true)?;
    let n = bounds.len();
    let lo = finite_lower_bound(mean, psi, n, opt)?;
    // Spread each psi-coordinate over its block of lambda-coordinates.
    let xpsi = lo.witness.clone().expect("finite search stores a witness");
    let mut transferred = Vec::with_capacity(bounds[n - 1]);
    let mut prev = 0;
    for (k, &nk) in bounds.iter().enumerate() {
        transferred.extend(std::iter::repeat_n(xpsi[k], nk - prev));
        prev = nk;
    }
    let mut c = opt.clone();
    c.warm_starts.push(transferred);
    let hi = finite_lower_bound(mean, lam, bounds[n - 1], &c)?;
    let margin = hi.value - lo.value;
    let verdict = if margin >= -tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let mut rep = CheckReport::new("cut", verdict, 1, margin)
        .detail("mode", "mean")
        .detail("mean", mean.label())
        .detail("psi", psi.descriptor())
        .detail("lambda", lam.descriptor())
        .detail("psi_bound", lo.value)
        .detail("lambda_bound", hi.value)
        .detail("lambda_terms", bounds[n - 1])
        .detail("tolerance", tol);
    rep.witness = Some(CheckWitness {
        x: xpsi,
        weights: (1..=n)
            .map(|k| {
                psi.term_exact(k)
                    .map_or_else(|| psi.term(k).to_string(), |v| rational::render(&v))
            })
            .collect(),
        extra: BTreeMap::new(),
    });
    Ok(rep)
}

/// `u -> mean of f over [0, u)` is nonincreasing along `grid` for a
/// nonincreasing step function `f` and a monotone mean.
pub fn verify_decreasing(
    mean: &MeanSpec,
    f: &StepFunction,
    grid: &[BigRational],
) -> Result<CheckReport> {
    if let Some(i) = f.first_increase() {
        return Err(HardyError::NotNonincreasing(i));
    }
    require(mean, true, false)?;
    if grid.is_empty() {
        return Err(HardyError::Parameter("grid is empty".into()));
    }
    if grid.iter().any(|u| *u <= BigRational::zero()) || grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(HardyError::Parameter(
            "grid must be positive and strictly increasing".into(),
        ));
    }
    let (values, margins) = decreasing_margins(mean, f, grid)?;
    let worst = argmin(&margins);
    let margin = worst.map_or(0.0, |i| margins[i]);
    let verdict = if margin >= -JCIN_TOL {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let mut extra = BTreeMap::new();
    extra.insert(
        "breakpoints".into(),
        json!(f
            .breakpoints()
            .iter()
            .map(rational::render)
            .collect::<Vec<_>>()),
    );
    extra.insert(
        "grid".into(),
        json!(grid.iter().map(rational::render).collect::<Vec<_>>()),
    );
    extra.insert("step".into(), json!(worst.map_or(0, |i| i + 1)));
    let mut rep = CheckReport::new("decreasing", verdict, 1, margin)
        .detail("mean", mean.label())
        .detail("values", json!(values));
    rep.witness = Some(CheckWitness {
        x: f.values().to_vec(),
        weights: Vec::new(),
        extra,
    });
    Ok(rep)
}

fn decreasing_margins(
    mean: &MeanSpec,
    f: &StepFunction,
    grid: &[BigRational],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let zero = BigRational::zero();
    let values = grid
        .iter()
        .map(|u| integral_eval(mean, f, &zero, u))
        .collect::<Result<Vec<_>>>()?;
    let margins = values.windows(2).map(|p| p[0] - p[1]).collect();
    Ok((values, margins))
}

/// Recomputes the margin stored in a decreasing-check witness.
pub fn replay_decreasing(mean: &MeanSpec, witness: &CheckWitness) -> Result<f64> {
    let parse = |key: &str| -> Result<Vec<BigRational>> {
        witness.extra[key]
            .as_array()
            .ok_or_else(|| HardyError::Parameter(format!("witness lacks {key}")))?
            .iter()
            .map(|v| rational::parse_rational(v.as_str().unwrap_or("")))
            .collect()
    };
    let f = StepFunction::new(parse("breakpoints")?, witness.x.clone())?;
    let (_, margins) = decreasing_margins(mean, &f, &parse("grid")?)?;
    Ok(argmin(&margins).map_or(0.0, |i| margins[i]))
}
