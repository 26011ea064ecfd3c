//! Finite-section lower bounds for the Hardy constant.
//!
//! For every `N` the ratio
//! `R(x) = sum_{n<=N} lambda_n M_n(x) / sum_{n<=N} lambda_n x_n`
//! is a lower bound, and the supremum over `N` and `x` is the constant. The
//! ratio is maximized with projected L-BFGS ascent in `z = ln x`: every
//! iterate is rescaled to `sum lambda x = 1` and clamped to `x >= epsilon`
//! (homogeneous means) or clamped to a box (all other means).

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::kernel::Problem;
use super::{Direction, HardyEstimate};
use crate::error::{HardyError, Result};
use crate::mean::{MeanSpec, WeightedMean};
use crate::weights::WeightSeq;

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub max_iter: usize,
    /// Stop once three consecutive steps improve `R` by less than this
    /// relative amount.
    pub rel_tol: f64,
    pub memory: usize,
    /// Required for non-homogeneous means: `lo <= x_n <= hi`.
    pub box_bounds: Option<(f64, f64)>,
    /// Extra starting points, tried in addition to `starts`.
    #[serde(skip)]
    pub warm_starts: Vec<Vec<f64>>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            starts: 8,
            seed: 0,
            epsilon: 1e-12,
            max_iter: 10_000,
            rel_tol: 1e-10,
            memory: 10,
            box_bounds: None,
            warm_starts: Vec::new(),
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        OptimizerConfig {
            seed,
            ..Self::default()
        }
    }
}

struct Space {
    lo: f64,
    hi: f64,
    normalize: bool,
}

impl Space {
    fn project(&self, pb: &Problem, z: &mut [f64]) {
        if self.normalize {
            let shift = pb.ln_l(z);
            z.iter_mut().for_each(|v| *v -= shift);
        }
        z.iter_mut().for_each(|v| *v = v.clamp(self.lo, self.hi));
    }

    fn at_bound(&self, z: f64, g: f64) -> bool {
        (z <= self.lo && g < 0.0) || (z >= self.hi && g > 0.0)
    }
}

struct Run {
    value: f64,
    z: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn ascend(pb: &Problem, space: &Space, mut z: Vec<f64>, cfg: &OptimizerConfig) -> Result<Run> {
    let n = z.len();
    space.project(pb, &mut z);
    let mut g = vec![0.0; n];
    let mut f = pb.value_grad(&z, &mut g)?;
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut stalls = 0;
    let mut g_new = vec![0.0; n];
    for it in 0..cfg.max_iter {
        let free: Vec<bool> = z
            .iter()
            .zip(&g)
            .map(|(&zi, &gi)| !space.at_bound(zi, gi))
            .collect();
        let pg: Vec<f64> = g
            .iter()
            .zip(&free)
            .map(|(&gi, &fr)| if fr { gi } else { 0.0 })
            .collect();
        if pg.iter().all(|v| v.abs() < 1e-15) {
            return Ok(Run {
                value: f,
                z,
                iterations: it,
                converged: true,
            });
        }
        // Two-loop recursion on -f, whose gradient is -g; the result d = H g
        // is an ascent direction for f.
        let mut d = pg.clone();
        let mut alphas = Vec::with_capacity(memory.len());
        for (s, y, rho) in memory.iter().rev() {
            let a = rho * dot(s, &d);
            d.iter_mut().zip(y).for_each(|(di, yi)| *di -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = memory.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|di| *di *= gamma);
        }
        for ((s, y, rho), a) in memory.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            d.iter_mut().zip(s).for_each(|(di, si)| *di += (a - b) * si);
        }
        d.iter_mut().zip(&free).for_each(|(di, &fr)| {
            if !fr {
                *di = 0.0
            }
        });
        if dot(&pg, &d) <= 0.0 {
            memory.clear();
            d = pg.clone();
        }
        let mut t = if memory.is_empty() {
            (1.0 / d.iter().fold(0.0f64, |m, v| m.max(v.abs()))).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..60 {
            let mut zn: Vec<f64> = z.iter().zip(&d).map(|(zi, di)| zi + t * di).collect();
            space.project(pb, &mut zn);
            let step: Vec<f64> = zn.iter().zip(&z).map(|(a, b)| a - b).collect();
            let fn_ = pb.value(&zn)?;
            if fn_ > f && fn_ >= f + 1e-4 * dot(&g, &step).max(0.0) {
                accepted = Some(zn);
                break;
            }
            t *= 0.5;
        }
        let Some(zn) = accepted else {
            return Ok(Run {
                value: f,
                z,
                iterations: it,
                converged: true,
            });
        };
        let fn_ = pb.value_grad(&zn, &mut g_new)?;
        let s: Vec<f64> = zn.iter().zip(&z).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g.iter().zip(&g_new).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            memory.push_back((s, y, 1.0 / sy));
            if memory.len() > cfg.memory {
                memory.pop_front();
            }
        }
        // f is ln R, so the increment is the relative improvement of R.
        if (fn_ - f).exp_m1() < cfg.rel_tol {
            stalls += 1;
        } else {
            stalls = 0;
        }
        z = zn;
        f = fn_;
        std::mem::swap(&mut g, &mut g_new);
        if stalls >= 3 {
            return Ok(Run {
                value: f,
                z,
                iterations: it + 1,
                converged: true,
            });
        }
    }
    Ok(Run {
        value: f,
        z,
        iterations: cfg.max_iter,
        converged: false,
    })
}

/// The Hardy ratio `R(x)` over the first `x.len()` weights.
pub fn hardy_ratio(mean: &MeanSpec, w: &WeightSeq, x: &[f64]) -> Result<f64> {
    if let Some((index, v)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v > 0.0))
    {
        return Err(HardyError::NonPositive {
            index,
            value: v.to_string(),
        });
    }
    let pb = Problem::new(mean, w, x.len())?;
    let z: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    Ok(pb.value(&z)?.exp())
}

fn starting_points(pb: &Problem, space: &Space, cfg: &OptimizerConfig) -> Result<Vec<Vec<f64>>> {
    let n = pb.len();
    let mid = if space.normalize {
        0.0
    } else {
        0.5 * (space.lo + space.hi)
    };
    let mut starts = vec![
        vec![mid; n],
        pb.ln_cum.iter().map(|c| mid - c + pb.ln_cum[0]).collect(),
        (0..n)
            .map(|j| {
                if j == 0 {
                    space.hi.min(mid + 40.0)
                } else {
                    space.lo.max(mid - 40.0)
                }
            })
            .collect(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    while starts.len() < cfg.starts.max(1) {
        let a = rng.gen_range(0.5..2.5);
        starts.push(
            pb.ln_cum
                .iter()
                .map(|c| mid - a * (c - pb.ln_cum[0]) + rng.gen_range(-0.5..0.5))
                .collect(),
        );
    }
    starts.truncate(cfg.starts.max(1));
    for (k, x) in cfg.warm_starts.iter().enumerate() {
        if x.len() != n {
            return Err(HardyError::Parameter(format!(
                "warm start {k} has length {}, expected {n}",
                x.len()
            )));
        }
        if x.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(HardyError::Parameter(format!(
                "warm start {k} is not strictly positive"
            )));
        }
        starts.push(x.iter().map(|v| v.ln()).collect());
    }
    Ok(starts)
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Maximizes the finite-section Hardy ratio from several seeded starts (run in
/// parallel) and returns the best value as a lower bound with its witness.
/// The witness is normalized to `sum lambda_n x_n = 1` for homogeneous means.
pub fn finite_lower_bound(
    mean: &MeanSpec,
    w: &WeightSeq,
    n: usize,
    cfg: &OptimizerConfig,
) -> Result<HardyEstimate> {
    let homogeneous = mean.flags().homogeneous;
    let space = match (homogeneous, cfg.box_bounds) {
        (true, _) => {
            if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
                return Err(HardyError::Parameter("epsilon must lie in (0, 1)".into()));
            }
            Space {
                lo: cfg.epsilon.ln(),
                hi: f64::INFINITY,
                normalize: true,
            }
        }
        (false, Some((lo, hi))) if lo > 0.0 && hi > lo && hi.is_finite() => Space {
            lo: lo.ln(),
            hi: hi.ln(),
            normalize: false,
        },
        (false, Some(_)) => {
            return Err(HardyError::Parameter(
                "box bounds need 0 < lo < hi < inf".into(),
            ))
        }
        (false, None) => {
            return Err(HardyError::Hypothesis(
                "a non-homogeneous mean needs explicit box bounds for the search".into(),
            ))
        }
    };
    let pb = Problem::new(mean, w, n)?;
    let starts = starting_points(&pb, &space, cfg)?;
    let runs: Vec<Result<Run>> = starts
        .into_par_iter()
        .map(|z0| ascend(&pb, &space, z0, cfg))
        .collect();
    let failed = runs.iter().filter(|r| r.is_err()).count();
    let mut ok: Vec<(usize, Run)> = Vec::new();
    let mut first_err = None;
    for (k, r) in runs.into_iter().enumerate() {
        match r {
            Ok(run) => ok.push((k, run)),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if ok.is_empty() {
        return Err(first_err.expect("at least one start"));
    }
    let iterations: Vec<usize> = ok.iter().map(|(_, r)| r.iterations).collect();
    // Recompute from the stored witness so that replaying it reproduces the
    // reported value bit for bit.
    let mut scored: Vec<(usize, f64, Vec<f64>, bool)> = ok
        .into_iter()
        .map(|(k, run)| {
            let x = witness(&pb, &space, &run.z);
            let z: Vec<f64> = x.iter().map(|v| v.ln()).collect();
            let v = pb.value(&z).map(f64::exp).unwrap_or(run.value.exp());
            (k, v, x, run.converged)
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| lex_cmp(&a.2, &b.2)));
    let (best_start, value, x, converged) = scored.swap_remove(0);
    let mut est = HardyEstimate::new(value, Direction::LowerBound, n, "finite")
        .diag("optimizer", json!(cfg))
        .diag("optimizer_iterations", json!(iterations))
        .diag("best_start", best_start)
        .diag("converged", converged);
    if failed > 0 {
        est = est.diag("failed_starts", failed);
    }
    if !converged {
        est = est.diag(
            "warning",
            "iteration cap reached; best value so far returned",
        );
    }
    est.witness = Some(x);
    Ok(est)
}

fn witness(pb: &Problem, space: &Space, z: &[f64]) -> Vec<f64> {
    let shift = if space.normalize { pb.ln_l(z) } else { 0.0 };
    z.iter().map(|v| (v - shift).exp()).collect()
}

/// Lower bounds for increasing `N`, each warm-started from the previous
/// witness padded with `epsilon`, so the values are nondecreasing up to
/// rounding.
pub fn finite_sweep(
    mean: &MeanSpec,
    w: &WeightSeq,
    ns: &[usize],
    cfg: &OptimizerConfig,
) -> Result<Vec<HardyEstimate>> {
    if ns.windows(2).any(|p| p[1] < p[0]) {
        return Err(HardyError::Parameter(
            "sweep sizes must be nondecreasing".into(),
        ));
    }
    let mut out: Vec<HardyEstimate> = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut c = cfg.clone();
        if let Some(prev) = out.last().and_then(|e| e.witness.clone()) {
            let pad = match cfg.box_bounds {
                Some((lo, _)) if !mean.flags().homogeneous => lo,
                _ => cfg.epsilon,
            };
            let mut x = prev;
            x.resize(n, pad);
            c.warm_starts.push(x);
        }
        out.push(finite_lower_bound(mean, w, n, &c)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::exact_arithmetic_sum;
    use crate::mean::evaluate_f64;
    use crate::rational;
    use crate::weights::make_sequence;

    fn naive_ratio(mean: &MeanSpec, w: &WeightSeq, x: &[f64]) -> f64 {
        let wt: Vec<f64> = (1..=x.len()).map(|n| w.term(n)).collect();
        let f: f64 = (1..=x.len())
            .map(|n| wt[n - 1] * evaluate_f64(mean, &x[..n], &wt[..n]).unwrap())
            .sum();
        f / wt.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }

    #[test]
    fn arithmetic_matches_exact_oracle() {
        let a = MeanSpec::arithmetic();
        for desc in ["ones", "dyadic", "geometric:1/3"] {
            let w = make_sequence(desc).unwrap();
            for n in [1usize, 4, 16] {
                let est = finite_lower_bound(&a, &w, n, &OptimizerConfig::default()).unwrap();
                let oracle = rational::to_f64(&exact_arithmetic_sum(&w, n));
                assert!(
                    (est.value - oracle).abs() <= 1e-6 * oracle,
                    "{desc} N={n}: {} vs {oracle}",
                    est.value
                );
                assert!(est.value <= oracle * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn min_mean_is_one() {
        let m = MeanSpec::power(f64::NEG_INFINITY).unwrap();
        for n in [1usize, 7, 50] {
            let est =
                finite_lower_bound(&m, &WeightSeq::ones(), n, &OptimizerConfig::default()).unwrap();
            assert_eq!(est.value, 1.0);
        }
    }

    #[test]
    fn witness_reproduces_value() {
        let m = MeanSpec::power(0.5).unwrap();
        let w = make_sequence("power:1").unwrap();
        let est = finite_lower_bound(&m, &w, 40, &OptimizerConfig::with_seed(3)).unwrap();
        let x = est.witness.as_ref().unwrap();
        assert_eq!(hardy_ratio(&m, &w, x).unwrap(), est.value);
        let naive = naive_ratio(&m, &w, x);
        assert!((naive - est.value).abs() <= 1e-9 * est.value);
        let total: f64 = x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_for_seed() {
        let m = MeanSpec::power(0.5).unwrap();
        let a = finite_lower_bound(&m, &WeightSeq::ones(), 32, &OptimizerConfig::with_seed(11))
            .unwrap();
        let b = finite_lower_bound(&m, &WeightSeq::ones(), 32, &OptimizerConfig::with_seed(11))
            .unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn geometric_mean_stays_below_e() {
        let m = MeanSpec::geometric();
        let est =
            finite_lower_bound(&m, &WeightSeq::ones(), 128, &OptimizerConfig::default()).unwrap();
        assert!(
            est.value > 2.0 && est.value < std::f64::consts::E,
            "{}",
            est.value
        );
    }

    #[test]
    fn non_homogeneous_needs_a_box() {
        let m: MeanSpec = "quasiarithmetic:exp".parse().unwrap();
        let w = WeightSeq::ones();
        assert!(matches!(
            finite_lower_bound(&m, &w, 8, &OptimizerConfig::default()),
            Err(HardyError::Hypothesis(_))
        ));
        let cfg = OptimizerConfig {
            box_bounds: Some((0.01, 3.0)),
            ..OptimizerConfig::default()
        };
        let est = finite_lower_bound(&m, &w, 8, &cfg).unwrap();
        let x = est.witness.as_ref().unwrap();
        assert!(x
            .iter()
            .all(|v| *v >= 0.01 * (1.0 - 1e-12) && *v <= 3.0 * (1.0 + 1e-12)));
        assert!((naive_ratio(&m, &w, x) - est.value).abs() < 1e-9 * est.value);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let m = MeanSpec::power(0.5).unwrap();
        let cfg = OptimizerConfig {
            max_iter: 2,
            ..OptimizerConfig::default()
        };
        let est = finite_lower_bound(&m, &WeightSeq::ones(), 200, &cfg).unwrap();
        assert!(est.warning().is_some());
        assert!(est.value > 1.0);
    }

    #[test]
    fn sweep_is_nondecreasing() {
        let m = MeanSpec::power(0.5).unwrap();
        let est = finite_sweep(
            &m,
            &WeightSeq::ones(),
            &[4, 16, 64, 128],
            &OptimizerConfig::default(),
        )
        .unwrap();
        for p in est.windows(2) {
            assert!(p[1].value >= p[0].value * (1.0 - 1e-9));
        }
        assert!(
            finite_sweep(&m, &WeightSeq::ones(), &[8, 4], &OptimizerConfig::default()).is_err()
        );
    }

    #[test]
    fn bad_warm_start_is_rejected() {
        let cfg = OptimizerConfig {
            warm_starts: vec![vec![1.0; 3]],
            ..OptimizerConfig::default()
        };
        assert!(finite_lower_bound(&MeanSpec::arithmetic(), &WeightSeq::ones(), 4, &cfg).is_err());
    }
}
