//! Hardy-constant approximations from explicit test sequences and limit
//! formulas.

use rayon::prelude::*;
use serde_json::json;

use super::kernel::{Kernel, Problem};
use super::{Direction, HardyEstimate};
use crate::error::{HardyError, Result};
use crate::json::ext;
use crate::mean::{MeanSpec, WeightedMean};
use crate::weights::{ratio_diagnostics, Divergence, WeightSeq};

/// The default grid `y = 2^k`, `k = -10..=10`.
pub fn default_y_grid() -> Vec<f64> {
    (-10..=10).map(|k| 2f64.powi(k)).collect()
}

/// Flags a sequence whose increments over the dyadic checkpoints
/// `N/8, N/4, N/2, N` do not shrink: each later increment is at least 90% of
/// the one before. Convergent sequences with algebraic or faster rates shrink
/// their increments geometrically over doubling checkpoints.
pub(crate) fn divergent_trend(values: &[f64]) -> (bool, Vec<f64>) {
    let n = values.len();
    if n < 8 {
        return (false, Vec::new());
    }
    let at = |k: usize| values[k - 1];
    let pts = [n / 8, n / 4, n / 2, n];
    let inc: Vec<f64> = pts.windows(2).map(|p| at(p[1]) - at(p[0])).collect();
    let scale = at(n).abs().max(f64::MIN_POSITIVE);
    let growing =
        inc.iter().all(|d| *d > 1e-9 * scale) && inc.windows(2).all(|p| p[1] >= 0.9 * p[0]);
    (growing, inc)
}

/// Evaluates the Hardy ratio at `x_n = q^n / lambda_n`, `n <= N`. For the
/// arithmetic mean this is at least `(1 - q) sum lambda_m / Lambda_m` up to the
/// truncation.
pub fn geometric_probe(mean: &MeanSpec, w: &WeightSeq, q: f64, n: usize) -> Result<HardyEstimate> {
    if !(q > 0.0 && q < 1.0) {
        return Err(HardyError::Parameter(format!(
            "probe ratio must lie in (0, 1), got {q}"
        )));
    }
    let pb = Problem::new(mean, w, n)?;
    let z: Vec<f64> = (0..n)
        .map(|j| (j + 1) as f64 * q.ln() - pb.lnw[j])
        .collect();
    let shift = if mean.flags().homogeneous {
        pb.ln_l(&z)
    } else {
        0.0
    };
    let x: Vec<f64> = z.iter().map(|v| (v - shift).exp()).collect();
    if x.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(HardyError::Parameter(format!(
            "probe sequence leaves the positive floats before N = {n}; lower N or raise q"
        )));
    }
    let zx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let value = pb.value(&zx)?.exp();
    let mut est =
        HardyEstimate::new(value, Direction::LowerBound, n, "geometric-probe").diag("q", q);
    est.witness = Some(x);
    Ok(est)
}

/// `sup_y liminf_n (Lambda_n / y) M(y/Lambda_1, ..., y/Lambda_n; lambda)`,
/// with the liminf replaced by the minimum over `n` in `[window N, N]` and
/// the supremum by the maximum over `y_grid`.
///
/// Refuses unless the partial sums provably diverge and `lambda_n/Lambda_n`
/// is nonincreasing up to `N`.
pub fn kedlaya_estimate(
    mean: &MeanSpec,
    w: &WeightSeq,
    y_grid: &[f64],
    n: usize,
    window: f64,
) -> Result<HardyEstimate> {
    if y_grid.is_empty() || y_grid.iter().any(|y| !(*y > 0.0 && y.is_finite())) {
        return Err(HardyError::Parameter(
            "y grid must be nonempty and positive".into(),
        ));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(HardyError::Parameter("window must lie in (0, 1]".into()));
    }
    if n < 2 {
        return Err(HardyError::Parameter("N must be >= 2".into()));
    }
    match w.divergence() {
        Divergence::Diverges(_) => {}
        Divergence::Converges(why) | Divergence::Inconclusive(why) => {
            return Err(HardyError::Hypothesis(format!(
                "partial sums Lambda_n must diverge to infinity ({why})"
            )))
        }
    }
    let ratios = ratio_diagnostics(w, n)?;
    if !ratios.is_nonincreasing {
        return Err(HardyError::Hypothesis(
            "lambda_n / Lambda_n must be nonincreasing".into(),
        ));
    }
    let pb = Problem::new(mean, w, n)?;
    let kernel = Kernel::of(mean);
    let lo = ((window * n as f64).ceil() as usize).clamp(1, n);
    let per_y: Vec<Result<(f64, Vec<f64>)>> = y_grid
        .par_iter()
        .map(|&y| {
            let ly = y.ln();
            let z: Vec<f64> = pb.ln_cum.iter().map(|c| ly - c).collect();
            let ln_m = kernel.prefix_ln_means(&z, &pb.lnw, &pb.ln_cum)?;
            let a: Vec<f64> = (0..n)
                .map(|j| (pb.ln_cum[j] - ly + ln_m[j]).exp())
                .collect();
            let liminf = a[lo - 1..].iter().copied().fold(f64::INFINITY, f64::min);
            Ok((liminf, a))
        })
        .collect();
    let per_y = per_y.into_iter().collect::<Result<Vec<_>>>()?;
    let (best, _) =
        per_y
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |acc, (i, (v, _))| {
                if *v > acc.1 {
                    (i, *v)
                } else {
                    acc
                }
            });
    let (value, a) = &per_y[best];
    let (diverging, increments) = divergent_trend(a);
    Ok(
        HardyEstimate::new(*value, Direction::LimitApprox, n, "kedlaya")
            .diag("window", window)
            .diag("window_start", lo)
            .diag("y_grid", json!(y_grid))
            .diag("best_y", y_grid[best])
            .diag(
                "grid_values",
                json!(per_y.iter().map(|(v, _)| ext(*v)).collect::<Vec<_>>()),
            )
            .diag("divergent_trend", diverging)
            .diag("trend_increments", json!(increments)),
    )
}

/// `n M(1, 1/2, ..., 1/n)` at `n = N` (unit weights), plus its values at
/// `n = 1, 2, 4, ...` for inspecting convergence.
pub fn nonweighted_limit(mean: &MeanSpec, n: usize) -> Result<HardyEstimate> {
    if n == 0 {
        return Err(HardyError::Parameter("N must be >= 1".into()));
    }
    let f = mean.flags();
    let missing: Vec<&str> = [
        ("monotone", f.monotone),
        ("symmetric", f.symmetric),
        ("concave", f.concave),
        ("homogeneous", f.homogeneous),
    ]
    .iter()
    .filter(|(_, ok)| !ok)
    .map(|(name, _)| *name)
    .collect();
    let kernel = Kernel::of(mean);
    let ln_n: Vec<f64> = (1..=n).map(|k| (k as f64).ln()).collect();
    let z: Vec<f64> = ln_n.iter().map(|v| -v).collect();
    let lnw = vec![0.0; n];
    let ln_m = kernel.prefix_ln_means(&z, &lnw, &ln_n)?;
    let values: Vec<f64> = (0..n).map(|j| (ln_n[j] + ln_m[j]).exp()).collect();
    let mut trajectory = Vec::new();
    let mut k = 1usize;
    while k < n {
        trajectory.push(json!([k, values[k - 1]]));
        k *= 2;
    }
    trajectory.push(json!([n, values[n - 1]]));
    let (diverging, increments) = divergent_trend(&values);
    let mut est = HardyEstimate::new(
        values[n - 1],
        Direction::LimitApprox,
        n,
        "nonweighted-limit",
    )
    .diag("trajectory", trajectory)
    .diag("divergent_trend", diverging)
    .diag("trend_increments", json!(increments));
    if !missing.is_empty() {
        est = est.diag(
            "warning",
            format!(
                "limit formula assumes flags that are not declared: {}",
                missing.join(", ")
            ),
        );
    }
    Ok(est)
}
