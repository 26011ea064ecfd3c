//! All prefix means `M_n = M(x_1..x_n; lambda_1..lambda_n)` in one pass, and
//! the log Hardy ratio `ln F - ln L` with its gradient in `z = ln x`, where
//! `F = sum lambda_n M_n` and `L = sum lambda_n x_n`.

use crate::error::{HardyError, Result};
use crate::families::{Generator, EXTREMAL_SWITCH, GEOMETRIC_SWITCH};
use crate::mean::{MeanFamily, MeanSpec};
use crate::weights::WeightSeq;

/// `ln sum exp(t_i)` accumulated term by term, compensated.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSum {
    shift: f64,
    sum: f64,
    comp: f64,
}

impl LogSum {
    pub fn new() -> Self {
        LogSum {
            shift: f64::NEG_INFINITY,
            sum: 0.0,
            comp: 0.0,
        }
    }

    pub fn add(&mut self, t: f64) {
        if t == f64::NEG_INFINITY {
            return;
        }
        if t > self.shift {
            let f = (self.shift - t).exp();
            self.sum *= f;
            self.comp *= f;
            self.shift = t;
        }
        let v = (t - self.shift).exp();
        let s = self.sum + v;
        if self.sum.abs() >= v {
            self.comp += (self.sum - s) + v;
        } else {
            self.comp += (v - s) + self.sum;
        }
        self.sum = s;
    }

    pub fn ln(&self) -> f64 {
        self.shift + (self.sum + self.comp).ln()
    }
}

#[derive(Clone, Copy)]
pub(crate) enum Kernel<'a> {
    Power(f64),
    Geometric,
    Min,
    Max,
    Quasi(&'a Generator),
}

impl<'a> Kernel<'a> {
    pub fn of(mean: &'a MeanSpec) -> Self {
        match mean.family() {
            MeanFamily::Power(p) if p.abs() < GEOMETRIC_SWITCH => Kernel::Geometric,
            MeanFamily::Power(p) if *p > EXTREMAL_SWITCH => Kernel::Max,
            MeanFamily::Power(p) if *p < -EXTREMAL_SWITCH => Kernel::Min,
            MeanFamily::Power(p) => Kernel::Power(*p),
            MeanFamily::Quasiarithmetic(g) => Kernel::Quasi(g),
        }
    }

    /// `ln M_n` for every `n`, with `lnw = ln lambda` and `ln_cum = ln Lambda`.
    pub fn prefix_ln_means(&self, z: &[f64], lnw: &[f64], ln_cum: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(z.len());
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        match *self {
            Kernel::Power(p) => {
                let mut acc = LogSum::new();
                for n in 0..z.len() {
                    acc.add(lnw[n] + p * z[n]);
                    lo = lo.min(z[n]);
                    hi = hi.max(z[n]);
                    out.push(((acc.ln() - ln_cum[n]) / p).clamp(lo, hi));
                }
            }
            Kernel::Geometric => {
                let (mut s, mut c) = (0.0f64, 0.0f64);
                for n in 0..z.len() {
                    let v = lnw[n].exp() * z[n];
                    let t = s + v;
                    c += if s.abs() >= v.abs() {
                        (s - t) + v
                    } else {
                        (v - t) + s
                    };
                    s = t;
                    lo = lo.min(z[n]);
                    hi = hi.max(z[n]);
                    out.push(((s + c) / ln_cum[n].exp()).clamp(lo, hi));
                }
            }
            Kernel::Min => {
                for &v in z {
                    lo = lo.min(v);
                    out.push(lo);
                }
            }
            Kernel::Max => {
                for &v in z {
                    hi = hi.max(v);
                    out.push(hi);
                }
            }
            Kernel::Quasi(g) => {
                let (mut s, mut c) = (0.0f64, 0.0f64);
                for n in 0..z.len() {
                    let x = z[n].exp();
                    let f = g.forward(x);
                    if !f.is_finite() {
                        return Err(HardyError::Generator(format!("{}({x}) = {f}", g.name())));
                    }
                    let v = lnw[n].exp() * f;
                    let t = s + v;
                    c += if s.abs() >= v.abs() {
                        (s - t) + v
                    } else {
                        (v - t) + s
                    };
                    s = t;
                    let m = g.inverse((s + c) / ln_cum[n].exp());
                    if !(m.is_finite() && m > 0.0) {
                        return Err(HardyError::Generator(format!(
                            "{}^-1 produced {m}",
                            g.name()
                        )));
                    }
                    lo = lo.min(z[n]);
                    hi = hi.max(z[n]);
                    out.push(m.ln().clamp(lo, hi));
                }
            }
        }
        Ok(out)
    }
}

/// The finite-section Hardy ratio for a fixed mean and weight prefix.
pub(crate) struct Problem<'a> {
    pub kernel: Kernel<'a>,
    pub lnw: Vec<f64>,
    pub ln_cum: Vec<f64>,
}

impl<'a> Problem<'a> {
    pub fn new(mean: &'a MeanSpec, w: &WeightSeq, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(HardyError::Parameter("N must be >= 1".into()));
        }
        let lnw: Vec<f64> = (1..=n).map(|j| w.ln_term(j)).collect();
        if let Some(j) = lnw.iter().position(|v| !v.is_finite()) {
            return Err(HardyError::NonPositive {
                index: j + 1,
                value: w.term(j + 1).to_string(),
            });
        }
        let ln_cum: Vec<f64> = w.partial_sums(n).iter().map(|v| v.ln()).collect();
        Ok(Problem {
            kernel: Kernel::of(mean),
            lnw,
            ln_cum,
        })
    }

    pub fn len(&self) -> usize {
        self.lnw.len()
    }

    fn ln_f_l(&self, z: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
        let ln_m = self.kernel.prefix_ln_means(z, &self.lnw, &self.ln_cum)?;
        let mut f = LogSum::new();
        let mut l = LogSum::new();
        for n in 0..z.len() {
            f.add(self.lnw[n] + ln_m[n]);
            l.add(self.lnw[n] + z[n]);
        }
        Ok((ln_m, f.ln(), l.ln()))
    }

    /// `ln L(z)`.
    pub fn ln_l(&self, z: &[f64]) -> f64 {
        let mut l = LogSum::new();
        for (a, b) in self.lnw.iter().zip(z) {
            l.add(a + b);
        }
        l.ln()
    }

    /// `ln F(z) - ln L(z)`.
    pub fn value(&self, z: &[f64]) -> Result<f64> {
        let (_, lf, ll) = self.ln_f_l(z)?;
        Ok(lf - ll)
    }

    /// Value and gradient with respect to `z`. For min and max the gradient is
    /// a subgradient.
    pub fn value_grad(&self, z: &[f64], grad: &mut [f64]) -> Result<f64> {
        let (ln_m, lf, ll) = self.ln_f_l(z)?;
        let n = z.len();
        match self.kernel {
            Kernel::Power(_) | Kernel::Geometric => {
                let p = match self.kernel {
                    Kernel::Power(p) => p,
                    _ => 0.0,
                };
                let mut tail = LogSum::new();
                for j in (0..n).rev() {
                    tail.add(self.lnw[j] + (1.0 - p) * ln_m[j] - self.ln_cum[j]);
                    grad[j] = (self.lnw[j] + p * z[j] + tail.ln() - lf).exp();
                }
            }
            Kernel::Min | Kernel::Max => {
                grad.iter_mut().for_each(|g| *g = 0.0);
                let mut arg = 0usize;
                for j in 0..n {
                    if ln_m[j] == z[j] {
                        arg = j;
                    }
                    grad[arg] += (self.lnw[j] + z[arg] - lf).exp();
                }
            }
            Kernel::Quasi(g) => {
                let mut tail = 0.0f64;
                for j in (0..n).rev() {
                    let m = ln_m[j].exp();
                    tail += (self.lnw[j] - self.ln_cum[j]).exp() / g.derivative(m);
                    let x = z[j].exp();
                    grad[j] = x * self.lnw[j].exp() * g.derivative(x) * tail / lf.exp();
                }
            }
        }
        for j in 0..n {
            grad[j] -= (self.lnw[j] + z[j] - ll).exp();
        }
        Ok(lf - ll)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean::evaluate_f64;
    use crate::weights::make_sequence_float;

    fn naive_ratio(mean: &MeanSpec, w: &[f64], x: &[f64]) -> f64 {
        let f: f64 = (1..=x.len())
            .map(|n| w[n - 1] * evaluate_f64(mean, &x[..n], &w[..n]).unwrap())
            .sum();
        let l: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
        f / l
    }

    fn means() -> Vec<MeanSpec> {
        let mut out: Vec<MeanSpec> = [
            -3.0,
            -1.0,
            0.0,
            0.5,
            1.0,
            2.5,
            f64::NEG_INFINITY,
            f64::INFINITY,
        ]
        .iter()
        .map(|&p| MeanSpec::power(p).unwrap())
        .collect();
        out.push("quasiarithmetic:exp".parse().unwrap());
        out.push("quasiarithmetic:sqrt".parse().unwrap());
        out
    }

    #[test]
    fn logsum_matches_direct_sum() {
        let mut s = LogSum::new();
        let vals = [3.0f64, 1e-5, 700.0, 0.25, 1e3];
        for v in vals {
            s.add(v.ln());
        }
        let direct: f64 = vals.iter().sum();
        assert!((s.ln() - direct.ln()).abs() < 1e-15);
        assert_eq!(LogSum::new().ln(), f64::NEG_INFINITY);
        let mut big = LogSum::new();
        big.add(1000.0);
        big.add(1000.0);
        assert!((big.ln() - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn ratio_matches_quadratic_evaluation() {
        let w = make_sequence_float("periodic:1,0.5,3,0.25").unwrap();
        let x = [0.7, 2.0, 0.1, 1.3, 0.4, 5.0, 0.9];
        let wt: Vec<f64> = (1..=x.len()).map(|n| w.term(n)).collect();
        let z: Vec<f64> = x.iter().map(|v: &f64| v.ln()).collect();
        for mean in means() {
            let pb = Problem::new(&mean, &w, x.len()).unwrap();
            let got = pb.value(&z).unwrap().exp();
            let want = naive_ratio(&mean, &wt, &x);
            assert!((got - want).abs() < 1e-12 * want, "{mean}: {got} vs {want}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let w = make_sequence_float("periodic:1,0.5,3").unwrap();
        let z = [0.3, -0.2, 0.9, -1.1, 0.05, 0.4];
        for mean in means() {
            if matches!(Kernel::of(&mean), Kernel::Min | Kernel::Max) {
                continue;
            }
            let pb = Problem::new(&mean, &w, z.len()).unwrap();
            let mut g = vec![0.0; z.len()];
            pb.value_grad(&z, &mut g).unwrap();
            for j in 0..z.len() {
                let h = 1e-6;
                let mut zp = z.to_vec();
                let mut zm = z.to_vec();
                zp[j] += h;
                zm[j] -= h;
                let fd = (pb.value(&zp).unwrap() - pb.value(&zm).unwrap()) / (2.0 * h);
                assert!((fd - g[j]).abs() < 1e-6, "{mean} j={j}: {fd} vs {}", g[j]);
            }
        }
    }

    #[test]
    fn min_subgradient_is_exact_off_ties() {
        let mean = MeanSpec::power(f64::NEG_INFINITY).unwrap();
        let w = make_sequence_float("periodic:1,2").unwrap();
        let z = [0.5, 0.1, 0.3, -0.4, 0.2];
        let pb = Problem::new(&mean, &w, z.len()).unwrap();
        let mut g = vec![0.0; z.len()];
        pb.value_grad(&z, &mut g).unwrap();
        for j in 0..z.len() {
            let h = 1e-7;
            let mut zp = z.to_vec();
            zp[j] += h;
            let fd = (pb.value(&zp).unwrap() - pb.value(&z).unwrap()) / h;
            assert!((fd - g[j]).abs() < 1e-5, "j={j}");
        }
    }

    #[test]
    fn extreme_exponents_stay_finite() {
        let w = make_sequence_float("ones").unwrap();
        let z: Vec<f64> = (0..50).map(|i| -(i as f64) * 0.5).collect();
        for p in [-80.0, 80.0, 1e-9, 1e9] {
            let mean = MeanSpec::power(p).unwrap();
            let pb = Problem::new(&mean, &w, z.len()).unwrap();
            let mut g = vec![0.0; z.len()];
            let v = pb.value_grad(&z, &mut g).unwrap();
            assert!(v.is_finite() && g.iter().all(|x| x.is_finite()), "p={p}");
        }
    }
}
