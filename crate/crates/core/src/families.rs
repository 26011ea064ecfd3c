//! Concrete mean families: power means over the extended parameter range and
//! quasi-arithmetic means built from a generator.

use std::fmt;
use std::sync::Arc;

use crate::error::{HardyError, Result};
use crate::mean::{MeanFlags, PointVector, WeightVector};
use crate::rational;

/// Below this magnitude the power mean is evaluated as the geometric mean.
pub const GEOMETRIC_SWITCH: f64 = 1e-8;
/// Above this magnitude the power mean is evaluated as min/max.
pub const EXTREMAL_SWITCH: f64 = 1e8;

fn clamp_to_range(v: f64, x: &[f64]) -> f64 {
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    v.clamp(lo, hi)
}

/// Weighted power mean on validated input. Weights need not be normalized.
pub fn power_mean_raw(p: f64, x: &[f64], w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    if p == 1.0 {
        let s: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum();
        return clamp_to_range(s / total, x);
    }
    if p.abs() > EXTREMAL_SWITCH {
        return if p > 0.0 {
            x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        } else {
            x.iter().copied().fold(f64::INFINITY, f64::min)
        };
    }
    if p.abs() < GEOMETRIC_SWITCH {
        let s: f64 = x.iter().zip(w).map(|(a, b)| b * a.ln()).sum();
        return clamp_to_range((s / total).exp(), x);
    }
    // Log domain relative to the extreme point that keeps p*ln(x/ref) <= 0:
    // M = ref * exp(log1p(sum w expm1(p l)/W) / p).
    let reference = if p > 0.0 {
        x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        x.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let s: f64 = x
        .iter()
        .zip(w)
        .map(|(a, b)| b * (p * (a / reference).ln()).exp_m1())
        .sum::<f64>()
        / total;
    clamp_to_range(reference * (s.ln_1p() / p).exp(), x)
}

/// `P_p(x, w)`: `(sum w x^p / sum w)^(1/p)`, geometric at `p = 0`, min/max at
/// `p = -inf/+inf`.
pub fn power_mean(p: f64, x: &PointVector, w: &WeightVector) -> Result<f64> {
    if p.is_nan() {
        return Err(HardyError::Parameter("power exponent is NaN".into()));
    }
    if x.len() != w.len() {
        return Err(HardyError::LengthMismatch {
            left: x.len(),
            right: w.len(),
        });
    }
    Ok(power_mean_raw(p, x.as_slice(), &w.normalized_f64()))
}

type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A strictly monotone continuous generator `f` with its inverse, and
/// optionally its derivative (finite differences are used otherwise).
#[derive(Clone)]
pub struct Generator {
    name: String,
    forward: RealMap,
    inverse: RealMap,
    derivative: Option<RealMap>,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("name", &self.name)
            .finish()
    }
}

impl Generator {
    pub fn new(
        name: impl Into<String>,
        forward: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Generator {
            name: name.into(),
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            derivative: None,
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn forward(&self, t: f64) -> f64 {
        (self.forward)(t)
    }

    pub fn inverse(&self, s: f64) -> f64 {
        (self.inverse)(s)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(t),
            None => {
                let h = 1e-5 * t.abs().max(f64::MIN_POSITIVE);
                (self.forward(t + h) - self.forward(t - h)) / (2.0 * h)
            }
        }
    }

    pub fn log() -> Self {
        Generator::new("log", f64::ln, f64::exp).with_derivative(|t| 1.0 / t)
    }

    pub fn identity() -> Self {
        Generator::new("identity", |t| t, |s| s).with_derivative(|_| 1.0)
    }

    pub fn sqrt() -> Self {
        Generator::new("sqrt", f64::sqrt, |s| s * s).with_derivative(|t| 0.5 / t.sqrt())
    }

    pub fn exp() -> Self {
        Generator::new("exp", f64::exp, f64::ln).with_derivative(f64::exp)
    }

    /// `t -> t^p`, `p != 0`.
    pub fn power(p: f64) -> Result<Self> {
        if p == 0.0 || !p.is_finite() {
            return Err(HardyError::Parameter(format!(
                "power generator needs finite p != 0, got {p}"
            )));
        }
        Ok(Generator::new(
            format!("power:{p}"),
            move |t| t.powf(p),
            move |s| s.powf(1.0 / p),
        )
        .with_derivative(move |t| p * t.powf(p - 1.0)))
    }

    /// Built-in generators by name, with the flags their means are known to
    /// have: `log`, `identity`, `sqrt`, `exp`, `power:P`.
    pub fn parse(s: &str) -> Result<(Self, MeanFlags)> {
        let concave_homogeneous = MeanFlags::all();
        let plain = MeanFlags {
            concave: false,
            homogeneous: false,
            ..MeanFlags::all()
        };
        match s {
            "log" => Ok((Self::log(), concave_homogeneous)),
            "identity" => Ok((Self::identity(), concave_homogeneous)),
            "sqrt" => Ok((Self::sqrt(), concave_homogeneous)),
            "exp" => Ok((Self::exp(), plain)),
            _ => match s.split_once(':') {
                Some(("power", p)) => {
                    let p = rational::parse_number(p)?;
                    let g = Self::power(p).map_err(|e| HardyError::descriptor(s, e.to_string()))?;
                    Ok((
                        g,
                        MeanFlags {
                            concave: p <= 1.0,
                            ..MeanFlags::all()
                        },
                    ))
                }
                _ => Err(HardyError::descriptor(s, "unknown generator")),
            },
        }
    }

    /// Largest `|f^-1(f(t)) - t| / t` over the sample points.
    pub fn inverse_error(&self, samples: &[f64]) -> f64 {
        samples
            .iter()
            .map(|&t| (self.inverse(self.forward(t)) - t).abs() / t)
            .fold(0.0, f64::max)
    }
}

/// Quasi-arithmetic mean on validated input.
pub fn quasiarithmetic_raw(g: &Generator, x: &[f64], w: &[f64]) -> Result<f64> {
    let total: f64 = w.iter().sum();
    let s = x
        .iter()
        .zip(w)
        .map(|(&a, &b)| {
            let v = g.forward(a);
            if v.is_finite() {
                Ok(b * v)
            } else {
                Err(HardyError::Generator(format!("{}({a}) = {v}", g.name())))
            }
        })
        .sum::<Result<f64>>()?
        / total;
    let r = g.inverse(s);
    if !r.is_finite() {
        return Err(HardyError::Generator(format!("{}^-1({s}) = {r}", g.name())));
    }
    Ok(clamp_to_range(r, x))
}

/// `f^-1(sum w f(x) / sum w)`.
pub fn quasiarithmetic_mean(g: &Generator, x: &PointVector, w: &WeightVector) -> Result<f64> {
    if x.len() != w.len() {
        return Err(HardyError::LengthMismatch {
            left: x.len(),
            right: w.len(),
        });
    }
    quasiarithmetic_raw(g, x.as_slice(), &w.normalized_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pv(v: &[f64]) -> PointVector {
        PointVector::new(v.to_vec()).unwrap()
    }

    fn wv(v: &[i64]) -> WeightVector {
        WeightVector::from_ints(v).unwrap()
    }

    #[test]
    fn named_examples() {
        assert_eq!(
            power_mean(f64::NEG_INFINITY, &pv(&[3.0, 1.0, 2.0]), &wv(&[1, 1, 1])).unwrap(),
            1.0
        );
        assert_eq!(
            power_mean(f64::INFINITY, &pv(&[3.0, 1.0, 2.0]), &wv(&[1, 1, 1])).unwrap(),
            3.0
        );
        let v = power_mean(2.0, &pv(&[1.0, 7.0]), &wv(&[1, 1])).unwrap();
        assert!((v - 5.0).abs() < 1e-14);
        let v = power_mean(0.0, &pv(&[2.0, 8.0]), &wv(&[3, 3])).unwrap();
        assert!((v - 4.0).abs() < 1e-14);
        let v = quasiarithmetic_mean(&Generator::sqrt(), &pv(&[1.0, 9.0]), &wv(&[1, 1])).unwrap();
        assert!((v - 4.0).abs() < 1e-14);
    }

    #[test]
    fn parameter_switches_are_continuous() {
        let x = [0.5, 2.0, 9.0];
        let w = [1.0, 2.0, 0.5];
        let g = power_mean_raw(0.0, &x, &w);
        assert!((power_mean_raw(2e-8, &x, &w) - g).abs() < 1e-7);
        assert!((power_mean_raw(-2e-8, &x, &w) - g).abs() < 1e-7);
        assert!((power_mean_raw(1e7, &x, &w) - 9.0).abs() < 1e-5);
        assert!((power_mean_raw(-1e7, &x, &w) - 0.5).abs() < 1e-5);
        assert_eq!(power_mean_raw(2e8, &x, &w), 9.0);
    }

    #[test]
    fn large_exponents_do_not_overflow() {
        let x = [1e200, 1e-200];
        let w = [1.0, 1.0];
        let v = power_mean_raw(5.0, &x, &w);
        assert!(v.is_finite() && v > 1e199);
        let v = power_mean_raw(-5.0, &x, &w);
        assert!(v.is_finite() && v < 1e-199);
    }

    #[test]
    fn generator_failures_are_reported() {
        let bad = Generator::new("bad", |t| if t > 5.0 { f64::NAN } else { t }, |s| s);
        assert!(matches!(
            quasiarithmetic_mean(&bad, &pv(&[1.0, 9.0]), &wv(&[1, 1])),
            Err(HardyError::Generator(_))
        ));
        assert!(Generator::power(0.0).is_err());
        assert!(Generator::log().inverse_error(&[0.1, 1.0, 30.0]) < 1e-14);
    }

    #[test]
    fn finite_difference_derivative() {
        let g = Generator::new("cube", |t| t * t * t, f64::cbrt);
        assert!((g.derivative(2.0) - 12.0).abs() < 1e-8);
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..8).prop_flat_map(|n| {
            (
                prop::collection::vec(0.01f64..100.0, n),
                prop::collection::vec(0.01f64..10.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn power_mean_is_nondecreasing_in_p((x, w) in instance(), a in -6.0f64..6.0, b in -6.0f64..6.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let m_lo = power_mean_raw(lo, &x, &w);
            let m_hi = power_mean_raw(hi, &x, &w);
            prop_assert!(m_lo <= m_hi * (1.0 + 1e-12));
        }

        #[test]
        fn quasiarithmetic_power_generator_matches((x, w) in instance()) {
            for p in [-2.0, -1.0, 0.5, 1.0, 2.0] {
                let g = Generator::power(p).unwrap();
                let q = quasiarithmetic_raw(&g, &x, &w).unwrap();
                let m = power_mean_raw(p, &x, &w);
                prop_assert!((q - m).abs() <= 1e-10 * m, "p={} {} vs {}", p, q, m);
            }
            let lg = quasiarithmetic_raw(&Generator::log(), &x, &w).unwrap();
            prop_assert!((lg - power_mean_raw(0.0, &x, &w)).abs() <= 1e-10 * lg);
            let id = quasiarithmetic_raw(&Generator::identity(), &x, &w).unwrap();
            prop_assert!((id - power_mean_raw(1.0, &x, &w)).abs() <= 1e-12 * id);
        }

        #[test]
        fn mean_value_property((x, w) in instance(), p in prop_oneof![Just(f64::NEG_INFINITY), Just(f64::INFINITY), -20.0f64..20.0]) {
            let m = power_mean_raw(p, &x, &w);
            let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo <= m && m <= hi);
        }
    }
}
