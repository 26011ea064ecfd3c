//! Piecewise-constant functions on `[0, L)` with rational breakpoints, and the
//! integral-type evaluation of a weighted mean over such a function.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{HardyError, Result};
use crate::mean::{evaluate, PointVector, WeightVector, WeightedMean};
use crate::rational;

/// Takes value `values[k]` on `[breakpoints[k], breakpoints[k + 1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<BigRational>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<BigRational>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(HardyError::Empty);
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(HardyError::LengthMismatch {
                left: breakpoints.len(),
                right: values.len() + 1,
            });
        }
        if !breakpoints[0].is_zero() {
            return Err(HardyError::Parameter("first breakpoint must be 0".into()));
        }
        if let Some(k) = breakpoints.windows(2).position(|p| p[0] >= p[1]) {
            return Err(HardyError::Parameter(format!(
                "breakpoints not strictly increasing at {}",
                k + 1
            )));
        }
        PointVector::new(values.clone())?;
        Ok(StepFunction {
            breakpoints,
            values,
        })
    }

    pub fn breakpoints(&self) -> &[BigRational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support_end(&self) -> &BigRational {
        self.breakpoints.last().expect("at least two breakpoints")
    }

    /// `f(t)`, or `None` outside `[0, L)`.
    pub fn value_at(&self, t: &BigRational) -> Option<f64> {
        if t.is_negative() || t >= self.support_end() {
            return None;
        }
        // Index of the last breakpoint <= t.
        let k = self.breakpoints.partition_point(|b| b <= t) - 1;
        Some(self.values[k])
    }

    pub fn value_at_f64(&self, t: f64) -> Option<f64> {
        self.value_at(&rational::from_f64(t)?)
    }

    /// Index of the first piece whose value exceeds its predecessor's.
    pub fn first_increase(&self) -> Option<usize> {
        self.values
            .windows(2)
            .position(|p| p[1] > p[0])
            .map(|k| k + 1)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.first_increase().is_none()
    }

    /// Pieces of `f` restricted to `[a, b)`: values and exact lengths.
    pub fn restrict(
        &self,
        a: &BigRational,
        b: &BigRational,
    ) -> Result<(Vec<f64>, Vec<BigRational>)> {
        if a.is_negative() || a >= b || b > self.support_end() {
            return Err(HardyError::OutsideSupport {
                a: rational::render(a),
                b: rational::render(b),
                end: rational::render(self.support_end()),
            });
        }
        let mut values = Vec::new();
        let mut lengths = Vec::new();
        for (k, piece) in self.breakpoints.windows(2).enumerate() {
            let lo = if &piece[0] > a { &piece[0] } else { a };
            let hi = if &piece[1] < b { &piece[1] } else { b };
            if lo < hi {
                values.push(self.values[k]);
                lengths.push(hi - lo);
            }
        }
        Ok((values, lengths))
    }
}

/// The weighted characteristic function: value `x_k` on `[W_{k-1}, W_k)`
/// where `W_k` are the partial sums of `w`.
pub fn chi(x: &PointVector, w: &WeightVector) -> Result<StepFunction> {
    if x.len() != w.len() {
        return Err(HardyError::LengthMismatch {
            left: x.len(),
            right: w.len(),
        });
    }
    let mut breakpoints = Vec::with_capacity(w.len() + 1);
    breakpoints.push(BigRational::zero());
    for v in w.entries() {
        let next = breakpoints.last().unwrap() + v;
        breakpoints.push(next);
    }
    StepFunction::new(breakpoints, x.as_slice().to_vec())
}

/// The mean of `f` over `[a, b)`: the mean of the piece values weighted by the
/// piece lengths after refining at `a` and `b`.
pub fn integral_eval<M: WeightedMean + ?Sized>(
    mean: &M,
    f: &StepFunction,
    a: &BigRational,
    b: &BigRational,
) -> Result<f64> {
    let (values, lengths) = f.restrict(a, b)?;
    evaluate(
        mean,
        &PointVector::new(values)?,
        &WeightVector::from_rationals(lengths)?,
    )
}
