//! The nonincreasing rearrangement with preserved weighted sum.
//!
//! With integer weights `c_n = K w_n`, repeat `x_n` exactly `c_n` times, sort
//! the expanded sequence nonincreasingly and average it back over consecutive
//! blocks of lengths `c_1, c_2, ...`. The expansion is never materialized:
//! blocks are filled by walking the sorted distinct values with their
//! multiplicities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{HardyError, Result};
use crate::mean::{PointVector, WeightVector};
use crate::rational;

/// Largest accepted expansion length `K * (w_1 + ... + w_N)`.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct RearrangementResult {
    /// Nonincreasing block averages, rounded from `y_exact`.
    pub y: Vec<f64>,
    #[serde(serialize_with = "render_all")]
    pub y_exact: Vec<BigRational>,
    pub expansion_size: u64,
    #[serde(serialize_with = "render_int")]
    pub scale_factor: BigInt,
}

fn render_all<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter()
        .map(rational::render)
        .collect::<Vec<_>>()
        .serialize(s)
}

fn render_int<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.to_string().serialize(s)
}

impl RearrangementResult {
    pub fn points(&self) -> PointVector {
        PointVector::new(self.y.clone()).expect("block averages of positive points are positive")
    }
}

/// `sum w_n v_n` in exact arithmetic.
pub fn weighted_sum_exact(v: &[BigRational], w: &WeightVector) -> BigRational {
    v.iter().zip(w.entries()).map(|(a, b)| a * b).sum()
}

pub fn rearrange_samesum(x: &PointVector, w: &WeightVector) -> Result<RearrangementResult> {
    rearrange_samesum_with_budget(x, w, DEFAULT_BUDGET)
}

pub fn rearrange_samesum_with_budget(
    x: &PointVector,
    w: &WeightVector,
    budget: u64,
) -> Result<RearrangementResult> {
    if x.len() != w.len() {
        return Err(HardyError::LengthMismatch {
            left: x.len(),
            right: w.len(),
        });
    }
    if !w.is_exact() {
        return Err(HardyError::ExactRequired);
    }
    let k = rational::lcm_of_denominators(w.entries());
    let counts: Vec<BigInt> = w.entries().iter().map(|v| (v * &k).to_integer()).collect();
    let total: BigInt = counts.iter().sum();
    let too_big = || HardyError::BudgetExceeded {
        size: total.to_string(),
        budget,
    };
    let expansion = total
        .to_u64()
        .filter(|t| *t <= budget)
        .ok_or_else(too_big)?;
    let counts: Vec<u64> = counts
        .iter()
        .map(|c| c.to_u64().expect("bounded by total"))
        .collect();

    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x.as_slice()[b].total_cmp(&x.as_slice()[a]));
    let values: Vec<BigRational> = x
        .as_slice()
        .iter()
        .map(|&v| rational::from_f64(v).expect("finite"))
        .collect();

    // Walk the sorted runs, handing out `counts[n]` copies to block n.
    let mut run = 0usize;
    let mut left_in_run = counts[order[0]];
    let mut y_exact = Vec::with_capacity(x.len());
    for &need in &counts {
        let mut remaining = need;
        let mut acc = BigRational::zero();
        while remaining > 0 {
            while left_in_run == 0 {
                run += 1;
                left_in_run = counts[order[run]];
            }
            let take = remaining.min(left_in_run);
            acc += &values[order[run]] * BigRational::from_integer(take.into());
            remaining -= take;
            left_in_run -= take;
        }
        y_exact.push(acc / BigRational::from_integer(need.into()));
    }
    Ok(RearrangementResult {
        y: y_exact.iter().map(rational::to_f64).collect(),
        y_exact,
        expansion_size: expansion,
        scale_factor: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn pv(v: &[f64]) -> PointVector {
        PointVector::new(v.to_vec()).unwrap()
    }

    /// Literal construction: expand, sort, block-average.
    fn by_expansion(x: &[f64], c: &[u64]) -> Vec<BigRational> {
        let mut s: Vec<f64> = x
            .iter()
            .zip(c)
            .flat_map(|(&v, &k)| std::iter::repeat_n(v, k as usize))
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        let mut out = Vec::new();
        let mut pos = 0;
        for &k in c {
            let block: BigRational = s[pos..pos + k as usize]
                .iter()
                .map(|&v| rational::from_f64(v).unwrap())
                .sum();
            out.push(block / int(k as i64));
            pos += k as usize;
        }
        out
    }

    #[test]
    fn hand_examples() {
        let r = rearrange_samesum(&pv(&[1.0, 3.0]), &WeightVector::from_ints(&[2, 1]).unwrap())
            .unwrap();
        assert_eq!(r.y, vec![2.0, 1.0]);
        assert_eq!(r.expansion_size, 3);
        let r = rearrange_samesum(
            &pv(&[1.0, 2.0, 3.0]),
            &WeightVector::from_ints(&[1, 1, 1]).unwrap(),
        )
        .unwrap();
        assert_eq!(r.y, vec![3.0, 2.0, 1.0]);
        let r = rearrange_samesum(
            &pv(&[5.0, 4.0, 0.5]),
            &WeightVector::from_ints(&[1, 1, 1]).unwrap(),
        )
        .unwrap();
        assert_eq!(r.y, vec![5.0, 4.0, 0.5]);
    }

    #[test]
    fn rational_weights_are_scaled() {
        let w = WeightVector::from_rationals(vec![ratio(1, 2), ratio(1, 3)]).unwrap();
        let x = pv(&[1.0, 4.0]);
        let r = rearrange_samesum(&x, &w).unwrap();
        assert_eq!(r.scale_factor, BigInt::from(6));
        assert_eq!(r.expansion_size, 5);
        // Expanded (1,1,1,4,4) sorted (4,4,1,1,1): blocks (4,4,1) and (1,1).
        assert_eq!(r.y_exact, vec![int(3), int(1)]);
        let xe: Vec<BigRational> = x
            .as_slice()
            .iter()
            .map(|&v| rational::from_f64(v).unwrap())
            .collect();
        assert_eq!(
            weighted_sum_exact(&r.y_exact, &w),
            weighted_sum_exact(&xe, &w)
        );
    }

    #[test]
    fn refuses_what_it_cannot_do_exactly() {
        let x = pv(&[1.0, 2.0]);
        let float = WeightVector::from_f64(&[0.5, 0.25]).unwrap();
        assert_eq!(
            rearrange_samesum(&x, &float).unwrap_err(),
            HardyError::ExactRequired
        );
        let w = WeightVector::from_rationals(vec![ratio(1, 1_000_003), ratio(1, 999_983)]).unwrap();
        assert!(matches!(
            rearrange_samesum(&x, &w),
            Err(HardyError::BudgetExceeded { .. })
        ));
        assert!(
            rearrange_samesum_with_budget(&x, &WeightVector::from_ints(&[3, 4]).unwrap(), 6)
                .is_err()
        );
    }

    proptest! {
        #[test]
        fn preserves_sum_and_sorts(
            pairs in prop::collection::vec((1u32..2000, 1i64..7, 1i64..5), 1..10)
        ) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64 / 64.0).collect();
            let w = WeightVector::from_rationals(pairs.iter().map(|p| ratio(p.1, p.2)).collect()).unwrap();
            let r = rearrange_samesum(&pv(&x), &w).unwrap();
            let xe: Vec<BigRational> = x.iter().map(|&v| rational::from_f64(v).unwrap()).collect();
            prop_assert_eq!(weighted_sum_exact(&r.y_exact, &w), weighted_sum_exact(&xe, &w));
            prop_assert!(r.y_exact.windows(2).all(|p| p[0] >= p[1]));
            prop_assert!(r.y.windows(2).all(|p| p[0] >= p[1]));
            let k = r.scale_factor.clone();
            let c: Vec<u64> = w.entries().iter().map(|v| (v * &k).to_integer().to_u64().unwrap()).collect();
            prop_assert_eq!(&r.y_exact, &by_expansion(&x, &c));
        }
    }
}
