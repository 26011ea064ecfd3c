//! The rearrangement construction and executable checks of the comparison
//! theorems.
//!
//! Checks return a [`CheckReport`]: a verdict, the number of instances tried,
//! the worst signed slack of the asserted inequality (negative means
//! violated) and the instance that produced it.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::json::serialize_ext;

mod experiments;
mod rearrange;
mod theorems;

pub use experiments::{
    explore_continuity, mu1_sweep, reproduce_lsc_example, ContinuityRow, LscRow, LscTable,
};
pub use rearrange::{
    rearrange_samesum, rearrange_samesum_with_budget, weighted_sum_exact, RearrangementResult,
    DEFAULT_BUDGET,
};
pub use theorems::{
    jcin_margin, jcin_sweep, replay_decreasing, replay_jcin, verify_cut, verify_decreasing,
    verify_jcin, CutMode, SweepConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// A search found no counterexample where none is guaranteed to exist.
    Inconclusive,
}

/// The instance behind the worst margin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckWitness {
    pub x: Vec<f64>,
    /// Weights as exact `p/q` strings.
    pub weights: Vec<String>,
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub schema: &'static str,
    pub check: String,
    pub verdict: Verdict,
    pub pass: bool,
    pub instances: usize,
    #[serde(serialize_with = "serialize_ext")]
    pub worst_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<CheckWitness>,
    pub details: BTreeMap<String, Value>,
}

impl CheckReport {
    pub(crate) fn new(check: &str, verdict: Verdict, instances: usize, worst_margin: f64) -> Self {
        CheckReport {
            schema: crate::SCHEMA,
            check: check.into(),
            verdict,
            pass: verdict == Verdict::Pass,
            instances,
            worst_margin,
            witness: None,
            details: BTreeMap::new(),
        }
    }

    pub(crate) fn detail(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.details.insert(key.into(), v.into());
        self
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Index of the smallest margin; ties go to the earliest instance.
pub(crate) fn argmin(margins: &[f64]) -> Option<usize> {
    margins
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &m)| match best {
            Some((_, b)) if b <= m => best,
            _ => Some((i, m)),
        })
        .map(|(i, _)| i)
}
