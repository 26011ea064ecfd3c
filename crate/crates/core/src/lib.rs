//! Weighted means, weighted Hardy constants and executable checks of their
//! structural properties.
//!
//! The crate is organised bottom-up:
//!
//! * [`mean`] and [`step`] hold the weighted-mean abstraction, weight and point
//!   vectors, and the step-function (integral-type) view of a mean.
//! * [`axioms`] turns the weighted-mean axioms and capability flags into
//!   randomized checks.
//! * [`families`] provides power means and quasi-arithmetic means.
//! * [`weights`] models infinite weight sequences with exact partial sums,
//!   partition coarsening and the partition-order certificate.
//! * [`hardy`] computes Hardy constants: closed forms, limit formulas and the
//!   finite-section extremal search.
//! * [`checks`] holds the rearrangement construction and the comparison checks
//!   (cut theorem, decreasing integral means, semicontinuity example).

pub mod axioms;
pub mod checks;
pub mod error;
pub mod families;
pub mod hardy;
pub mod json;
pub mod mean;
pub mod rational;
pub mod step;
pub mod weights;

pub use error::{HardyError, Result};
pub use mean::{
    evaluate, shuffle, MeanFlags, MeanSpec, NumberMode, PointVector, WeightVector, WeightedMean,
};
pub use step::{chi, integral_eval, StepFunction};
pub use weights::{Blocks, WeightSeq};

/// Schema tag carried by every serialized report.
pub const SCHEMA: &str = "hardy-lab/1";
