//! Variance-competitive estimation for monotone estimation problems (MEPs)
//! on finite domains under threshold (PPS) sampling.
//!
//! A MEP instance is a finite grid of values in `[0,1]` with a nonnegative
//! target `f`. A single uniform seed `u` drives the sampling scheme: a datum
//! `v` is revealed iff `u <= v`. The crate provides
//!
//! * per-datum lower-bound functions and variance-optimal (v-optimal)
//!   estimators via lower convex hulls ([`instance`], [`hull`]),
//! * the `alpha`-parameterized L* estimator family, its truncated in-range
//!   variant, and competitive-ratio evaluation ([`estimator`]),
//! * closed-form competitiveness bounds for the family ([`bounds`]),
//! * instance-optimal competitive estimators through a greedy feasibility
//!   subroutine driven by a binary search on the ratio ([`search`]),
//! * a coordinated-sampling simulator for exponentiated-range and `L_p^p`
//!   sum aggregates over two keyed value rows ([`coord`]).
//!
//! Everything is plain `f64` numerics over immutable inputs; all operations
//! are pure and safe for unsynchronized concurrent reads.

pub mod bounds;
pub mod coord;
pub mod density;
pub mod error;
pub mod estimator;
pub mod hull;
pub mod instance;
pub(crate) mod quad;
pub mod search;
pub mod stepfn;

pub use bounds::BoundsRow;
pub use coord::{BiasReport, KeyedDataset, SampleRecord};
pub use density::PiecewiseDensity;
pub use error::{MepError, Result};
pub use estimator::{AlphaLForm, EstimatorRef, EstimatorTable};
pub use hull::HullSegments;
pub use instance::{Family, InstanceFile, MepInstance, SeedPartition};
pub use search::{FeasibilityOutcome, FeasibilityStatus, OptimalResult, SweepRow};
pub use stepfn::StepFn;
