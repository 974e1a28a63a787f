//! Exact Malliavin calculus on finite product probability spaces and the
//! Stein-method normal approximation bounds built on top of it.
//!
//! Every random variable is a dense value table over the full outcome grid of
//! a [`ProductSpace`], so all operators (`D_k`, `δ`, `L`, `L⁻¹`, `Γ₀`) and all
//! expectations are computed by exhaustive enumeration, without sampling
//! error. The [`montecarlo`] module covers instances too large to enumerate.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
// Negated float comparisons deliberately treat NaN as a failed precondition.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

mod error;
pub mod math;

pub mod bounds;
pub mod graph_coloring;
pub mod hoeffding;
pub mod malliavin;
pub mod montecarlo;
pub mod product_space;
pub mod random_sums;
pub mod stein;
pub mod verify;

pub use bounds::{BoundMetadata, BoundReport, RademacherSpace, Term};
pub use error::{Error, Result};
pub use graph_coloring::{Graph, GraphStats};
pub use hoeffding::HoeffdingDecomposition;
pub use malliavin::Process;
pub use montecarlo::{SampleSummary, SplitMix64};
pub use product_space::{
    CoordSet, DiscreteDistribution, Functional, LawOfF, Outcome, ProductSpace, DEFAULT_MAX_OUTCOMES,
};
pub use random_sums::RandomSumSpec;
