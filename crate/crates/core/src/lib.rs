//! Independent transversals in vertex-partitioned cover graphs.
//!
//! The crate finds a choice of one colour per part with no conflict edge
//! between any two choices. Besides an exact backtracking search it carries a
//! randomized two-phase procedure for covers with bounded average colour
//! degree: multiplicity reduction by iterated random list halving, a schedule
//! of wasteful random colouring rounds that improve the list-size to
//! average-degree ratio, and an edge-resampling finisher once lists are four
//! times the average degree. Monte Carlo tooling checks the round statistics
//! against their closed forms.

// `!(x > 0.0)` is deliberate: NaN must fail these checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cover;
pub mod error;
pub mod finisher;
pub mod generators;
pub mod io;
pub mod nibble;
pub mod oracle;
pub mod par;
pub mod phase1;
pub mod pipeline;
pub mod reductions;
pub mod rng;

pub use cover::{
    apply_colouring, is_independent_transversal, stats, truncate_lists, validate, ColourRef,
    CoverInstance, Embedding, InstanceData, InstanceStats, PartialColouring, ResidualView, Violation,
};
pub use error::{Error, Result};
pub use par::Execution;
