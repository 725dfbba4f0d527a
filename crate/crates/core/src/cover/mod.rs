//! Vertex-partitioned cover graphs.
//!
//! A cover instance is a base multigraph `G` on parts `0..n`, a list of
//! colours per part, and a conflict graph `H` on the colours whose edges only
//! run between lists of `G`-adjacent parts. Colours are addressed by
//! [`ColourRef`] `(part, slot)`; labels ride along for I/O only.

mod colouring;
mod instance;
mod stats;
mod truncate;
mod validate;

pub use colouring::{apply_colouring, is_independent_transversal, PartialColouring, ResidualView};
pub use instance::{BaseEdge, CoverInstance, Embedding, InstanceData};
pub use stats::{stats, InstanceStats};
pub use truncate::truncate_lists;
pub use validate::{validate, Violation};

use serde::{Deserialize, Serialize};
use std::fmt;

/// A colour `c ∈ L(v)` addressed by its part `v` and its position in the list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct ColourRef {
    pub part: usize,
    pub slot: usize,
}

impl ColourRef {
    pub const fn new(part: usize, slot: usize) -> Self {
        Self { part, slot }
    }
}

impl From<[usize; 2]> for ColourRef {
    fn from([part, slot]: [usize; 2]) -> Self {
        Self { part, slot }
    }
}

impl From<ColourRef> for [usize; 2] {
    fn from(c: ColourRef) -> Self {
        [c.part, c.slot]
    }
}

impl fmt::Display for ColourRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.part, self.slot)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// One base edge `uv`, `L(u) = [a, b]`, `L(v) = [c, d]`,
    /// conflicts `a–c`, `a–d`, `b–c`.
    pub fn tiny1() -> CoverInstance {
        CoverInstance::from_data(tiny1_data()).unwrap()
    }

    pub fn tiny1_data() -> InstanceData {
        InstanceData {
            parts: vec![vec!["a".into(), "b".into()], vec!["c".into(), "d".into()]],
            base_edges: vec![(0, 1, 1)],
            conflicts: vec![
                [ColourRef::new(0, 0), ColourRef::new(1, 0)],
                [ColourRef::new(0, 0), ColourRef::new(1, 1)],
                [ColourRef::new(0, 1), ColourRef::new(1, 0)],
            ],
        }
    }
}
