use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{ColourRef, InstanceData};

/// One broken instance invariant, with the offending indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EmptyList { part: usize },
    BaseEdgeOutOfRange { edge: usize, u: usize, v: usize },
    BaseSelfLoop { edge: usize, part: usize },
    ZeroMultiplicity { edge: usize, u: usize, v: usize },
    DuplicateBaseEdge { edge: usize, u: usize, v: usize },
    ColourOutOfRange { conflict: usize, colour: ColourRef },
    IntraPartEdge { conflict: usize, part: usize, slots: (usize, usize) },
    NotCoverEdge { conflict: usize, u: usize, v: usize },
    ParallelConflict { conflict: usize, a: ColourRef, b: ColourRef },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyList { part } => write!(f, "list of part {part} is empty"),
            Violation::BaseEdgeOutOfRange { edge, u, v } => {
                write!(f, "base edge #{edge} ({u}, {v}) names a missing part")
            }
            Violation::BaseSelfLoop { edge, part } => {
                write!(f, "base edge #{edge} is a loop at part {part}")
            }
            Violation::ZeroMultiplicity { edge, u, v } => {
                write!(f, "base edge #{edge} ({u}, {v}) has multiplicity 0")
            }
            Violation::DuplicateBaseEdge { edge, u, v } => {
                write!(f, "base edge #{edge} ({u}, {v}) repeats an earlier edge")
            }
            Violation::ColourOutOfRange { conflict, colour } => {
                write!(f, "conflict #{conflict} names missing colour {colour}")
            }
            Violation::IntraPartEdge { conflict, part, slots } => write!(
                f,
                "conflict #{conflict} joins slots {} and {} inside part {part}",
                slots.0, slots.1
            ),
            Violation::NotCoverEdge { conflict, u, v } => write!(
                f,
                "conflict #{conflict} joins parts {u} and {v}, which are not adjacent in the base graph"
            ),
            Violation::ParallelConflict { conflict, a, b } => {
                write!(f, "conflict #{conflict} repeats the edge {a}–{b}")
            }
        }
    }
}

/// Every violated instance invariant; empty when the data is a valid cover.
pub fn validate(data: &InstanceData) -> Vec<Violation> {
    let n = data.parts.len();
    let mut out = Vec::new();

    for (part, list) in data.parts.iter().enumerate() {
        if list.is_empty() {
            out.push(Violation::EmptyList { part });
        }
    }

    let mut base = HashSet::new();
    for (edge, &(u, v, m)) in data.base_edges.iter().enumerate() {
        if u >= n || v >= n {
            out.push(Violation::BaseEdgeOutOfRange { edge, u, v });
            continue;
        }
        if u == v {
            out.push(Violation::BaseSelfLoop { edge, part: u });
            continue;
        }
        if m == 0 {
            out.push(Violation::ZeroMultiplicity { edge, u, v });
        }
        if !base.insert((u.min(v), u.max(v))) {
            out.push(Violation::DuplicateBaseEdge { edge, u, v });
        }
    }

    let in_range = |c: &ColourRef| c.part < n && c.slot < data.parts[c.part].len();
    let mut seen = HashSet::new();
    for (conflict, [a, b]) in data.conflicts.iter().enumerate() {
        let mut ok = true;
        for c in [a, b] {
            if !in_range(c) {
                out.push(Violation::ColourOutOfRange { conflict, colour: *c });
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        if a.part == b.part {
            out.push(Violation::IntraPartEdge {
                conflict,
                part: a.part,
                slots: (a.slot, b.slot),
            });
            continue;
        }
        if !base.contains(&(a.part.min(b.part), a.part.max(b.part))) {
            out.push(Violation::NotCoverEdge {
                conflict,
                u: a.part,
                v: b.part,
            });
        }
        if !seen.insert((*a.min(b), *a.max(b))) {
            out.push(Violation::ParallelConflict {
                conflict,
                a: *a,
                b: *b,
            });
        }
    }
    out
}
