//! Edge-resampling finisher.
//!
//! Once every list holds at least four times the maximum average colour
//! degree an independent transversal is known to exist. This module searches
//! for one with Moser–Tardos style resampling: the bad events are violated
//! conflict edges, and fixing one redraws the colours of its two endpoint
//! parts. Termination is observed, not guaranteed.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cover::{stats, CoverInstance, PartialColouring};
use crate::error::{Error, Result};
use crate::rng::{substream, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinisherParams {
    pub max_resamples: u64,
    pub seed: u64,
    pub enforce_precondition: bool,
    /// Required ratio of list size to `Δ̄_L(H)`.
    pub list_factor: f64,
}

impl FinisherParams {
    pub fn new(seed: u64) -> Self {
        Self {
            max_resamples: 1_000_000,
            seed,
            enforce_precondition: false,
            list_factor: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FinishOutcome {
    Found {
        colouring: PartialColouring,
        resamples: u64,
    },
    ResampleLimit {
        resamples: u64,
    },
}

impl FinishOutcome {
    pub fn colouring(&self) -> Option<&PartialColouring> {
        match self {
            FinishOutcome::Found { colouring, .. } => Some(colouring),
            FinishOutcome::ResampleLimit { .. } => None,
        }
    }

    pub fn resamples(&self) -> u64 {
        match self {
            FinishOutcome::Found { resamples, .. } | FinishOutcome::ResampleLimit { resamples } => *resamples,
        }
    }
}

/// Whether every list has at least `factor · Δ̄_L(H)` colours.
pub fn lists_are_long_enough(inst: &CoverInstance, factor: f64) -> bool {
    let s = stats(inst);
    s.min_list_size as f64 >= factor * s.avg_degree_f64()
}

pub fn finish(inst: &CoverInstance, params: &FinisherParams) -> Result<FinishOutcome> {
    if params.max_resamples == 0 {
        return Err(Error::InvalidArgument("max_resamples must be at least 1".into()));
    }
    if params.enforce_precondition && !lists_are_long_enough(inst, params.list_factor) {
        return Err(Error::Precondition(format!(
            "some list is shorter than {} times the maximum average colour degree",
            params.list_factor
        )));
    }
    let mut r = Resampler::new(inst, params.seed);
    while !r.is_done() {
        if r.resamples() == params.max_resamples {
            return Ok(FinishOutcome::ResampleLimit {
                resamples: r.resamples(),
            });
        }
        r.step();
    }
    let colouring = r.colouring();
    assert!(
        crate::is_independent_transversal(inst, &colouring),
        "resampler returned a conflicting assignment"
    );
    Ok(FinishOutcome::Found {
        colouring,
        resamples: r.resamples(),
    })
}

/// Resampling state: a total assignment plus the set of violated conflict
/// edges, kept as sorted global-id pairs so the least one is the first.
pub struct Resampler<'a> {
    inst: &'a CoverInstance,
    rng: StreamRng,
    chosen: Vec<usize>,
    violated: BTreeSet<(usize, usize)>,
    resamples: u64,
}

impl<'a> Resampler<'a> {
    /// Uniform random initial assignment drawn from stream 0 of `seed`.
    pub fn new(inst: &'a CoverInstance, seed: u64) -> Self {
        let mut rng = substream(seed, 0);
        let chosen: Vec<usize> = (0..inst.num_parts())
            .map(|p| inst.colour_ids(p).start + rng.random_range(0..inst.list_len(p)))
            .collect();
        let mut violated = BTreeSet::new();
        for &c in &chosen {
            for &w in inst.neighbours(c) {
                let w = w as usize;
                if c < w && chosen[inst.part_of(w)] == w {
                    violated.insert((c, w));
                }
            }
        }
        Self {
            inst,
            rng,
            chosen,
            violated,
            resamples: 0,
        }
    }

    pub fn is_done(&self) -> bool {
        self.violated.is_empty()
    }

    pub fn resamples(&self) -> u64 {
        self.resamples
    }

    pub fn colouring(&self) -> PartialColouring {
        PartialColouring::from_colours(
            self.inst.num_parts(),
            self.chosen.iter().map(|&c| self.inst.colour_ref(c)),
        )
    }

    /// Redraw both endpoints of the least violated edge. Returns the two parts
    /// touched, or `None` when nothing is violated.
    pub fn step(&mut self) -> Option<(usize, usize)> {
        let &(a, b) = self.violated.iter().next()?;
        let (pa, pb) = (self.inst.part_of(a), self.inst.part_of(b));
        self.redraw(pa);
        self.redraw(pb);
        self.resamples += 1;
        Some((pa, pb))
    }

    fn redraw(&mut self, part: usize) {
        let inst = self.inst;
        let old = self.chosen[part];
        for &w in inst.neighbours(old) {
            let w = w as usize;
            if self.chosen[inst.part_of(w)] == w {
                self.violated.remove(&(old.min(w), old.max(w)));
            }
        }
        let new = inst.colour_ids(part).start + self.rng.random_range(0..inst.list_len(part));
        self.chosen[part] = new;
        for &w in inst.neighbours(new) {
            let w = w as usize;
            if self.chosen[inst.part_of(w)] == w {
                self.violated.insert((new.min(w), new.max(w)));
            }
        }
    }
}
