//! Exhaustive independent-transversal search.
//!
//! Backtracking over parts with forward checking: every chosen colour blocks
//! its conflict neighbours, each uncoloured part tracks how many of its colours
//! are still unblocked, and a part dropping to zero fails the branch at once.
//! The next part is the uncoloured one with fewest unblocked colours (lowest
//! index on ties); colours are tried in slot order.

use serde::{Deserialize, Serialize};

use crate::cover::{CoverInstance, PartialColouring};
use crate::ColourRef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    FindOne,
    CountAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Search-tree nodes (colour assignments) allowed before giving up.
    pub max_nodes: u64,
    pub mode: SearchMode,
}

impl SearchBudget {
    pub fn find(max_nodes: u64) -> Self {
        Self {
            max_nodes: max_nodes.max(1),
            mode: SearchMode::FindOne,
        }
    }

    pub fn count(max_nodes: u64) -> Self {
        Self {
            max_nodes: max_nodes.max(1),
            mode: SearchMode::CountAll,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(PartialColouring),
    None,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountOutcome {
    Count(u64),
    BudgetExhausted,
}

/// Test hook: with `forward_checking` off the search visits parts in index
/// order and only checks each choice against earlier choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub forward_checking: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            forward_checking: true,
        }
    }
}

pub fn find_transversal_exact(inst: &CoverInstance, budget: SearchBudget) -> SearchOutcome {
    find_transversal_with(inst, budget, SearchOptions::default())
}

pub fn find_transversal_with(
    inst: &CoverInstance,
    budget: SearchBudget,
    options: SearchOptions,
) -> SearchOutcome {
    let mut s = Search::new(inst, budget.max_nodes, true, options);
    match s.run() {
        Stop::Budget => SearchOutcome::BudgetExhausted,
        Stop::Found => SearchOutcome::Found(PartialColouring::from_colours(
            inst.num_parts(),
            s.chosen
                .iter()
                .enumerate()
                .map(|(p, &id)| ColourRef::new(p, id - inst.colour_ids(p).start)),
        )),
        Stop::Done => SearchOutcome::None,
    }
}

pub fn count_transversals(inst: &CoverInstance, budget: SearchBudget) -> CountOutcome {
    count_transversals_with(inst, budget, SearchOptions::default())
}

pub fn count_transversals_with(
    inst: &CoverInstance,
    budget: SearchBudget,
    options: SearchOptions,
) -> CountOutcome {
    let mut s = Search::new(inst, budget.max_nodes, false, options);
    match s.run() {
        Stop::Budget => CountOutcome::BudgetExhausted,
        Stop::Done | Stop::Found => CountOutcome::Count(s.count),
    }
}

enum Stop {
    Done,
    Found,
    Budget,
}

const UNSET: usize = usize::MAX;

struct Search<'a> {
    inst: &'a CoverInstance,
    options: SearchOptions,
    stop_at_first: bool,
    nodes_left: u64,
    /// Chosen colours adjacent to each colour.
    blocked: Vec<u32>,
    /// Unblocked colours per part.
    open: Vec<usize>,
    chosen: Vec<usize>,
    count: u64,
}

impl<'a> Search<'a> {
    fn new(inst: &'a CoverInstance, max_nodes: u64, stop_at_first: bool, options: SearchOptions) -> Self {
        Self {
            inst,
            options,
            stop_at_first,
            nodes_left: max_nodes,
            blocked: vec![0; inst.num_colours()],
            open: inst.list_lens(),
            chosen: vec![UNSET; inst.num_parts()],
            count: 0,
        }
    }

    fn run(&mut self) -> Stop {
        if self.inst.num_parts() == 0 {
            self.count = 1;
            return Stop::Found;
        }
        self.descend(0)
    }

    fn next_part(&self, depth: usize) -> usize {
        if !self.options.forward_checking {
            return depth;
        }
        (0..self.inst.num_parts())
            .filter(|&p| self.chosen[p] == UNSET)
            .min_by_key(|&p| (self.open[p], p))
            .expect("an uncoloured part remains")
    }

    fn descend(&mut self, depth: usize) -> Stop {
        if depth == self.inst.num_parts() {
            self.count += 1;
            return if self.stop_at_first { Stop::Found } else { Stop::Done };
        }
        let part = self.next_part(depth);
        for c in self.inst.colour_ids(part) {
            if self.blocked[c] > 0 {
                continue;
            }
            if self.nodes_left == 0 {
                return Stop::Budget;
            }
            self.nodes_left -= 1;
            self.chosen[part] = c;
            let alive = self.block(c);
            if alive {
                let r = self.descend(depth + 1);
                if !matches!(r, Stop::Done) {
                    return r;
                }
            }
            self.unblock(c);
            self.chosen[part] = UNSET;
        }
        Stop::Done
    }

    /// Block the neighbours of `c`; false if some uncoloured part is left
    /// without an unblocked colour (forward checking only).
    fn block(&mut self, c: usize) -> bool {
        let mut alive = true;
        for &w in self.inst.neighbours(c) {
            let w = w as usize;
            self.blocked[w] += 1;
            if self.blocked[w] == 1 {
                let p = self.inst.part_of(w);
                if self.chosen[p] == UNSET {
                    self.open[p] -= 1;
                    if self.open[p] == 0 && self.options.forward_checking {
                        alive = false;
                    }
                }
            }
        }
        alive
    }

    fn unblock(&mut self, c: usize) {
        for &w in self.inst.neighbours(c) {
            let w = w as usize;
            self.blocked[w] -= 1;
            if self.blocked[w] == 0 {
                let p = self.inst.part_of(w);
                if self.chosen[p] == UNSET {
                    self.open[p] += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::fixtures::tiny1;
    use crate::cover::InstanceData;
    use crate::is_independent_transversal;

    #[test]
    fn tiny1_has_exactly_b_d() {
        let t = tiny1();
        match find_transversal_exact(&t, SearchBudget::find(1000)) {
            SearchOutcome::Found(c) => {
                assert!(is_independent_transversal(&t, &c));
                assert_eq!(c.get(0), Some(ColourRef::new(0, 1)));
                assert_eq!(c.get(1), Some(ColourRef::new(1, 1)));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(count_transversals(&t, SearchBudget::count(1000)), CountOutcome::Count(1));
    }

    #[test]
    fn single_colours_in_conflict_have_no_transversal() {
        let data = InstanceData {
            parts: vec![vec!["x".into()], vec!["y".into()]],
            base_edges: vec![(0, 1, 1)],
            conflicts: vec![[ColourRef::new(0, 0), ColourRef::new(1, 0)]],
        };
        let inst = CoverInstance::from_data(data).unwrap();
        assert_eq!(find_transversal_exact(&inst, SearchBudget::find(10)), SearchOutcome::None);
        assert_eq!(count_transversals(&inst, SearchBudget::count(10)), CountOutcome::Count(0));
    }

    #[test]
    fn conflict_free_counts_the_product() {
        let data = InstanceData {
            parts: vec![vec!["a".into(), "b".into()], vec!["c".into(), "d".into(), "e".into()]],
            base_edges: vec![],
            conflicts: vec![],
        };
        let inst = CoverInstance::from_data(data).unwrap();
        assert!(matches!(
            find_transversal_exact(&inst, SearchBudget::find(10)),
            SearchOutcome::Found(_)
        ));
        assert_eq!(count_transversals(&inst, SearchBudget::count(100)), CountOutcome::Count(6));
    }

    #[test]
    fn single_part_counts_its_list() {
        let data = InstanceData {
            parts: vec![(0..5).map(|i| i.to_string()).collect()],
            ..Default::default()
        };
        let inst = CoverInstance::from_data(data).unwrap();
        assert_eq!(count_transversals(&inst, SearchBudget::count(100)), CountOutcome::Count(5));
    }

    #[test]
    fn budget_is_reported() {
        let data = InstanceData {
            parts: vec![vec!["a".into(), "b".into()]; 4],
            ..Default::default()
        };
        let inst = CoverInstance::from_data(data).unwrap();
        assert_eq!(count_transversals(&inst, SearchBudget::count(5)), CountOutcome::BudgetExhausted);
    }

    #[test]
    fn pruning_off_gives_the_same_count() {
        let t = tiny1();
        let off = SearchOptions { forward_checking: false };
        assert_eq!(
            count_transversals_with(&t, SearchBudget::count(100), off),
            CountOutcome::Count(1)
        );
    }
}
