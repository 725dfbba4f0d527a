//! Cover graphs built from list-, correspondence- and single-conflict
//! assignments.
//!
//! Both assignment types serialise with the instance field names (`parts` are
//! the lists, `base_edges` the base multigraph). Correspondence assignments
//! add `matchings`: one array of `[slot in L(u), slot in L(v)]` pairs per edge
//! occurrence, in `base_edges` order with each edge repeated `multiplicity`
//! times, oriented as the edge is written.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::cover::{validate, CoverInstance, InstanceData};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListAssignment {
    pub parts: Vec<Vec<String>>,
    pub base_edges: Vec<(usize, usize, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceAssignment {
    pub parts: Vec<Vec<String>>,
    pub base_edges: Vec<(usize, usize, u32)>,
    pub matchings: Vec<Vec<[usize; 2]>>,
}

impl CorrespondenceAssignment {
    /// `(u, v, matching)` for every edge occurrence.
    pub fn occurrences(&self) -> impl Iterator<Item = (usize, usize, &[[usize; 2]])> + '_ {
        self.base_edges
            .iter()
            .flat_map(|&(u, v, m)| std::iter::repeat_n((u, v), m as usize))
            .zip(&self.matchings)
            .map(|((u, v), m)| (u, v, m.as_slice()))
    }
}

fn check_base(parts: &[Vec<String>], base_edges: &[(usize, usize, u32)]) -> Result<()> {
    let violations = validate(&InstanceData {
        parts: parts.to_vec(),
        base_edges: base_edges.to_vec(),
        conflicts: Vec::new(),
    });
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(violations))
    }
}

/// `H_ℓ`: `(v, c)(v', c)` is a conflict for every base edge `vv'` and every
/// label `c` in both lists. Parallel base edges add nothing.
pub fn build_list_cover(assignment: &ListAssignment) -> Result<CoverInstance> {
    check_base(&assignment.parts, &assignment.base_edges)?;
    for (part, list) in assignment.parts.iter().enumerate() {
        let distinct: HashSet<&String> = list.iter().collect();
        if distinct.len() != list.len() {
            return Err(Error::InvalidArgument(format!("list of part {part} repeats a colour")));
        }
    }
    let offsets = offsets(&assignment.parts);
    let mut conflicts = Vec::new();
    for &(u, v, _) in &assignment.base_edges {
        for (i, label) in assignment.parts[u].iter().enumerate() {
            if let Some(j) = assignment.parts[v].iter().position(|l| l == label) {
                let (a, b) = (offsets[u] + i, offsets[v] + j);
                conflicts.push((a.min(b), a.max(b)));
            }
        }
    }
    Ok(CoverInstance::from_trusted(
        assignment.parts.clone(),
        assignment.base_edges.clone(),
        &conflicts,
    ))
}

fn offsets(parts: &[Vec<String>]) -> Vec<usize> {
    parts
        .iter()
        .scan(0, |acc, l| {
            let start = *acc;
            *acc += l.len();
            Some(start)
        })
        .collect()
}

fn check_matchings(a: &CorrespondenceAssignment) -> Result<()> {
    check_base(&a.parts, &a.base_edges)?;
    let expected: usize = a.base_edges.iter().map(|&(_, _, m)| m as usize).sum();
    if a.matchings.len() != expected {
        return Err(Error::InvalidArgument(format!(
            "{} matchings for {expected} edge occurrences",
            a.matchings.len()
        )));
    }
    for (k, (u, v, m)) in a.occurrences().enumerate() {
        let mut left = HashSet::new();
        let mut right = HashSet::new();
        for &[su, sv] in m {
            if su >= a.parts[u].len() || sv >= a.parts[v].len() {
                return Err(Error::InvalidArgument(format!(
                    "matching #{k} pairs slots ({su}, {sv}) outside the lists of parts {u} and {v}"
                )));
            }
            if !left.insert(su) || !right.insert(sv) {
                return Err(Error::InvalidArgument(format!(
                    "matching #{k} reuses a slot, so it is not a matching"
                )));
            }
        }
    }
    Ok(())
}

fn matched_pairs(a: &CorrespondenceAssignment) -> BTreeSet<(usize, usize)> {
    let offsets = offsets(&a.parts);
    let mut pairs = BTreeSet::new();
    for (u, v, m) in a.occurrences() {
        for &[su, sv] in m {
            let (x, y) = (offsets[u] + su, offsets[v] + sv);
            pairs.insert((x.min(y), x.max(y)));
        }
    }
    pairs
}

/// `H_DP`: the union of the matchings over all edge occurrences.
pub fn build_dp_cover(assignment: &CorrespondenceAssignment) -> Result<CoverInstance> {
    check_matchings(assignment)?;
    let conflicts: Vec<_> = matched_pairs(assignment).into_iter().collect();
    Ok(CoverInstance::from_trusted(
        assignment.parts.clone(),
        assignment.base_edges.clone(),
        &conflicts,
    ))
}

/// A single-conflict cover with its per-part degree identity.
#[derive(Debug, Clone)]
pub struct SingleConflictCover {
    pub instance: CoverInstance,
    /// `(Σ_{c ∈ L(v)} deg_H(c), deg_G(v))` per part; equal when every edge
    /// occurrence contributed its own conflict.
    pub degree_identity: Vec<(u64, u64)>,
}

impl SingleConflictCover {
    pub fn identity_holds(&self) -> bool {
        self.degree_identity.iter().all(|(h, g)| h == g)
    }
}

/// Every edge occurrence carries exactly one conflict pair; parallel
/// occurrences must use distinct pairs so that `|E_H(L(v), L(v'))| = μ_G(vv')`.
pub fn build_single_conflict_cover(assignment: &CorrespondenceAssignment) -> Result<SingleConflictCover> {
    check_matchings(assignment)?;
    if let Some(k) = assignment.matchings.iter().position(|m| m.len() != 1) {
        return Err(Error::InvalidArgument(format!(
            "matching #{k} has {} pairs, expected exactly one",
            assignment.matchings[k].len()
        )));
    }
    let pairs = matched_pairs(assignment);
    if pairs.len() != assignment.matchings.len() {
        return Err(Error::InvalidArgument(
            "parallel edge occurrences repeat a conflict pair".into(),
        ));
    }
    let conflicts: Vec<_> = pairs.into_iter().collect();
    let instance = CoverInstance::from_trusted(
        assignment.parts.clone(),
        assignment.base_edges.clone(),
        &conflicts,
    );
    let degree_identity = (0..instance.num_parts())
        .map(|p| (instance.degree_sum(p), instance.base_degree(p)))
        .collect();
    Ok(SingleConflictCover {
        instance,
        degree_identity,
    })
}

/// True iff every matched pair joins equal labels (compared as strings).
pub fn check_adaptable(assignment: &CorrespondenceAssignment) -> bool {
    assignment.occurrences().all(|(u, v, m)| {
        m.iter().all(|&[su, sv]| {
            match (assignment.parts[u].get(su), assignment.parts[v].get(sv)) {
                (Some(a), Some(b)) => a == b,
                _ => false,
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{stats, ColourRef};

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn k2(l: &[&str], r: &[&str]) -> ListAssignment {
        ListAssignment {
            parts: vec![labels(l), labels(r)],
            base_edges: vec![(0, 1, 1)],
        }
    }

    #[test]
    fn list_cover_on_shared_colours() {
        let h = build_list_cover(&k2(&["1", "2"], &["1", "2"])).unwrap();
        let pairs: Vec<_> = h.conflict_pairs().collect();
        assert_eq!(pairs, vec![(0, 2), (1, 3)]);
        assert_eq!(stats(&h).max_colour_multiplicity, 1);
    }

    #[test]
    fn list_cover_with_disjoint_lists_is_conflict_free() {
        let h = build_list_cover(&k2(&["1", "2"], &["3", "4"])).unwrap();
        assert_eq!(h.num_conflicts(), 0);
    }

    #[test]
    fn list_cover_collapses_parallel_edges() {
        let mut a = k2(&["1", "2"], &["1"]);
        a.base_edges[0].2 = 3;
        let h = build_list_cover(&a).unwrap();
        assert_eq!(h.num_conflicts(), 1);
        assert_eq!(h.base_degree(0), 3);
    }

    #[test]
    fn list_cover_rejects_repeated_labels() {
        assert!(build_list_cover(&k2(&["1", "1"], &["2"])).is_err());
    }

    fn dp(matchings: Vec<Vec<[usize; 2]>>, mult: u32, l: &[&str], r: &[&str]) -> CorrespondenceAssignment {
        CorrespondenceAssignment {
            parts: vec![labels(l), labels(r)],
            base_edges: vec![(0, 1, mult)],
            matchings,
        }
    }

    #[test]
    fn identity_matchings_reproduce_the_list_cover() {
        let a = dp(vec![vec![[0, 0], [1, 1]]], 1, &["1", "2"], &["1", "2"]);
        let list = build_list_cover(&k2(&["1", "2"], &["1", "2"])).unwrap();
        assert_eq!(build_dp_cover(&a).unwrap(), list);
        assert!(check_adaptable(&a));
    }

    #[test]
    fn crossed_matching() {
        let a = dp(vec![vec![[0, 1], [1, 0]]], 1, &["1", "2"], &["1", "2"]);
        let h = build_dp_cover(&a).unwrap();
        assert_eq!(h.conflict_pairs().collect::<Vec<_>>(), vec![(0, 3), (1, 2)]);
        assert!(!check_adaptable(&a));
    }

    #[test]
    fn crossed_matching_over_equal_labels_is_adaptable() {
        let a = dp(vec![vec![[0, 1], [1, 0]]], 1, &["x", "y"], &["y", "x"]);
        assert!(check_adaptable(&a));
    }

    #[test]
    fn double_edge_gives_multiplicity_two() {
        let a = dp(vec![vec![[0, 0]], vec![[0, 1]]], 2, &["1", "2"], &["1", "2"]);
        let h = build_dp_cover(&a).unwrap();
        assert_eq!(h.degree(h.colour_id(ColourRef::new(0, 0))), 2);
        assert_eq!(stats(&h).max_colour_multiplicity, 2);
    }

    #[test]
    fn bad_matchings_are_rejected() {
        let out_of_range = dp(vec![vec![[0, 5]]], 1, &["1"], &["1"]);
        assert!(build_dp_cover(&out_of_range).is_err());
        let not_matching = dp(vec![vec![[0, 0], [0, 1]]], 1, &["1"], &["1", "2"]);
        assert!(build_dp_cover(&not_matching).is_err());
        let too_few = dp(vec![], 1, &["1"], &["1"]);
        assert!(build_dp_cover(&too_few).is_err());
    }

    #[test]
    fn single_conflict_on_a_triangle() {
        let a = CorrespondenceAssignment {
            parts: vec![labels(&["1", "2"]); 3],
            base_edges: vec![(0, 1, 1), (1, 2, 1), (0, 2, 1)],
            matchings: vec![vec![[1, 0]], vec![[0, 0]], vec![[1, 1]]],
        };
        let out = build_single_conflict_cover(&a).unwrap();
        assert_eq!(out.instance.num_conflicts(), 3);
        assert!(out.identity_holds());
    }

    #[test]
    fn single_conflict_rejects_wider_matchings() {
        let a = dp(vec![vec![[0, 0], [1, 1]]], 1, &["1", "2"], &["1", "2"]);
        assert!(build_single_conflict_cover(&a).is_err());
        let repeated = dp(vec![vec![[0, 0]], vec![[0, 0]]], 2, &["1", "2"], &["1", "2"]);
        assert!(build_single_conflict_cover(&repeated).is_err());
    }
}
