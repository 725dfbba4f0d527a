use serde::{Deserialize, Serialize};

use super::validate::validate;
use super::ColourRef;
use crate::error::{Error, Result};

/// An edge `uv` of the base multigraph with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BaseEdge {
    pub u: usize,
    pub v: usize,
    pub multiplicity: u32,
}

/// Serialized form of a cover instance; may be invalid until checked.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InstanceData {
    pub parts: Vec<Vec<String>>,
    pub base_edges: Vec<(usize, usize, u32)>,
    #[serde(default)]
    pub conflicts: Vec<[ColourRef; 2]>,
}

/// Immutable, validated cover instance.
///
/// Colours also carry a dense global id (`offset(part) + slot`), ordered by
/// part then slot, so comparing ids agrees with comparing [`ColourRef`]s.
/// Conflict adjacency is stored compressed with sorted neighbour rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverInstance {
    labels: Vec<Vec<String>>,
    offsets: Vec<usize>,
    part_of: Vec<u32>,
    base_edges: Vec<BaseEdge>,
    base_adj: Vec<Vec<(usize, u32)>>,
    adj_start: Vec<usize>,
    adj: Vec<u32>,
}

impl CoverInstance {
    /// Validate and build. All violations are reported at once.
    pub fn from_data(data: InstanceData) -> Result<Self> {
        let violations = validate(&data);
        if !violations.is_empty() {
            return Err(Error::InvalidInstance(violations));
        }
        let InstanceData {
            parts,
            base_edges,
            conflicts,
        } = data;
        let base = base_edges
            .into_iter()
            .map(|(u, v, m)| (u.min(v), u.max(v), m))
            .collect();
        let mut inst = Self::skeleton(parts, base);
        let pairs: Vec<(usize, usize)> = conflicts
            .iter()
            .map(|[a, b]| (inst.colour_id(*a), inst.colour_id(*b)))
            .collect();
        inst.set_conflicts(&pairs);
        Ok(inst)
    }

    /// Build from trusted pieces: base edges as `(u, v, multiplicity)` with
    /// distinct unordered pairs and conflicts as global-id pairs that respect
    /// every instance invariant.
    pub(crate) fn from_trusted(
        labels: Vec<Vec<String>>,
        base_edges: Vec<(usize, usize, u32)>,
        conflicts: &[(usize, usize)],
    ) -> Self {
        let mut inst = Self::skeleton(labels, base_edges);
        inst.set_conflicts(conflicts);
        debug_assert!(validate(&inst.to_data()).is_empty());
        inst
    }

    fn skeleton(labels: Vec<Vec<String>>, base: Vec<(usize, usize, u32)>) -> Self {
        let n = labels.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut part_of = Vec::new();
        let mut total = 0;
        for (p, list) in labels.iter().enumerate() {
            offsets.push(total);
            total += list.len();
            part_of.extend(std::iter::repeat_n(p as u32, list.len()));
        }
        offsets.push(total);

        let mut base_edges: Vec<BaseEdge> = base
            .into_iter()
            .map(|(u, v, multiplicity)| BaseEdge {
                u: u.min(v),
                v: u.max(v),
                multiplicity,
            })
            .collect();
        base_edges.sort_unstable();
        let mut base_adj = vec![Vec::new(); n];
        for e in &base_edges {
            base_adj[e.u].push((e.v, e.multiplicity));
            base_adj[e.v].push((e.u, e.multiplicity));
        }
        for row in &mut base_adj {
            row.sort_unstable();
        }
        Self {
            labels,
            offsets,
            part_of,
            base_edges,
            base_adj,
            adj_start: vec![0; total + 1],
            adj: Vec::new(),
        }
    }

    fn set_conflicts(&mut self, pairs: &[(usize, usize)]) {
        let total = self.num_colours();
        let mut deg = vec![0usize; total];
        for &(a, b) in pairs {
            deg[a] += 1;
            deg[b] += 1;
        }
        let mut start = vec![0usize; total + 1];
        for i in 0..total {
            start[i + 1] = start[i] + deg[i];
        }
        let mut fill = start.clone();
        let mut adj = vec![0u32; start[total]];
        for &(a, b) in pairs {
            adj[fill[a]] = b as u32;
            fill[a] += 1;
            adj[fill[b]] = a as u32;
            fill[b] += 1;
        }
        for i in 0..total {
            adj[start[i]..start[i + 1]].sort_unstable();
        }
        self.adj_start = start;
        self.adj = adj;
    }

    pub fn num_parts(&self) -> usize {
        self.labels.len()
    }

    pub fn num_colours(&self) -> usize {
        self.part_of.len()
    }

    pub fn num_conflicts(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn list_len(&self, part: usize) -> usize {
        self.offsets[part + 1] - self.offsets[part]
    }

    pub fn list_lens(&self) -> Vec<usize> {
        (0..self.num_parts()).map(|p| self.list_len(p)).collect()
    }

    pub fn labels(&self, part: usize) -> &[String] {
        &self.labels[part]
    }

    pub fn label(&self, c: ColourRef) -> &str {
        &self.labels[c.part][c.slot]
    }

    /// Global ids of the colours in `L(part)`.
    pub fn colour_ids(&self, part: usize) -> std::ops::Range<usize> {
        self.offsets[part]..self.offsets[part + 1]
    }

    pub fn colour_id(&self, c: ColourRef) -> usize {
        debug_assert!(c.slot < self.list_len(c.part));
        self.offsets[c.part] + c.slot
    }

    pub fn colour_ref(&self, id: usize) -> ColourRef {
        let part = self.part_of[id] as usize;
        ColourRef::new(part, id - self.offsets[part])
    }

    pub fn part_of(&self, id: usize) -> usize {
        self.part_of[id] as usize
    }

    /// `N_H(c)` as sorted global ids.
    pub fn neighbours(&self, id: usize) -> &[u32] {
        &self.adj[self.adj_start[id]..self.adj_start[id + 1]]
    }

    pub fn degree(&self, id: usize) -> usize {
        self.adj_start[id + 1] - self.adj_start[id]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.num_colours()).map(|c| self.degree(c)).collect()
    }

    /// `Σ_{c ∈ L(part)} deg_H(c)`.
    pub fn degree_sum(&self, part: usize) -> u64 {
        let r = self.colour_ids(part);
        (self.adj_start[r.end] - self.adj_start[r.start]) as u64
    }

    pub fn has_conflict(&self, a: usize, b: usize) -> bool {
        self.neighbours(a).binary_search(&(b as u32)).is_ok()
    }

    pub fn base_edges(&self) -> &[BaseEdge] {
        &self.base_edges
    }

    /// Base neighbours of `part` with edge multiplicities, sorted.
    pub fn base_neighbours(&self, part: usize) -> &[(usize, u32)] {
        &self.base_adj[part]
    }

    /// `deg_G(part)` counting multiplicity.
    pub fn base_degree(&self, part: usize) -> u64 {
        self.base_adj[part].iter().map(|&(_, m)| m as u64).sum()
    }

    /// Conflict edges as global-id pairs `(a, b)` with `a < b`, sorted.
    pub fn conflict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_colours()).flat_map(move |a| {
            self.neighbours(a)
                .iter()
                .map(|&b| b as usize)
                .filter(move |&b| a < b)
                .map(move |b| (a, b))
        })
    }

    pub fn to_data(&self) -> InstanceData {
        InstanceData {
            parts: self.labels.clone(),
            base_edges: self
                .base_edges
                .iter()
                .map(|e| (e.u, e.v, e.multiplicity))
                .collect(),
            conflicts: self
                .conflict_pairs()
                .map(|(a, b)| [self.colour_ref(a), self.colour_ref(b)])
                .collect(),
        }
    }

    /// The sub-cover induced by a selection of parts and, for each, an
    /// ascending subset of its slots. Base edges between selected parts are
    /// kept with their multiplicity even when no conflicts survive on them.
    pub fn induced(&self, selection: &[(usize, Vec<usize>)]) -> (CoverInstance, Embedding) {
        const NONE: u32 = u32::MAX;
        let mut new_part = vec![NONE; self.num_parts()];
        let mut new_id = vec![NONE; self.num_colours()];
        let mut labels = Vec::with_capacity(selection.len());
        let mut next = 0u32;
        for (i, (part, slots)) in selection.iter().enumerate() {
            debug_assert!(slots.windows(2).all(|w| w[0] < w[1]));
            new_part[*part] = i as u32;
            labels.push(slots.iter().map(|&s| self.labels[*part][s].clone()).collect());
            for &s in slots {
                new_id[self.offsets[*part] + s] = next;
                next += 1;
            }
        }
        let base = self
            .base_edges
            .iter()
            .filter(|e| new_part[e.u] != NONE && new_part[e.v] != NONE)
            .map(|e| (new_part[e.u] as usize, new_part[e.v] as usize, e.multiplicity))
            .collect();
        let mut conflicts = Vec::new();
        for (part, slots) in selection {
            for &s in slots {
                let a = self.offsets[*part] + s;
                for &b in self.neighbours(a) {
                    let (na, nb) = (new_id[a], new_id[b as usize]);
                    if nb != NONE && na < nb {
                        conflicts.push((na as usize, nb as usize));
                    }
                }
            }
        }
        let inst = CoverInstance::from_trusted(labels, base, &conflicts);
        let embedding = Embedding {
            parts: selection.iter().map(|(p, _)| *p).collect(),
            slots: selection.iter().map(|(_, s)| s.clone()).collect(),
        };
        (inst, embedding)
    }
}

/// Where each colour of a derived sub-cover came from: child part `i` is
/// parent part `parts[i]`, and child slot `j` there is parent slot
/// `slots[i][j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub parts: Vec<usize>,
    pub slots: Vec<Vec<usize>>,
}

impl Embedding {
    pub fn identity(inst: &CoverInstance) -> Self {
        Self {
            parts: (0..inst.num_parts()).collect(),
            slots: (0..inst.num_parts())
                .map(|p| (0..inst.list_len(p)).collect())
                .collect(),
        }
    }

    pub fn map(&self, c: ColourRef) -> ColourRef {
        ColourRef::new(self.parts[c.part], self.slots[c.part][c.slot])
    }

    /// `self` maps child → middle, `outer` maps middle → top; the result maps
    /// child → top.
    pub fn then(&self, outer: &Embedding) -> Embedding {
        let parts = self.parts.iter().map(|&m| outer.parts[m]).collect();
        let slots = self
            .parts
            .iter()
            .zip(&self.slots)
            .map(|(&m, slots)| slots.iter().map(|&s| outer.slots[m][s]).collect())
            .collect();
        Embedding { parts, slots }
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::tiny1;
    use super::*;

    #[test]
    fn adjacency_is_symmetric_and_sorted() {
        let t = tiny1();
        assert_eq!(t.num_colours(), 4);
        assert_eq!(t.num_conflicts(), 3);
        assert_eq!(t.neighbours(0), &[2, 3]);
        assert_eq!(t.neighbours(1), &[2]);
        assert_eq!(t.neighbours(2), &[0, 1]);
        assert_eq!(t.neighbours(3), &[0]);
        assert!(t.has_conflict(3, 0));
        assert!(!t.has_conflict(1, 3));
    }

    #[test]
    fn ids_round_trip() {
        let t = tiny1();
        for id in 0..t.num_colours() {
            assert_eq!(t.colour_id(t.colour_ref(id)), id);
        }
        assert_eq!(t.colour_ref(3), ColourRef::new(1, 1));
        assert_eq!(t.label(ColourRef::new(1, 1)), "d");
    }

    #[test]
    fn data_round_trip() {
        let t = tiny1();
        assert_eq!(CoverInstance::from_data(t.to_data()).unwrap(), t);
    }

    #[test]
    fn induced_keeps_only_selected_colours() {
        let t = tiny1();
        let (sub, emb) = t.induced(&[(0, vec![1]), (1, vec![0, 1])]);
        assert_eq!(sub.list_len(0), 1);
        assert_eq!(sub.labels(0), &["b".to_string()]);
        assert_eq!(sub.num_conflicts(), 1);
        assert_eq!(emb.map(ColourRef::new(0, 0)), ColourRef::new(0, 1));
        assert_eq!(sub.base_edges().len(), 1);
    }

    #[test]
    fn embeddings_compose() {
        let t = tiny1();
        let (a, ea) = t.induced(&[(1, vec![0, 1]), (0, vec![0, 1])]);
        let (_, eb) = a.induced(&[(1, vec![1])]);
        let composed = eb.then(&ea);
        assert_eq!(composed.map(ColourRef::new(0, 0)), ColourRef::new(0, 1));
    }
}
