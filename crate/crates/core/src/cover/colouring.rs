use serde::{Deserialize, Serialize};

use super::{ColourRef, CoverInstance, Embedding};
use crate::error::{Error, Result};

/// A colouring of some subset `C` of the parts, one slot per coloured part.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PartialColouring {
    slots: Vec<Option<usize>>,
}

impl PartialColouring {
    pub fn empty(num_parts: usize) -> Self {
        Self {
            slots: vec![None; num_parts],
        }
    }

    pub fn from_colours(num_parts: usize, colours: impl IntoIterator<Item = ColourRef>) -> Self {
        let mut out = Self::empty(num_parts);
        for c in colours {
            out.set(c);
        }
        out
    }

    pub fn set(&mut self, c: ColourRef) {
        self.slots[c.part] = Some(c.slot);
    }

    pub fn clear(&mut self, part: usize) {
        self.slots[part] = None;
    }

    pub fn get(&self, part: usize) -> Option<ColourRef> {
        self.slots[part].map(|slot| ColourRef::new(part, slot))
    }

    pub fn num_parts(&self) -> usize {
        self.slots.len()
    }

    /// Number of coloured parts, `|C|`.
    pub fn len(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.iter().all(Option::is_none)
    }

    pub fn is_total(&self) -> bool {
        self.slots.iter().all(Option::is_some)
    }

    pub fn colours(&self) -> impl Iterator<Item = ColourRef> + '_ {
        (0..self.slots.len()).filter_map(|p| self.get(p))
    }

    /// Carry the colouring of a derived sub-cover back to its parent.
    pub fn lift(&self, embedding: &Embedding, parent_parts: usize) -> PartialColouring {
        PartialColouring::from_colours(parent_parts, self.colours().map(|c| embedding.map(c)))
    }

    /// Every conflict edge joining two chosen colours, as `(a, b)` with `a < b`.
    pub fn conflicts(&self, inst: &CoverInstance) -> Vec<(ColourRef, ColourRef)> {
        let mut out = Vec::new();
        for a in self.colours() {
            let ida = inst.colour_id(a);
            for &idb in inst.neighbours(ida) {
                let b = inst.colour_ref(idb as usize);
                if a < b && self.slots[b.part] == Some(b.slot) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    fn check_shape(&self, inst: &CoverInstance) -> Result<()> {
        if self.slots.len() != inst.num_parts() {
            return Err(Error::InvalidArgument(format!(
                "colouring covers {} parts, instance has {}",
                self.slots.len(),
                inst.num_parts()
            )));
        }
        for c in self.colours() {
            if c.slot >= inst.list_len(c.part) {
                return Err(Error::InvalidArgument(format!(
                    "colour {c} is outside its list"
                )));
            }
        }
        Ok(())
    }

    /// Whether `{φ(v) : v ∈ C}` is independent in `H`.
    pub fn is_proper(&self, inst: &CoverInstance) -> bool {
        self.check_shape(inst).is_ok() && self.conflicts(inst).is_empty()
    }
}

/// True iff `colouring` is total and no conflict edge joins two chosen colours.
pub fn is_independent_transversal(inst: &CoverInstance, colouring: &PartialColouring) -> bool {
    colouring.is_total() && colouring.is_proper(inst)
}

/// The residual problem left by a proper partial colouring `φ`: for each
/// uncoloured part, the slots that are still `φ`-useable.
#[derive(Debug, Clone)]
pub struct ResidualView<'a> {
    pub parent: &'a CoverInstance,
    pub colouring: PartialColouring,
    /// Indexed by part; empty for coloured parts.
    pub surviving: Vec<Vec<usize>>,
}

impl ResidualView<'_> {
    pub fn uncoloured_parts(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.parent.num_parts()).filter(|&p| self.colouring.get(p).is_none())
    }

    /// `(L^φ_uncol, H^φ_uncol)` as a standalone instance plus its embedding in
    /// the parent. Fails if some uncoloured part has no useable colour left.
    pub fn materialize(&self) -> Result<(CoverInstance, Embedding)> {
        let selection: Vec<(usize, Vec<usize>)> = self
            .uncoloured_parts()
            .map(|p| (p, self.surviving[p].clone()))
            .collect();
        let empty: Vec<_> = selection
            .iter()
            .filter(|(_, s)| s.is_empty())
            .map(|&(part, _)| super::Violation::EmptyList { part })
            .collect();
        if !empty.is_empty() {
            return Err(Error::InvalidInstance(empty));
        }
        Ok(self.parent.induced(&selection))
    }
}

/// Restrict the instance to `φ`-useable colours of `φ`-uncoloured parts.
pub fn apply_colouring<'a>(
    inst: &'a CoverInstance,
    colouring: &PartialColouring,
) -> Result<ResidualView<'a>> {
    colouring.check_shape(inst)?;
    if let Some(&(a, b)) = colouring.conflicts(inst).first() {
        return Err(Error::ImproperColouring(a, b));
    }
    let mut unuseable = vec![false; inst.num_colours()];
    for c in colouring.colours() {
        for &w in inst.neighbours(inst.colour_id(c)) {
            unuseable[w as usize] = true;
        }
    }
    let surviving = (0..inst.num_parts())
        .map(|p| {
            if colouring.get(p).is_some() {
                Vec::new()
            } else {
                inst.colour_ids(p)
                    .filter(|&id| !unuseable[id])
                    .map(|id| id - inst.colour_ids(p).start)
                    .collect()
            }
        })
        .collect();
    Ok(ResidualView {
        parent: inst,
        colouring: colouring.clone(),
        surviving,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::tiny1;
    use super::*;

    fn col(pairs: &[(usize, usize)]) -> PartialColouring {
        PartialColouring::from_colours(2, pairs.iter().map(|&(p, s)| ColourRef::new(p, s)))
    }

    #[test]
    fn tiny1_transversals() {
        let t = tiny1();
        // Of the four total assignments only b, d avoids every conflict.
        let mut found = vec![];
        for a in 0..2 {
            for b in 0..2 {
                if is_independent_transversal(&t, &col(&[(0, a), (1, b)])) {
                    found.push((a, b));
                }
            }
        }
        assert_eq!(found, vec![(1, 1)]);
        assert!(!is_independent_transversal(&t, &col(&[(0, 0), (1, 0)])));
        assert!(!is_independent_transversal(&t, &col(&[(0, 1)])));
    }

    #[test]
    fn residual_after_colouring_v_with_d() {
        let t = tiny1();
        let view = apply_colouring(&t, &col(&[(1, 1)])).unwrap();
        assert_eq!(view.surviving[0], vec![1]);
        let (sub, emb) = view.materialize().unwrap();
        assert_eq!(sub.num_parts(), 1);
        assert_eq!(sub.labels(0), &["b".to_string()]);
        assert_eq!(emb.parts, vec![0]);
    }

    #[test]
    fn residual_after_colouring_v_with_c_is_empty() {
        let t = tiny1();
        let view = apply_colouring(&t, &col(&[(1, 0)])).unwrap();
        assert!(view.surviving[0].is_empty());
        assert!(matches!(view.materialize(), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn empty_colouring_keeps_everything() {
        let t = tiny1();
        let view = apply_colouring(&t, &PartialColouring::empty(2)).unwrap();
        assert_eq!(view.surviving, vec![vec![0, 1], vec![0, 1]]);
        let (sub, _) = view.materialize().unwrap();
        assert_eq!(sub, t);
    }

    #[test]
    fn improper_colouring_is_rejected() {
        let t = tiny1();
        let err = apply_colouring(&t, &col(&[(0, 0), (1, 0)])).unwrap_err();
        assert!(matches!(err, Error::ImproperColouring(..)));
    }
}
