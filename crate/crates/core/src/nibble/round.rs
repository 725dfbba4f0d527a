use rand::Rng;
use serde::{Deserialize, Serialize};

use super::events::{detect_bad_events, BadEvent, Expectations};
use super::NibbleParams;
use crate::cover::{apply_colouring, stats, truncate_lists, ColourRef, CoverInstance, Embedding, PartialColouring};
use crate::error::{Error, Result};
use crate::rng::substream;

/// Activated parts with their sampled colours, and the subset `A^col` whose
/// colour conflicts with no other activated choice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WastefulColouring {
    /// Sampled slot per part; `Some` exactly for activated parts.
    pub phi: Vec<Option<usize>>,
    pub a_col: Vec<bool>,
}

impl WastefulColouring {
    pub fn activated(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.phi.len()).filter(|&v| self.phi[v].is_some())
    }

    pub fn a_col_parts(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.a_col.len()).filter(|&v| self.a_col[v])
    }

    /// `φ` restricted to `A^col`.
    pub fn colouring(&self) -> PartialColouring {
        PartialColouring::from_colours(
            self.phi.len(),
            self.a_col_parts().map(|v| ColourRef::new(v, self.phi[v].expect("A^col ⊆ A"))),
        )
    }

    /// Recompute `A^col` from `phi`.
    pub fn from_phi(inst: &CoverInstance, phi: Vec<Option<usize>>) -> Self {
        let mut chosen = vec![false; inst.num_colours()];
        for (v, s) in phi.iter().enumerate() {
            if let Some(s) = s {
                chosen[inst.colour_ids(v).start + s] = true;
            }
        }
        let a_col = phi
            .iter()
            .enumerate()
            .map(|(v, s)| match s {
                Some(s) => {
                    let c = inst.colour_ids(v).start + s;
                    !inst.neighbours(c).iter().any(|&w| chosen[w as usize])
                }
                None => false,
            })
            .collect();
        Self { phi, a_col }
    }
}

/// Activate each part with probability `p`, then colour it uniformly.
pub fn sample_wasteful(inst: &CoverInstance, p: f64, rng: &mut impl Rng) -> WastefulColouring {
    let phi = (0..inst.num_parts())
        .map(|v| rng.random_bool(p).then(|| rng.random_range(0..inst.list_len(v))))
        .collect();
    WastefulColouring::from_phi(inst, phi)
}

/// The random variables of one round. Per-colour vectors are indexed by the
/// colour's global id: part `v`, slot `s` sits at `colour_offsets[v] + s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NibbleRoundReport {
    pub colour_offsets: Vec<usize>,
    pub degrees: Vec<u32>,
    /// Whether each colour is useable.
    pub useable: Vec<bool>,
    pub useable_cols: Vec<u32>,
    pub unuseable_cols: Vec<u32>,
    pub coloured_nbrs: Vec<u32>,
    pub activated_nbrs: Vec<u32>,
    pub uncoloured_nbrs: Vec<u32>,
    pub conflicts: Vec<u32>,
    pub remaining_cols_old_deg: Vec<u64>,
    pub relevant_cols_lost_deg: Vec<u64>,
    pub omega_star: Vec<bool>,
    pub triggered_bad_events: Vec<BadEvent>,
}

impl NibbleRoundReport {
    pub fn num_parts(&self) -> usize {
        self.useable_cols.len()
    }

    pub fn index(&self, part: usize, slot: usize) -> usize {
        self.colour_offsets[part] + slot
    }

    pub fn colours_of(&self, part: usize) -> std::ops::Range<usize> {
        self.colour_offsets[part]..self.colour_offsets[part + 1]
    }

    /// `useable + unuseable = |L(v)|` and `coloured + uncoloured = activated`.
    pub fn identities_hold(&self) -> bool {
        (0..self.num_parts()).all(|v| {
            (self.useable_cols[v] + self.unuseable_cols[v]) as usize == self.colours_of(v).len()
        }) && (0..self.degrees.len())
            .all(|c| self.coloured_nbrs[c] + self.uncoloured_nbrs[c] == self.activated_nbrs[c])
    }
}

/// Compute every per-part and per-colour variable of a sampled round.
pub fn evaluate_round(inst: &CoverInstance, w: &WastefulColouring, params: &NibbleParams) -> NibbleRoundReport {
    let n = inst.num_parts();
    let m = inst.num_colours();
    let mut useable = vec![true; m];
    let mut activated_nbrs = vec![0u32; m];
    let mut coloured_nbrs = vec![0u32; m];
    let mut conflicts = vec![0u32; m];
    for u in w.activated() {
        let coloured = w.a_col[u];
        // Every colour of an activated list counts toward its neighbours.
        for c in inst.colour_ids(u) {
            for &x in inst.neighbours(c) {
                activated_nbrs[x as usize] += 1;
                if coloured {
                    coloured_nbrs[x as usize] += 1;
                }
            }
        }
        // Conflicts are counted per neighbouring part, and since conflicts
        // are never parallel each activated part adds at most one.
        let chosen = inst.colour_ids(u).start + w.phi[u].expect("activated");
        for &x in inst.neighbours(chosen) {
            useable[x as usize] = false;
            conflicts[x as usize] += 1;
        }
    }
    let uncoloured_nbrs: Vec<u32> = (0..m).map(|c| activated_nbrs[c] - coloured_nbrs[c]).collect();
    let relevant = params.relevance_threshold();
    let mut useable_cols = vec![0u32; n];
    let mut remaining_cols_old_deg = vec![0u64; n];
    let mut relevant_cols_lost_deg = vec![0u64; n];
    for v in 0..n {
        for c in inst.colour_ids(v) {
            let deg = inst.degree(c) as u64;
            if useable[c] {
                useable_cols[v] += 1;
                remaining_cols_old_deg[v] += deg;
            } else if deg as f64 >= relevant {
                relevant_cols_lost_deg[v] += deg;
            }
        }
    }
    let unuseable_cols = (0..n).map(|v| inst.list_len(v) as u32 - useable_cols[v]).collect();
    let omega_star = omega_star(inst, &conflicts, params.conflict_threshold());
    let mut colour_offsets: Vec<usize> = (0..n).map(|v| inst.colour_ids(v).start).collect();
    colour_offsets.push(m);
    NibbleRoundReport {
        colour_offsets,
        degrees: (0..m).map(|c| inst.degree(c) as u32).collect(),
        useable,
        useable_cols,
        unuseable_cols,
        coloured_nbrs,
        activated_nbrs,
        uncoloured_nbrs,
        conflicts,
        remaining_cols_old_deg,
        relevant_cols_lost_deg,
        omega_star,
        triggered_bad_events: Vec::new(),
    }
}

/// `v ∈ Ω*` when some part within base distance one or two of `v` has a
/// colour with at least `threshold` conflicts.
fn omega_star(inst: &CoverInstance, conflicts: &[u32], threshold: f64) -> Vec<bool> {
    let n = inst.num_parts();
    let heavy: Vec<bool> = (0..n)
        .map(|u| inst.colour_ids(u).any(|c| conflicts[c] as f64 >= threshold))
        .collect();
    let near: Vec<bool> = (0..n)
        .map(|x| inst.base_neighbours(x).iter().any(|&(u, _)| heavy[u]))
        .collect();
    (0..n)
        .map(|v| inst.base_neighbours(v).iter().any(|&(x, _)| heavy[x] || near[x]))
        .collect()
}

/// An accepted (or, in adaptive mode, best available) round.
#[derive(Debug, Clone)]
pub struct RoundResult {
    pub wasteful: WastefulColouring,
    /// `φ` on `A^col`, over the parts of the input instance.
    pub colouring: PartialColouring,
    pub residual: CoverInstance,
    /// Residual colours in terms of the input instance.
    pub embedding: Embedding,
    pub report: NibbleRoundReport,
    pub attempts: usize,
    /// No rejecting bad event fired.
    pub accepted: bool,
    pub target_list_size: usize,
    pub target_avg_degree: f64,
    pub achieved_avg_degree: f64,
    /// Residual parts whose useable list was shorter than the target.
    pub short_lists: usize,
}

/// Sample rounds (attempt `a` draws from stream `a` of the seed) until one
/// has no rejecting bad event, then colour `A^col` and build the residual
/// over the remaining parts from their useable colours, truncated to the
/// target size.
///
/// Strict mode also rejects rounds whose residual misses the target list size
/// or average degree, and fails with `AttemptsExhausted` when no attempt
/// passes. Adaptive mode falls back to the attempt with the fewest bad events
/// and truncates to `min(target, actual)`; it only fails when every attempt
/// leaves some part without a useable colour.
pub fn nibble_round(inst: &CoverInstance, params: &NibbleParams) -> Result<RoundResult> {
    params.validate()?;
    if params.strict {
        let s = stats(inst);
        let d = params.d;
        if s.max_colour_multiplicity as f64 > d.powf(0.25) || s.max_degree as f64 > d * d.ln() {
            return Err(Error::Precondition(
                "strict rounds need μ ≤ d^(1/4) and Δ ≤ d ln d".into(),
            ));
        }
    }
    let expectations = Expectations::closed_form(inst, params)?;
    let target = params.target_list_size();
    let mut best: Option<(usize, WastefulColouring, NibbleRoundReport)> = None;
    for attempt in 0..params.max_attempts {
        let mut rng = substream(params.seed, attempt as u64);
        let w = sample_wasteful(inst, params.p, &mut rng);
        let mut report = evaluate_round(inst, &w, params);
        report.triggered_bad_events = detect_bad_events(&report, params, &expectations);
        let empties = (0..inst.num_parts()).any(|v| !w.a_col[v] && report.useable_cols[v] == 0);
        if empties {
            continue;
        }
        let rejecting = rejecting_count(&report);
        if params.strict {
            if rejecting > 0 {
                continue;
            }
            if let Some(r) = build(inst, params, w, report, attempt + 1, target)? {
                return Ok(r);
            }
        } else {
            if rejecting == 0 {
                return build(inst, params, w, report, attempt + 1, target).map(|r| r.expect("adaptive"));
            }
            if best.as_ref().is_none_or(|(_, _, b)| rejecting < rejecting_count(b)) {
                best = Some((attempt, w, report));
            }
        }
    }
    match best {
        Some((_, w, report)) => build(inst, params, w, report, params.max_attempts, target)
            .map(|r| r.expect("adaptive")),
        None => Err(Error::AttemptsExhausted {
            attempts: params.max_attempts,
            reason: if params.strict {
                "every sampled round had a bad event or missed its targets".into()
            } else {
                "every sampled round left some part without a useable colour".into()
            },
        }),
    }
}

fn rejecting_count(report: &NibbleRoundReport) -> usize {
    report.triggered_bad_events.iter().filter(|e| e.is_rejecting()).count()
}

/// Residual for a sampled round; `None` when strict targets are missed.
fn build(
    inst: &CoverInstance,
    params: &NibbleParams,
    w: WastefulColouring,
    report: NibbleRoundReport,
    attempts: usize,
    target: usize,
) -> Result<Option<RoundResult>> {
    let colouring = w.colouring();
    let mut view = apply_colouring(inst, &colouring)?;
    // The view only discards neighbours of `A^col`; the round discards
    // neighbours of every activated choice.
    for (v, slots) in view.surviving.iter_mut().enumerate() {
        slots.retain(|&s| report.useable[report.index(v, s)]);
    }
    let (useable_inst, into_parent) = view.materialize()?;
    let lens = useable_inst.list_lens();
    let short_lists = lens.iter().filter(|&&l| l < target).count();
    if params.strict && short_lists > 0 {
        return Ok(None);
    }
    let targets: Vec<usize> = lens.iter().map(|&l| l.min(target)).collect();
    let (residual, truncation) = truncate_lists(&useable_inst, &targets)?;
    let achieved_avg_degree = stats(&residual).avg_degree_f64();
    let target_avg_degree = params.target_avg_degree();
    if params.strict && achieved_avg_degree > target_avg_degree {
        return Ok(None);
    }
    let accepted = rejecting_count(&report) == 0;
    Ok(Some(RoundResult {
        embedding: truncation.then(&into_parent),
        wasteful: w,
        colouring,
        residual,
        report,
        attempts,
        accepted,
        target_list_size: target,
        target_avg_degree,
        achieved_avg_degree,
        short_lists,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::fixtures::tiny1;
    use crate::cover::InstanceData;
    use crate::generators::gen_random_cover;
    use crate::is_independent_transversal;

    fn params(p: f64) -> NibbleParams {
        let mut params = NibbleParams::new(2.0, 2.0, 0.5, 0);
        params.p = p;
        params
    }

    #[test]
    fn zero_activation() {
        let t = tiny1();
        let w = sample_wasteful(&t, 0.0, &mut substream(1, 0));
        assert_eq!(w.activated().count(), 0);
        assert_eq!(w.a_col_parts().count(), 0);
        let r = evaluate_round(&t, &w, &params(0.0));
        assert_eq!(r.useable_cols, vec![2, 2]);
        assert!(r.activated_nbrs.iter().all(|&x| x == 0));
        assert_eq!(r.remaining_cols_old_deg, vec![3, 3]);
    }

    #[test]
    fn a_col_on_tiny1() {
        let t = tiny1();
        let clash = WastefulColouring::from_phi(&t, vec![Some(0), Some(0)]);
        assert_eq!(clash.a_col_parts().count(), 0);
        let free = WastefulColouring::from_phi(&t, vec![Some(1), Some(1)]);
        assert_eq!(free.a_col_parts().collect::<Vec<_>>(), vec![0, 1]);
        assert!(free.colouring().is_proper(&t));
    }

    #[test]
    fn only_v_activated_with_c() {
        let t = tiny1();
        let w = WastefulColouring::from_phi(&t, vec![None, Some(0)]);
        assert_eq!(w.a_col_parts().collect::<Vec<_>>(), vec![1]);
        let r = evaluate_round(&t, &w, &params(0.5));
        assert_eq!(r.useable_cols[0], 0);
        assert_eq!(r.coloured_nbrs[r.index(0, 0)], 2);
        assert_eq!(r.coloured_nbrs[r.index(0, 1)], 1);
        assert_eq!(r.conflicts[r.index(0, 0)], 1);
        assert!(r.identities_hold());
    }

    #[test]
    fn identities_on_random_rounds() {
        let g = gen_random_cover(15, 6, 0.3, 0.7, 3, 4).unwrap();
        let p = NibbleParams::new(8.0, 6.0, 0.5, 0);
        for t in 0..1000 {
            let w = sample_wasteful(&g.instance, 0.4, &mut substream(7, t));
            assert!(w.colouring().is_proper(&g.instance));
            let r = evaluate_round(&g.instance, &w, &p);
            assert!(r.identities_hold());
        }
    }

    #[test]
    fn conflict_free_round() {
        let inst = CoverInstance::from_data(InstanceData {
            parts: vec![(0..6).map(|i| i.to_string()).collect(); 10],
            base_edges: vec![(0, 1, 1), (2, 3, 1)],
            conflicts: vec![],
        })
        .unwrap();
        let mut p = NibbleParams::new(4.0, 6.0, 0.5, 3);
        p.p = 0.5;
        let r = nibble_round(&inst, &p).unwrap();
        assert!(r.accepted);
        assert_eq!(r.attempts, 1);
        let w = &r.wasteful;
        assert_eq!(w.activated().collect::<Vec<_>>(), w.a_col_parts().collect::<Vec<_>>());
        assert_eq!(r.residual.num_parts(), 10 - w.a_col_parts().count());
        for v in 0..r.residual.num_parts() {
            assert_eq!(r.residual.list_len(v), p.target_list_size());
        }
    }

    #[test]
    fn residual_is_induced_and_useable() {
        let g = gen_random_cover(40, 12, 0.15, 0.6, 3, 9).unwrap();
        let mut p = NibbleParams::new(stats(&g.instance).avg_degree_f64().max(3.0), 12.0, 0.5, 5);
        p.max_attempts = 5;
        let r = nibble_round(&g.instance, &p).unwrap();
        let parent = &g.instance;
        assert!(r.colouring.is_proper(parent));
        for (a, b) in r.residual.conflict_pairs() {
            let pa = r.embedding.map(r.residual.colour_ref(a));
            let pb = r.embedding.map(r.residual.colour_ref(b));
            assert!(parent.has_conflict(parent.colour_id(pa), parent.colour_id(pb)));
        }
        for v in 0..r.residual.num_parts() {
            assert!(r.colouring.get(r.embedding.parts[v]).is_none());
            for s in 0..r.residual.list_len(v) {
                let c = parent.colour_id(r.embedding.map(ColourRef::new(v, s)));
                for chosen in r.colouring.colours() {
                    assert!(!parent.has_conflict(c, parent.colour_id(chosen)));
                }
            }
        }
        // Any transversal of the residual extends the round's colouring.
        if let crate::oracle::SearchOutcome::Found(rest) =
            crate::oracle::find_transversal_exact(&r.residual, crate::oracle::SearchBudget::find(1 << 20))
        {
            let mut total = r.colouring.clone();
            for c in rest.lift(&r.embedding, parent.num_parts()).colours() {
                total.set(c);
            }
            assert!(is_independent_transversal(parent, &total));
        }
    }

    #[test]
    fn strict_round_fails_on_tiny_instances() {
        let g = gen_random_cover(20, 8, 0.3, 1.0, 2, 1).unwrap();
        let mut p = NibbleParams::new(5.0, 8.0, 0.5, 0);
        p.strict = true;
        p.max_attempts = 3;
        assert!(matches!(
            nibble_round(&g.instance, &p),
            Err(Error::AttemptsExhausted { attempts: 3, .. }) | Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn rounds_are_deterministic() {
        let g = gen_random_cover(30, 10, 0.2, 0.5, 3, 2).unwrap();
        let p = NibbleParams::new(10.0, 10.0, 0.5, 8);
        let a = nibble_round(&g.instance, &p).unwrap();
        let b = nibble_round(&g.instance, &p).unwrap();
        assert_eq!(a.colouring, b.colouring);
        assert_eq!(a.residual, b.residual);
    }
}
