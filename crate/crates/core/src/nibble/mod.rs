//! One round of the wasteful random colouring procedure.
//!
//! A round activates every part with probability `p`, gives each activated
//! part a uniformly random colour from its list, and keeps the colours of the
//! activated parts that conflict with no other activated choice (`A^col`).
//! A colour is *useable* when it conflicts with none of the activated choices.
//! The residual keeps the parts outside `A^col` with their useable colours,
//! truncated to the target list size.
//!
//! Logarithms are natural throughout.

mod events;
mod monte_carlo;
mod round;

use serde::{Deserialize, Serialize};

use crate::cover::CoverInstance;
use crate::error::{Error, Result};

pub use events::{detect_bad_events, BadEvent, Expectations};
pub use monte_carlo::{
    monte_carlo_check, ColourEstimate, EstimateOptions, EstimateReport, PartEstimate, TotalEstimate,
    TrialRecord,
};
pub use round::{
    evaluate_round, nibble_round, sample_wasteful, NibbleRoundReport, RoundResult, WastefulColouring,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NibbleParams {
    /// Activation probability.
    pub p: f64,
    pub epsilon: f64,
    /// Degree budget: the average colour degree the round is measured against.
    pub d: f64,
    /// Nominal list size; lists are expected to hold `⌈lambda⌉` colours.
    pub lambda: f64,
    pub seed: u64,
    pub max_attempts: usize,
    pub strict: bool,
}

impl NibbleParams {
    /// Adaptive parameters with `p = 1/ln d`.
    pub fn new(d: f64, lambda: f64, epsilon: f64, seed: u64) -> Self {
        Self {
            p: (1.0 / d.ln()).clamp(0.0, 1.0),
            epsilon,
            d,
            lambda,
            seed,
            max_attempts: 100,
            strict: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p = {} is not a probability", self.p));
        }
        if !(self.epsilon > 0.0 && self.d > 0.0 && self.lambda > 0.0) {
            return bad("epsilon, d and lambda must be positive".into());
        }
        if self.p > self.lambda {
            return bad("p / lambda exceeds 1".into());
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1".into());
        }
        if self.strict {
            let ln = self.d.ln();
            if !(ln > 0.0 && self.p <= 1.0 / ln && self.p >= 1.0 / (ln * ln)) {
                return Err(Error::Precondition(format!(
                    "p = {} is outside [1/ln²d, 1/ln d] for d = {}",
                    self.p, self.d
                )));
            }
            if !((1.0 + self.epsilon) * self.d <= self.lambda && self.lambda <= 4.0 * self.d) {
                return Err(Error::Precondition(format!(
                    "lambda = {} is outside [(1+ε)d, 4d]",
                    self.lambda
                )));
            }
        }
        Ok(())
    }

    /// `⌈(1 − p/(1 + 3ε/4))Λ⌉`.
    pub fn target_list_size(&self) -> usize {
        ((1.0 - self.p / (1.0 + 0.75 * self.epsilon)) * self.lambda).ceil() as usize
    }

    /// `(1 − p/(1 + ε/4))d`.
    pub fn target_avg_degree(&self) -> f64 {
        (1.0 - self.p / (1.0 + 0.25 * self.epsilon)) * self.d
    }

    /// Colours of degree at least `d/ln³d` are relevant.
    pub fn relevance_threshold(&self) -> f64 {
        self.d / self.d.ln().powi(3)
    }

    /// `ln²d`, the conflict count that puts a round in `Ω*`.
    pub fn conflict_threshold(&self) -> f64 {
        self.d.ln().powi(2)
    }
}

/// `(1 − p/Λ)^deg`: the probability that a colour of degree `deg` stays
/// useable when every neighbouring list has `Λ` colours.
pub fn keep_probability(deg: usize, p: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !(0.0..=1.0).contains(&p) || p / lambda > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "keep probability needs 0 ≤ p/Λ ≤ 1, got p = {p}, Λ = {lambda}"
        )));
    }
    Ok((1.0 - p / lambda).powi(deg as i32))
}

/// `Σ_{c ∈ L(v)} Keep(v, c)` for every part, with the nominal `Λ`.
pub fn expected_useable(inst: &CoverInstance, p: f64, lambda: f64) -> Result<Vec<f64>> {
    keep_probability(0, p, lambda)?;
    let q = 1.0 - p / lambda;
    Ok((0..inst.num_parts())
        .map(|v| inst.colour_ids(v).map(|c| q.powi(inst.degree(c) as i32)).sum())
        .collect())
}

/// The true `E[#useable_v]`. A colour stays useable unless some neighbouring
/// part is activated and picks one of the colour's neighbours there, so
/// `Pr[c useable] = Π_u (1 − p·|N(c) ∩ L(u)|/|L(u)|)`. This matches
/// [`expected_useable`] when every list has `Λ` colours and no colour has two
/// neighbours in the same list; otherwise `Keep` overestimates it.
pub fn exact_expected_useable(inst: &CoverInstance, p: f64) -> Vec<f64> {
    (0..inst.num_parts())
        .map(|v| inst.colour_ids(v).map(|c| exact_keep(inst, c, p)).sum())
        .collect()
}

/// `Pr[c useable]` for colour id `c`.
pub fn exact_keep(inst: &CoverInstance, c: usize, p: f64) -> f64 {
    // Neighbour rows are sorted by id, so each part's neighbours are a run.
    let nbrs = inst.neighbours(c);
    let mut prob = 1.0;
    let mut i = 0;
    while i < nbrs.len() {
        let u = inst.part_of(nbrs[i] as usize);
        let mut j = i + 1;
        while j < nbrs.len() && inst.part_of(nbrs[j] as usize) == u {
            j += 1;
        }
        prob *= 1.0 - p * (j - i) as f64 / inst.list_len(u) as f64;
        i = j;
    }
    prob
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::fixtures::tiny1;

    #[test]
    fn keep_examples() {
        assert_eq!(keep_probability(0, 0.7, 3.0).unwrap(), 1.0);
        assert_eq!(keep_probability(5, 0.0, 3.0).unwrap(), 1.0);
        assert_eq!(keep_probability(2, 0.5, 2.0).unwrap(), 0.5625);
        assert!(keep_probability(1, 0.5, 0.25).is_err());
    }

    #[test]
    fn keep_is_monotone_in_p() {
        let mut last = 1.0;
        for i in 0..=20 {
            let k = keep_probability(7, i as f64 / 20.0, 3.0).unwrap();
            assert!(k <= last);
            last = k;
        }
    }

    #[test]
    fn tiny1_expectations() {
        let e = expected_useable(&tiny1(), 0.5, 2.0).unwrap();
        assert!((e[0] - 1.3125).abs() < 1e-12);
        // a has both its neighbours in the same list, so it is blocked with
        // probability exactly p: 0.5 + 0.75 rather than 0.5625 + 0.75.
        let exact = exact_expected_useable(&tiny1(), 0.5);
        assert!((exact[0] - 1.25).abs() < 1e-12);
    }

    #[test]
    fn target_size_example() {
        let mut params = NibbleParams::new(100.0, 300.0, 0.5, 0);
        params.p = 0.1;
        assert_eq!(params.target_list_size(), 279);
    }

    #[test]
    fn tiny_p_keeps_integer_lambda() {
        let mut params = NibbleParams::new(10.0, 20.0, 0.5, 0);
        params.p = 1e-6;
        assert_eq!(params.target_list_size(), 20);
    }

    #[test]
    fn strict_hypotheses() {
        let d = 1000f64;
        let mut params = NibbleParams::new(d, 1.5 * d, 0.5, 0);
        params.strict = true;
        assert!(params.validate().is_ok());
        params.p = 0.9;
        assert!(matches!(params.validate(), Err(Error::Precondition(_))));
        params.p = 1.0 / d.ln();
        params.lambda = 5.0 * d;
        assert!(matches!(params.validate(), Err(Error::Precondition(_))));
    }
}
