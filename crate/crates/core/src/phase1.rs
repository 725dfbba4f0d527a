//! Multiplicity reduction: degree trimming and iterated random list halving.
//!
//! Halving sorts each list by colour degree, pairs consecutive colours as
//! mates and keeps one mate of every pair at random. Repeating this `j` times
//! shrinks lists, degrees and multiplicities by roughly `2^j` each, which turns
//! a cover whose multiplicity is a constant fraction of the degree into one
//! whose multiplicity is tiny next to the degree.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cover::{stats, truncate_lists, CoverInstance, Embedding, InstanceStats};
use crate::error::{Error, Result};
use crate::rng::{mix, substream};

/// `d·√(ln d)`.
pub fn trim_threshold(d: f64) -> f64 {
    d * d.ln().max(0.0).sqrt()
}

/// Drop every colour whose degree exceeds `d·√(ln d)`. Needs `Δ̄ ≤ d`, which
/// bounds the removals per part by `|L(v)|/√(ln d)`.
pub fn trim_high_degree(inst: &CoverInstance, d: f64) -> Result<(CoverInstance, Embedding)> {
    if !(d > 0.0) {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    if stats(inst).avg_degree_f64() > d {
        return Err(Error::Precondition(format!("maximum average colour degree exceeds d = {d}")));
    }
    let threshold = trim_threshold(d);
    let mut selection = Vec::with_capacity(inst.num_parts());
    for v in 0..inst.num_parts() {
        let start = inst.colour_ids(v).start;
        let kept: Vec<usize> = inst
            .colour_ids(v)
            .filter(|&c| inst.degree(c) as f64 <= threshold)
            .map(|c| c - start)
            .collect();
        if kept.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "trimming at d = {d} would empty the list of part {v}"
            )));
        }
        let removed = inst.list_len(v) - kept.len();
        assert!(
            removed as f64 <= inst.list_len(v) as f64 / d.ln().sqrt(),
            "more high-degree colours than the average degree allows"
        );
        selection.push((v, kept));
    }
    Ok(inst.induced(&selection))
}

/// Mate pairs of one part: list slots sorted by degree (slot on ties), taken
/// two at a time.
pub fn mates(inst: &CoverInstance, part: usize) -> Vec<(usize, usize)> {
    let start = inst.colour_ids(part).start;
    let mut order: Vec<usize> = (0..inst.list_len(part)).collect();
    order.sort_by_key(|&s| (inst.degree(start + s), s));
    order.chunks_exact(2).map(|m| (m[0], m[1])).collect()
}

/// The lemma's output bounds with the values actually reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalvingBounds {
    /// `d/2 + d^{3/5}`.
    pub avg_degree_bound: f64,
    /// `(d ln d)/2 + d^{3/5}`.
    pub max_degree_bound: f64,
    /// `μ/2 + μ^{3/5}`.
    pub multiplicity_bound: f64,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub multiplicity: usize,
}

impl HalvingBounds {
    fn new(d: f64, mu: f64, after: &InstanceStats) -> Self {
        Self {
            avg_degree_bound: d / 2.0 + d.powf(0.6),
            max_degree_bound: d * d.ln() / 2.0 + d.powf(0.6),
            multiplicity_bound: mu / 2.0 + mu.powf(0.6),
            avg_degree: after.avg_degree_f64(),
            max_degree: after.max_degree,
            multiplicity: after.max_colour_multiplicity,
        }
    }

    pub fn hold(&self) -> bool {
        self.avg_degree <= self.avg_degree_bound
            && self.max_degree as f64 <= self.max_degree_bound
            && self.multiplicity as f64 <= self.multiplicity_bound
    }
}

#[derive(Debug, Clone)]
pub struct HalvingResult {
    pub instance: CoverInstance,
    pub embedding: Embedding,
    pub attempts: usize,
    /// The kept round had no bad event.
    pub accepted: bool,
    pub bad_events: usize,
    pub bounds: HalvingBounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalvingParams {
    pub d: f64,
    pub mu: f64,
    pub seed: u64,
    pub max_attempts: usize,
    pub strict: bool,
}

/// Keep one mate of every pair, resampling whole rounds (attempt `a` draws
/// from stream `a` of the seed) until no surviving colour lost too little
/// degree and no colour kept too many neighbours in one list.
///
/// Adaptive mode keeps the attempt with the fewest bad events if none is
/// clean. Strict mode checks the lemma's hypotheses first and also rejects
/// rounds missing its conclusions.
pub fn halve_lists(inst: &CoverInstance, params: &HalvingParams) -> Result<HalvingResult> {
    let n = inst.num_parts();
    let size = if n == 0 { 0 } else { inst.list_len(0) };
    if (0..n).any(|v| inst.list_len(v) != size) || size % 2 == 1 || (n > 0 && size == 0) {
        return Err(Error::InvalidArgument("halving needs equal, even, nonempty lists".into()));
    }
    if params.max_attempts == 0 {
        return Err(Error::InvalidArgument("max_attempts must be at least 1".into()));
    }
    let (d, mu) = (params.d, params.mu);
    if params.strict {
        let s = stats(inst);
        let ok = s.avg_degree_f64() <= d
            && s.max_degree as f64 <= d * d.ln()
            && s.max_colour_multiplicity as f64 <= mu
            && mu > d.ln().powi(10)
            && size as f64 >= d;
        if !ok {
            return Err(Error::Precondition(
                "halving needs Δ̄ ≤ d, Δ ≤ d ln d, μ_L ≤ μ, μ > ln¹⁰ d and lists of at least d colours".into(),
            ));
        }
    }
    let pairs: Vec<Vec<(usize, usize)>> = (0..n).map(|v| mates(inst, v)).collect();
    let degree_slack = d.powf(4.0 / 7.0);
    let mu_cap = mu / 2.0 + mu.powf(4.0 / 7.0);
    let mut best: Option<(usize, Vec<bool>)> = None;
    for attempt in 0..params.max_attempts {
        let mut rng = substream(params.seed, attempt as u64);
        let mut keep = vec![false; inst.num_colours()];
        for (v, part_pairs) in pairs.iter().enumerate() {
            let start = inst.colour_ids(v).start;
            for &(a, b) in part_pairs {
                keep[start + if rng.random_bool(0.5) { a } else { b }] = true;
            }
        }
        let events = count_bad_events(inst, &keep, degree_slack, mu_cap);
        if events == 0 {
            let result = finish_halving(inst, params, &keep, attempt + 1, 0);
            if !params.strict || result.bounds.hold() {
                return Ok(result);
            }
            continue;
        }
        if !params.strict && best.as_ref().is_none_or(|(e, _)| events < *e) {
            best = Some((events, keep));
        }
    }
    match best {
        Some((events, keep)) => Ok(finish_halving(inst, params, &keep, params.max_attempts, events)),
        None => Err(Error::AttemptsExhausted {
            attempts: params.max_attempts,
            reason: "no halving round avoided every bad event".into(),
        }),
    }
}

/// Surviving colours with `deg' > deg/2 + d^{4/7}`, plus (colour, part) pairs
/// with more than `μ/2 + μ^{4/7}` surviving neighbours.
fn count_bad_events(inst: &CoverInstance, keep: &[bool], degree_slack: f64, mu_cap: f64) -> usize {
    let mut events = 0;
    for c in (0..inst.num_colours()).filter(|&c| keep[c]) {
        let nbrs = inst.neighbours(c);
        let mut kept = 0usize;
        let mut run_part = usize::MAX;
        let mut run = 0usize;
        for &w in nbrs {
            let w = w as usize;
            let u = inst.part_of(w);
            if u != run_part {
                if run as f64 > mu_cap {
                    events += 1;
                }
                run_part = u;
                run = 0;
            }
            if keep[w] {
                kept += 1;
                run += 1;
            }
        }
        if run as f64 > mu_cap {
            events += 1;
        }
        if kept as f64 > nbrs.len() as f64 / 2.0 + degree_slack {
            events += 1;
        }
    }
    events
}

fn finish_halving(
    inst: &CoverInstance,
    params: &HalvingParams,
    keep: &[bool],
    attempts: usize,
    bad_events: usize,
) -> HalvingResult {
    let selection: Vec<(usize, Vec<usize>)> = (0..inst.num_parts())
        .map(|v| {
            let start = inst.colour_ids(v).start;
            (v, inst.colour_ids(v).filter(|&c| keep[c]).map(|c| c - start).collect())
        })
        .collect();
    let (instance, embedding) = inst.induced(&selection);
    let bounds = HalvingBounds::new(params.d, params.mu, &stats(&instance));
    HalvingResult {
        instance,
        embedding,
        attempts,
        accepted: bad_events == 0,
        bad_events,
        bounds,
    }
}

/// `(x/2 + x^{2/3})`, the recurrence for both `d_t` and `μ_t`.
pub fn halving_step(x: f64) -> f64 {
    x / 2.0 + x.powf(2.0 / 3.0)
}

/// `j` with `2^{j−1} < x ≤ 2^j`, for `x > 1`.
pub fn halving_count(x: f64) -> u32 {
    let mut j = 0u32;
    while 2f64.powi(j as i32) < x {
        j += 1;
    }
    j
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReduceParams {
    pub epsilon: f64,
    pub gamma: f64,
    /// Average-degree budget.
    pub d: f64,
    pub seed: u64,
    pub max_attempts: usize,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub t: usize,
    pub d_t: f64,
    pub s_t: usize,
    pub mu_t: f64,
    pub attempts_used: usize,
    pub accepted: bool,
    pub bad_events: usize,
    pub bounds: HalvingBounds,
    pub stats: InstanceStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionConditions {
    /// `γ^{−6/5}/2 < d_j ≤ (1 + ε/10)d/2^j`.
    pub degree_window: bool,
    /// `μ_j ≤ 8 d_j^{1/6}`.
    pub final_multiplicity: bool,
    /// `μ_t > ln¹⁰ d_t` for `t < j`.
    pub multiplicity_floor: bool,
}

impl ReductionConditions {
    pub fn all(&self) -> bool {
        self.degree_window && self.final_multiplicity && self.multiplicity_floor
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub gamma: f64,
    pub epsilon: f64,
    pub d: f64,
    pub shortcut: bool,
    pub j: u32,
    pub s0: usize,
    /// One entry per halving; entry `t` holds `d_t, s_t, μ_t` before it and
    /// the statistics after it.
    pub steps: Vec<TraceStep>,
    pub d_final: f64,
    pub mu_final: f64,
    pub conditions: Option<ReductionConditions>,
    pub final_stats: InstanceStats,
}

#[derive(Debug, Clone)]
pub struct ReduceResult {
    pub instance: CoverInstance,
    /// Reduced colours in terms of the input instance.
    pub embedding: Embedding,
    pub trace: ReductionTrace,
}

/// Check the arithmetic conditions on `(d, γ, ε, j)` that make the halving
/// sequence work.
pub fn reduction_conditions(d: f64, gamma: f64, epsilon: f64, j: u32) -> (ReductionConditions, f64, f64) {
    let mut dt = d;
    let mut mt = gamma * d;
    let mut floor_ok = true;
    for _ in 0..j {
        floor_ok &= mt > dt.ln().powi(10);
        dt = halving_step(dt);
        mt = halving_step(mt);
    }
    let pow = 2f64.powi(j as i32);
    let c = ReductionConditions {
        degree_window: gamma.powf(-1.2) / 2.0 < dt && dt <= (1.0 + epsilon / 10.0) * d / pow,
        final_multiplicity: mt <= 8.0 * dt.powf(1.0 / 6.0),
        multiplicity_floor: floor_ok,
    };
    (c, dt, mt)
}

/// Trim, truncate lists to a common size `s0` divisible by `2^j`, halve `j`
/// times, trim again. Returns the input trimmed once when `γ^{−6/5} ≥ d`.
pub fn reduce(inst: &CoverInstance, params: &ReduceParams) -> Result<ReduceResult> {
    let ReduceParams {
        epsilon,
        gamma,
        d,
        seed,
        max_attempts,
        strict,
    } = *params;
    if !(epsilon > 0.0 && gamma > 0.0 && d > 0.0) {
        return Err(Error::InvalidArgument("epsilon, gamma and d must be positive".into()));
    }
    if strict {
        let s = stats(inst);
        if (s.min_list_size as f64) < (1.0 + epsilon) * d || s.max_colour_multiplicity as f64 > gamma * d {
            return Err(Error::Precondition("reduction needs |L(v)| ≥ (1+ε)d and μ ≤ γd".into()));
        }
    }
    let (trimmed, mut embedding) = trim_high_degree(inst, d)?;
    if gamma.powf(-1.2) >= d {
        let final_stats = stats(&trimmed);
        return Ok(ReduceResult {
            instance: trimmed,
            embedding,
            trace: ReductionTrace {
                gamma,
                epsilon,
                d,
                shortcut: true,
                j: 0,
                s0: final_stats.min_list_size,
                steps: Vec::new(),
                d_final: d,
                mu_final: gamma * d,
                conditions: None,
                final_stats,
            },
        });
    }

    let j = halving_count(gamma.powf(1.2) * d);
    let (conditions, d_final, mu_final) = reduction_conditions(d, gamma, epsilon, j);
    if strict && !conditions.all() {
        return Err(Error::Precondition(format!("halving conditions fail: {conditions:?}")));
    }
    let block = 1usize << j;
    let min_len = stats(&trimmed).min_list_size;
    let s0 = min_len / block * block;
    let floor = (1.0 + 0.9 * epsilon) * d - block as f64;
    if s0 == 0 || (strict && (s0 as f64) < floor) {
        return Err(Error::Precondition(format!(
            "lists of {min_len} colours cannot be cut to a multiple of {block} of size at least {floor:.2}"
        )));
    }
    let (mut current, cut) = truncate_lists(&trimmed, &vec![s0; trimmed.num_parts()])?;
    embedding = cut.then(&embedding);

    let mut steps = Vec::with_capacity(j as usize);
    let (mut dt, mut mt, mut st) = (d, gamma * d, s0);
    for t in 0..j as usize {
        let halving = halve_lists(
            &current,
            &HalvingParams {
                d: dt,
                mu: mt,
                seed: mix(seed, t as u64),
                max_attempts,
                strict,
            },
        )?;
        let after = stats(&halving.instance);
        steps.push(TraceStep {
            t,
            d_t: dt,
            s_t: st,
            mu_t: mt,
            attempts_used: halving.attempts,
            accepted: halving.accepted,
            bad_events: halving.bad_events,
            bounds: halving.bounds,
            stats: after,
        });
        embedding = halving.embedding.then(&embedding);
        current = halving.instance;
        dt = halving_step(dt);
        mt = halving_step(mt);
        st /= 2;
    }

    // The recurrence bound can sit below the measured Δ̄ when the halvings
    // did not all succeed; trim against whichever is larger.
    let trim_at = dt.max(stats(&current).avg_degree_f64());
    let (instance, last) = trim_high_degree(&current, trim_at)?;
    embedding = last.then(&embedding);
    let final_stats = stats(&instance);
    Ok(ReduceResult {
        instance,
        embedding,
        trace: ReductionTrace {
            gamma,
            epsilon,
            d,
            shortcut: false,
            j,
            s0,
            steps,
            d_final,
            mu_final,
            conditions: Some(conditions),
            final_stats,
        },
    })
}
