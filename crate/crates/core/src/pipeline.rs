//! The full driver: multiplicity reduction, a schedule of nibble rounds, then
//! the resampling finisher, with the partial colourings stitched back onto
//! the original instance.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cover::{stats, truncate_lists, ColourRef, CoverInstance, Embedding, InstanceStats, PartialColouring};
use crate::error::{Error, Result};
use crate::finisher::{finish, FinishOutcome, FinisherParams};
use crate::io::instance_digest;
use crate::is_independent_transversal;
use crate::nibble::{nibble_round, NibbleParams};
use crate::phase1::{reduce, ReduceParams, ReductionTrace};
use crate::rng::mix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub i: usize,
    pub d_i: f64,
    pub lambda_i: f64,
    /// `Λ_i / d_i`.
    pub ratio_i: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub p: f64,
    pub epsilon: f64,
    /// Entries `0..=i_star`.
    pub entries: Vec<ScheduleEntry>,
    pub i_star: usize,
}

/// Iterate `d_{i+1} = (1 − p/(1+ε/4))d_i` and `Λ_{i+1} = (1 − p/(1+3ε/4))Λ_i`
/// with `p = 1/ln d` until `⌈Λ_i⌉/d_i ≥ 4`.
pub fn build_schedule(d: f64, lambda0: f64, epsilon: f64) -> Result<Schedule> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    if !(d > std::f64::consts::E) || !(lambda0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need d > e (so that p = 1/ln d < 1) and a positive list size, got d = {d}, Λ₀ = {lambda0}"
        )));
    }
    let p = 1.0 / d.ln();
    let shrink_d = 1.0 - p / (1.0 + epsilon / 4.0);
    let shrink_lambda = 1.0 - p / (1.0 + 0.75 * epsilon);
    let (mut di, mut li) = (d, lambda0);
    let mut entries = Vec::new();
    for i in 0.. {
        entries.push(ScheduleEntry {
            i,
            d_i: di,
            lambda_i: li,
            ratio_i: li / di,
        });
        if li.ceil() / di >= 4.0 {
            break;
        }
        di *= shrink_d;
        li *= shrink_lambda;
    }
    let i_star = entries.len() - 1;
    Ok(Schedule {
        p,
        epsilon,
        entries,
        i_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub epsilon: f64,
    pub gamma: f64,
    pub seed: u64,
    /// Per nibble round and per halving.
    pub max_attempts: usize,
    pub max_resamples: u64,
    pub strict: bool,
    /// Record wall-clock time per stage (makes reports non-reproducible).
    pub timings: bool,
}

impl PipelineParams {
    pub fn new(epsilon: f64, gamma: f64, seed: u64) -> Self {
        Self {
            epsilon,
            gamma,
            seed,
            max_attempts: 50,
            max_resamples: 1_000_000,
            strict: false,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub attempts: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    pub parts_before: usize,
    pub parts_after: usize,
    pub before: InstanceStats,
    pub after: InstanceStats,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundSummary {
    pub i: usize,
    pub d_i: f64,
    pub lambda_i: f64,
    pub attempts: usize,
    pub accepted: bool,
    pub bad_events: usize,
    pub coloured_parts: usize,
    pub remaining_parts: usize,
    pub target_list_size: usize,
    pub short_lists: usize,
    pub target_avg_degree: f64,
    pub achieved_avg_degree: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance_digest: String,
    pub params: PipelineParams,
    pub stages: Vec<StageRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionTrace>,
    /// `(d′, Λ₀, ε′)` measured after the reduction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<(f64, usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Schedule>,
    pub rounds: Vec<RoundSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resamples: Option<u64>,
    /// Where the finisher's instance sits in the original one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finisher_embedding: Option<Embedding>,
    pub shortfalls: Vec<String>,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// `[part, slot]` pairs in the original instance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colouring: Option<Vec<ColourRef>>,
}

#[derive(Debug, Clone)]
pub enum PipelineOutcome {
    Found {
        colouring: PartialColouring,
        report: RunReport,
    },
    Failed {
        stage: String,
        report: RunReport,
    },
}

impl PipelineOutcome {
    pub fn report(&self) -> &RunReport {
        match self {
            PipelineOutcome::Found { report, .. } | PipelineOutcome::Failed { report, .. } => report,
        }
    }

    pub fn colouring(&self) -> Option<&PartialColouring> {
        match self {
            PipelineOutcome::Found { colouring, .. } => Some(colouring),
            PipelineOutcome::Failed { .. } => None,
        }
    }
}

/// The instance still being worked on, where it sits in the original, and
/// the colours fixed so far on original parts.
struct State<'a> {
    original: &'a CoverInstance,
    current: CoverInstance,
    to_original: Embedding,
    fixed: PartialColouring,
    report: RunReport,
    timings: bool,
}

impl State<'_> {
    fn replace(&mut self, inst: CoverInstance, into_current: Embedding) {
        self.to_original = into_current.then(&self.to_original);
        self.current = inst;
    }

    fn fix(&mut self, colouring: &PartialColouring) {
        for c in colouring.colours() {
            let c = self.to_original.map(c);
            debug_assert!(self.fixed.get(c.part).is_none(), "part coloured twice");
            self.fixed.set(c);
        }
    }

    fn stage(
        &mut self,
        name: impl Into<String>,
        attempts: usize,
        (parts_before, before): (usize, InstanceStats),
        started: Instant,
        notes: Vec<String>,
    ) {
        let name = name.into();
        log::info!(
            "stage {name}: {} -> {} parts, {} attempt(s)",
            parts_before,
            self.current.num_parts(),
            attempts
        );
        self.report.stages.push(StageRecord {
            name,
            attempts,
            parts_before,
            parts_after: self.current.num_parts(),
            wall_time_ms: self.timings.then(|| started.elapsed().as_secs_f64() * 1e3),
            before,
            after: stats(&self.current),
            notes,
        });
    }

    fn fail(mut self, stage: &str, err: impl ToString) -> PipelineOutcome {
        log::info!("pipeline failed at {stage}");
        self.report.outcome = "failed".into();
        self.report.failed_stage = Some(stage.into());
        self.report.error = Some(err.to_string());
        PipelineOutcome::Failed {
            stage: stage.into(),
            report: self.report,
        }
    }
}

/// Run the whole procedure on `inst`.
///
/// In adaptive mode a stage that misses its targets is recorded in
/// `shortfalls` and the run continues from what that stage achieved; nibble
/// rounds also stop early once the lists are four times the measured average
/// degree. Strict mode stops at the first failing stage.
pub fn run_pipeline(inst: &CoverInstance, params: &PipelineParams) -> Result<PipelineOutcome> {
    if !(params.epsilon > 0.0 && params.gamma > 0.0) {
        return Err(Error::InvalidArgument("epsilon and gamma must be positive".into()));
    }
    let strict = params.strict;
    let mut st = State {
        original: inst,
        current: inst.clone(),
        to_original: Embedding::identity(inst),
        fixed: PartialColouring::empty(inst.num_parts()),
        report: RunReport {
            instance_digest: instance_digest(inst),
            params: *params,
            stages: Vec::new(),
            reduction: None,
            measured: None,
            schedule: None,
            rounds: Vec::new(),
            resamples: None,
            finisher_embedding: None,
            shortfalls: Vec::new(),
            outcome: "running".into(),
            failed_stage: None,
            error: None,
            colouring: None,
        },
        timings: params.timings,
    };

    let d0 = stats(inst).avg_degree_f64();
    let small = d0 <= std::f64::consts::E;
    if small {
        st.report
            .shortfalls
            .push(format!("average degree {d0:.3} is at most e; going straight to the finisher"));
        if strict && d0 > 0.0 {
            return Ok(st.fail("reduce", "strict mode needs an average degree above e"));
        }
    } else {
        // Multiplicity reduction.
        let started = Instant::now();
        let before = (st.current.num_parts(), stats(&st.current));
        let reduce_params = ReduceParams {
            epsilon: params.epsilon,
            gamma: params.gamma,
            d: d0,
            seed: mix(params.seed, 1),
            max_attempts: params.max_attempts,
            strict,
        };
        match reduce(&st.current, &reduce_params) {
            Ok(r) => {
                let attempts = r.trace.steps.iter().map(|s| s.attempts_used).sum();
                let rejected = r.trace.steps.iter().filter(|s| !s.accepted).count();
                if rejected > 0 {
                    st.report
                        .shortfalls
                        .push(format!("{rejected} halving round(s) kept despite bad events"));
                }
                if r.trace.conditions.is_some_and(|c| !c.all()) {
                    st.report.shortfalls.push("halving sequence conditions not met".into());
                }
                st.replace(r.instance, r.embedding);
                st.report.reduction = Some(r.trace);
                st.stage("reduce", attempts, before, started, Vec::new());
            }
            Err(e) if !strict => {
                st.report.shortfalls.push(format!("reduction skipped: {e}"));
                st.stage("reduce", 0, before, started, vec![e.to_string()]);
            }
            Err(e) => return Ok(st.fail("reduce", e)),
        }

        // Re-measure and equalise.
        let started = Instant::now();
        let before = (st.current.num_parts(), stats(&st.current));
        let d1 = before.1.avg_degree_f64();
        let lambda0 = before.1.min_list_size;
        let eps1 = lambda0 as f64 / d1 - 1.0;
        st.report.measured = Some((d1, lambda0, eps1));
        let (eq, cut) = truncate_lists(&st.current, &vec![lambda0; st.current.num_parts()])?;
        st.replace(eq, cut);
        st.stage("equalize", 1, before, started, Vec::new());

        if d1 <= std::f64::consts::E || eps1 <= 0.0 {
            let why = format!("after reduction d′ = {d1:.3}, ε′ = {eps1:.3}; no nibble rounds");
            if strict {
                return Ok(st.fail("schedule", why));
            }
            st.report.shortfalls.push(why);
        } else {
            let schedule = build_schedule(d1, lambda0 as f64, eps1)?;
            let p = schedule.p;
            let entries = schedule.entries.clone();
            st.report.schedule = Some(schedule);
            for entry in entries.iter().take(entries.len() - 1) {
                if st.current.num_parts() == 0 {
                    break;
                }
                let now = (st.current.num_parts(), stats(&st.current));
                if !strict && now.1.min_list_size as f64 >= 4.0 * now.1.avg_degree_f64() {
                    st.report
                        .shortfalls
                        .push(format!("lists reached four times the average degree after {} round(s)", entry.i));
                    break;
                }
                let started = Instant::now();
                let np = NibbleParams {
                    p,
                    epsilon: eps1,
                    d: entry.d_i,
                    lambda: entry.lambda_i,
                    seed: mix(params.seed, 100 + entry.i as u64),
                    max_attempts: params.max_attempts,
                    strict,
                };
                let name = format!("nibble {}", entry.i);
                match nibble_round(&st.current, &np) {
                    Ok(r) => {
                        let coloured = r.colouring.len();
                        st.report.rounds.push(RoundSummary {
                            i: entry.i,
                            d_i: entry.d_i,
                            lambda_i: entry.lambda_i,
                            attempts: r.attempts,
                            accepted: r.accepted,
                            bad_events: r.report.triggered_bad_events.iter().filter(|e| e.is_rejecting()).count(),
                            coloured_parts: coloured,
                            remaining_parts: r.residual.num_parts(),
                            target_list_size: r.target_list_size,
                            short_lists: r.short_lists,
                            target_avg_degree: r.target_avg_degree,
                            achieved_avg_degree: r.achieved_avg_degree,
                        });
                        if !r.accepted {
                            st.report
                                .shortfalls
                                .push(format!("round {} kept despite bad events", entry.i));
                        }
                        st.fix(&r.colouring);
                        st.replace(r.residual, r.embedding);
                        st.stage(name, r.attempts, now, started, Vec::new());
                    }
                    Err(e) if !strict => {
                        st.report.shortfalls.push(format!("round {} failed: {e}", entry.i));
                        st.stage(name, params.max_attempts, now, started, vec![e.to_string()]);
                        break;
                    }
                    Err(e) => return Ok(st.fail(&name, e)),
                }
            }
        }
    }

    // Finisher.
    let started = Instant::now();
    let before = (st.current.num_parts(), stats(&st.current));
    let fp = FinisherParams {
        max_resamples: params.max_resamples,
        seed: mix(params.seed, 2),
        enforce_precondition: strict,
        list_factor: 4.0,
    };
    let outcome = match finish(&st.current, &fp) {
        Ok(o) => o,
        Err(e) => return Ok(st.fail("finish", e)),
    };
    st.report.resamples = Some(outcome.resamples());
    st.report.finisher_embedding = Some(st.to_original.clone());
    match outcome {
        FinishOutcome::Found { colouring, resamples } => {
            st.fix(&colouring);
            st.stage("finish", resamples as usize, before, started, Vec::new());
        }
        FinishOutcome::ResampleLimit { resamples } => {
            st.stage("finish", resamples as usize, before, started, Vec::new());
            return Ok(st.fail("finish", format!("no transversal within {resamples} resamples")));
        }
    }

    let colouring = st.fixed.clone();
    if !is_independent_transversal(st.original, &colouring) {
        return Ok(st.fail("verify", "stitched colouring is not an independent transversal"));
    }
    st.report.outcome = "found".into();
    st.report.colouring = Some(colouring.colours().collect());
    Ok(PipelineOutcome::Found {
        colouring,
        report: st.report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::InstanceData;
    use crate::generators::{gen_single_conflict, BaseGraph};

    #[test]
    fn ratio_growth_example() {
        let (eps, p) = (0.5, 0.1);
        let r: f64 = (1.0 - p / 1.375) / (1.0 - p / 1.125);
        assert!((r - 1.01774).abs() < 1e-5);
        assert!(r >= 1.0 + eps * p / 4.0);
    }

    #[test]
    fn growth_bound_needs_moderate_epsilon() {
        // (1 + 3ε/4)(1 + ε/4 − p) = 2.1 > 2 at ε = 1, p = 0.05.
        let (eps, p) = (1.0, 0.05);
        let r: f64 = (1.0 - p / 1.75) / (1.0 - p / 1.25);
        assert!(r < 1.0 + eps * p / 4.0);
    }

    #[test]
    fn generous_lists_need_no_rounds() {
        let s = build_schedule(10.0, 45.0, 0.5).unwrap();
        assert_eq!(s.i_star, 0);
        assert_eq!(s.entries.len(), 1);
    }

    #[test]
    fn schedule_at_e_to_the_ten() {
        let d = 10f64.exp();
        let s = build_schedule(d, 1.5 * d, 0.5).unwrap();
        assert!((s.p - 0.1).abs() < 1e-12);
        assert!((50..=60).contains(&s.i_star), "{}", s.i_star);
        assert!(s.i_star as f64 <= 12.0 / (0.5 * 0.1));
        let last = &s.entries[s.i_star];
        assert!(last.lambda_i.ceil() / last.d_i >= 4.0);
        let prev = &s.entries[s.i_star - 1];
        assert!(prev.lambda_i.ceil() / prev.d_i < 4.0);
    }

    #[test]
    fn schedule_rejects_bad_input() {
        assert!(build_schedule(100.0, 150.0, 0.0).is_err());
        assert!(build_schedule(2.0, 5.0, 0.5).is_err());
    }

    #[test]
    fn conflict_free_pipeline() {
        let inst = CoverInstance::from_data(InstanceData {
            parts: vec![vec!["a".into(), "b".into()]; 4],
            base_edges: vec![(0, 1, 1), (2, 3, 2)],
            conflicts: vec![],
        })
        .unwrap();
        match run_pipeline(&inst, &PipelineParams::new(0.5, 0.5, 1)).unwrap() {
            PipelineOutcome::Found { colouring, report } => {
                assert!(is_independent_transversal(&inst, &colouring));
                assert_eq!(report.outcome, "found");
            }
            PipelineOutcome::Failed { stage, .. } => panic!("failed at {stage}"),
        }
    }

    #[test]
    fn single_conflict_pipeline_is_verified_and_reproducible() {
        let g = gen_single_conflict(&BaseGraph::complete(60, 2), 12, 3).unwrap();
        let s = stats(&g.instance);
        let gamma = s.max_colour_multiplicity as f64 / s.avg_degree_f64();
        let params = PipelineParams::new(0.5, gamma, 7);
        let a = run_pipeline(&g.instance, &params).unwrap();
        let b = run_pipeline(&g.instance, &params).unwrap();
        assert_eq!(
            serde_json::to_string(a.report()).unwrap(),
            serde_json::to_string(b.report()).unwrap()
        );
        if let Some(c) = a.colouring() {
            assert!(is_independent_transversal(&g.instance, c));
        }
    }
}
