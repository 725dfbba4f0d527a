use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::events::{detect_bad_events, Expectations};
use super::round::{evaluate_round, sample_wasteful, WastefulColouring};
use super::{exact_expected_useable, NibbleParams};
use crate::cover::{ColourRef, CoverInstance};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::rng::substream;

#[derive(Debug, Clone, Default)]
pub struct EstimateOptions {
    /// Colours whose coloured-neighbour counts are estimated.
    pub tracked: Vec<ColourRef>,
    /// Run the full round evaluation and bad-event detection per trial.
    /// Without it only the useable counts are computed, which is far cheaper.
    pub evaluate_events: bool,
    /// Keep per-trial, per-part records.
    pub keep_trials: bool,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartEstimate {
    pub part: usize,
    pub mean_useable: f64,
    pub std_error: f64,
    /// `Σ_c Keep(v, c)` with the nominal `Λ`.
    pub closed_form: f64,
    /// The same expectation from the actual neighbouring list sizes.
    pub exact: f64,
    /// `(1 − p/(1+ε))|L(v)|`.
    pub lower_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_star_frequency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TotalEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub closed_form: f64,
    pub exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColourEstimate {
    pub colour: ColourRef,
    pub mean_coloured_nbrs: f64,
    pub std_error: f64,
    /// `p(1 − p/(1+ε))deg_H(c)`.
    pub lower_bound: f64,
    /// Empirical frequency of the colour being useable.
    pub useable_frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub useable_cols: Vec<u32>,
    /// Bad events indexed by each part (empty unless events are evaluated).
    pub bad_events: Vec<u32>,
    pub omega_star: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub trials: usize,
    pub params: NibbleParams,
    pub parts: Vec<PartEstimate>,
    /// Useable colours summed over all parts.
    pub total: TotalEstimate,
    pub colours: Vec<ColourEstimate>,
    /// Per event kind, the fraction of trials in which it fired at least once.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event_frequency: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial_records: Option<Vec<TrialRecord>>,
}

struct Trial {
    useable: Vec<u32>,
    coloured: Vec<u32>,
    tracked_useable: Vec<bool>,
    bad_events: Vec<u32>,
    omega_star: Vec<bool>,
    kinds: Vec<&'static str>,
}

struct Scratch {
    blocked: Vec<bool>,
    touched: Vec<usize>,
}

/// Independent rounds, trial `t` drawing from stream `t` of the seed, with
/// empirical means and standard errors next to their analytic values.
pub fn monte_carlo_check(
    inst: &CoverInstance,
    params: &NibbleParams,
    trials: usize,
    options: &EstimateOptions,
) -> Result<EstimateReport> {
    params.validate()?;
    if trials < 100 {
        return Err(Error::InvalidArgument("at least 100 trials are required".into()));
    }
    for &c in &options.tracked {
        if c.part >= inst.num_parts() || c.slot >= inst.list_len(c.part) {
            return Err(Error::InvalidArgument(format!("tracked colour {c} is not in the instance")));
        }
    }
    let expectations = Expectations::closed_form(inst, params)?;
    let tracked: Vec<usize> = options.tracked.iter().map(|&c| inst.colour_id(c)).collect();

    let results = options.execution.map_with(
        trials,
        || Scratch {
            blocked: vec![false; inst.num_colours()],
            touched: Vec::new(),
        },
        |scratch, t| {
            let w = sample_wasteful(inst, params.p, &mut substream(params.seed, t as u64));
            if options.evaluate_events {
                full_trial(inst, params, &expectations, &tracked, &w)
            } else {
                light_trial(inst, &tracked, &w, scratch)
            }
        },
    );

    let n = trials as f64;
    let lower = 1.0 - params.p / (1.0 + params.epsilon);
    let exact = exact_expected_useable(inst, params.p);
    let parts = (0..inst.num_parts())
        .map(|v| {
            let (mean, se) = mean_se(results.iter().map(|r| r.useable[v] as f64), n);
            PartEstimate {
                part: v,
                mean_useable: mean,
                std_error: se,
                closed_form: expectations.useable[v],
                exact: exact[v],
                lower_bound: lower * inst.list_len(v) as f64,
                omega_star_frequency: options
                    .evaluate_events
                    .then(|| results.iter().filter(|r| r.omega_star[v]).count() as f64 / n),
            }
        })
        .collect();
    let (mean, std_error) = mean_se(
        results.iter().map(|r| r.useable.iter().map(|&x| x as f64).sum::<f64>()),
        n,
    );
    let total = TotalEstimate {
        mean,
        std_error,
        closed_form: expectations.useable.iter().sum(),
        exact: exact.iter().sum(),
    };
    let colours = options
        .tracked
        .iter()
        .enumerate()
        .map(|(i, &colour)| {
            let (mean, se) = mean_se(results.iter().map(|r| r.coloured[i] as f64), n);
            ColourEstimate {
                colour,
                mean_coloured_nbrs: mean,
                std_error: se,
                lower_bound: params.p * lower * inst.degree(tracked[i]) as f64,
                useable_frequency: results.iter().filter(|r| r.tracked_useable[i]).count() as f64 / n,
            }
        })
        .collect();
    let event_frequency = options.evaluate_events.then(|| {
        let mut freq = BTreeMap::new();
        for kind in ["A_v", "A_vc", "A_prime_v", "Omega_star_v"] {
            let hits = results.iter().filter(|r| r.kinds.contains(&kind)).count();
            freq.insert(kind.to_string(), hits as f64 / n);
        }
        freq
    });
    let trial_records = options.keep_trials.then(|| {
        results
            .into_iter()
            .enumerate()
            .map(|(trial, r)| TrialRecord {
                trial,
                useable_cols: r.useable,
                bad_events: r.bad_events,
                omega_star: r.omega_star,
            })
            .collect()
    });
    Ok(EstimateReport {
        trials,
        params: *params,
        parts,
        total,
        colours,
        event_frequency,
        trial_records,
    })
}

fn mean_se(xs: impl Iterator<Item = f64> + Clone, n: f64) -> (f64, f64) {
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn full_trial(
    inst: &CoverInstance,
    params: &NibbleParams,
    expectations: &Expectations,
    tracked: &[usize],
    w: &WastefulColouring,
) -> Trial {
    let report = evaluate_round(inst, w, params);
    let events = detect_bad_events(&report, params, expectations);
    let mut bad_events = vec![0u32; inst.num_parts()];
    let mut kinds = Vec::new();
    for e in &events {
        bad_events[e.part()] += 1;
        if !kinds.contains(&e.kind()) {
            kinds.push(e.kind());
        }
    }
    Trial {
        coloured: tracked.iter().map(|&c| report.coloured_nbrs[c]).collect(),
        tracked_useable: tracked.iter().map(|&c| report.useable[c]).collect(),
        useable: report.useable_cols,
        bad_events,
        omega_star: report.omega_star,
        kinds,
    }
}

/// Useable counts only: block the neighbours of every activated choice.
fn light_trial(inst: &CoverInstance, tracked: &[usize], w: &WastefulColouring, s: &mut Scratch) -> Trial {
    let mut useable: Vec<u32> = inst.list_lens().into_iter().map(|l| l as u32).collect();
    for u in w.activated() {
        let chosen = inst.colour_ids(u).start + w.phi[u].expect("activated");
        for &x in inst.neighbours(chosen) {
            let x = x as usize;
            if !s.blocked[x] {
                s.blocked[x] = true;
                s.touched.push(x);
                useable[inst.part_of(x)] -= 1;
            }
        }
    }
    let coloured = tracked
        .iter()
        .map(|&c| {
            inst.neighbours(c)
                .iter()
                .filter(|&&x| w.a_col[inst.part_of(x as usize)])
                .count() as u32
        })
        .collect();
    let tracked_useable = tracked.iter().map(|&c| !s.blocked[c]).collect();
    for x in s.touched.drain(..) {
        s.blocked[x] = false;
    }
    Trial {
        useable,
        coloured,
        tracked_useable,
        bad_events: Vec::new(),
        omega_star: Vec::new(),
        kinds: Vec::new(),
    }
}
