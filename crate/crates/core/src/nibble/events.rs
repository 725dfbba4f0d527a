use serde::{Deserialize, Serialize};

use super::round::NibbleRoundReport;
use super::{expected_useable, NibbleParams};
use crate::cover::CoverInstance;
use crate::error::Result;

/// A threshold violated by one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BadEvent {
    /// Too few useable colours.
    #[serde(rename = "A_v")]
    Useable { part: usize },
    /// Too few neighbours of a colour were coloured.
    #[serde(rename = "A_vc")]
    ColouredNbrs { part: usize, slot: usize },
    /// The useable colours kept too much of the old degree.
    #[serde(rename = "A_prime_v")]
    OldDegree { part: usize },
    /// Some nearby colour saw too many conflicts. Recorded only; it does not
    /// cause a round to be rejected.
    #[serde(rename = "Omega_star_v")]
    OmegaStar { part: usize },
}

impl BadEvent {
    pub fn part(&self) -> usize {
        match *self {
            BadEvent::Useable { part }
            | BadEvent::ColouredNbrs { part, .. }
            | BadEvent::OldDegree { part }
            | BadEvent::OmegaStar { part } => part,
        }
    }

    pub fn is_rejecting(&self) -> bool {
        !matches!(self, BadEvent::OmegaStar { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BadEvent::Useable { .. } => "A_v",
            BadEvent::ColouredNbrs { .. } => "A_vc",
            BadEvent::OldDegree { .. } => "A_prime_v",
            BadEvent::OmegaStar { .. } => "Omega_star_v",
        }
    }
}

/// Reference values the thresholds are measured against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    /// `E[#useable_v]` per part.
    pub useable: Vec<f64>,
}

impl Expectations {
    /// `Σ_c Keep(v, c)` with the nominal `Λ` of the parameters.
    pub fn closed_form(inst: &CoverInstance, params: &NibbleParams) -> Result<Self> {
        Ok(Self {
            useable: expected_useable(inst, params.p, params.lambda)?,
        })
    }
}

/// Every violated threshold, in part order. The colour event is only checked
/// for colours with at least one conflict: a colour without neighbours can
/// never have coloured neighbours, and its degree does not move.
pub fn detect_bad_events(
    report: &NibbleRoundReport,
    params: &NibbleParams,
    expectations: &Expectations,
) -> Vec<BadEvent> {
    let p = params.p;
    let slack = p.powf(1.25);
    let floor = params.d.powf(6.0 / 7.0);
    let colour_ratio = 1.0 / (1.0 + params.epsilon / 8.0);
    let mut out = Vec::new();
    for v in 0..report.num_parts() {
        let expected = expectations.useable[v];
        if (report.useable_cols[v] as f64) < (1.0 - slack) * expected {
            out.push(BadEvent::Useable { part: v });
        }
        for c in report.colours_of(v) {
            let deg = report.degrees[c] as f64;
            if deg == 0.0 {
                continue;
            }
            let scale = (p * deg).max(floor);
            if (report.coloured_nbrs[c] as f64) < colour_ratio * scale {
                out.push(BadEvent::ColouredNbrs {
                    part: v,
                    slot: c - report.colour_offsets[v],
                });
            }
        }
        if report.remaining_cols_old_deg[v] as f64 > (1.0 + slack) * params.d * expected {
            out.push(BadEvent::OldDegree { part: v });
        }
        if report.omega_star[v] {
            out.push(BadEvent::OmegaStar { part: v });
        }
    }
    out
}
