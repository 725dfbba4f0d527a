use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CoverInstance;

/// Degree and multiplicity statistics of a cover instance. The two averages
/// are exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceStats {
    /// `Δ(H)`
    pub max_degree: usize,
    /// `Δ̄_L(H) = max_v (1/|L(v)|) Σ_{c ∈ L(v)} deg_H(c)`
    #[serde(with = "ratio_string")]
    pub max_avg_colour_degree: Ratio<u64>,
    /// `μ_L(H)`: most neighbours a single colour has inside one other list.
    #[serde(rename = "mu")]
    pub max_colour_multiplicity: usize,
    /// `μ̄_L(H) = max_{vv' ∈ E(G)} |E_H(L(v), L(v'))| / |L(v)|`
    #[serde(rename = "mu_bar", with = "ratio_string")]
    pub max_avg_colour_multiplicity: Ratio<u64>,
    /// `Δ(G)` counting multiplicity.
    pub base_max_degree: u64,
    pub min_list_size: usize,
    pub max_list_size: usize,
}

impl InstanceStats {
    pub fn avg_degree_f64(&self) -> f64 {
        ratio_f64(self.max_avg_colour_degree)
    }
}

pub fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn stats(inst: &CoverInstance) -> InstanceStats {
    let n = inst.num_parts();
    let max_degree = (0..inst.num_colours())
        .map(|c| inst.degree(c))
        .max()
        .unwrap_or(0);

    let zero = Ratio::from_integer(0u64);
    let max_avg_colour_degree = (0..n)
        .map(|p| Ratio::new(inst.degree_sum(p), inst.list_len(p) as u64))
        .max()
        .unwrap_or(zero);

    // Neighbour rows are sorted by global id, so neighbours inside one list
    // form a contiguous run.
    let mut max_mult = 0usize;
    let mut cross = vec![0u64; n];
    let mut max_avg_mult = zero;
    for v in 0..n {
        for c in inst.colour_ids(v) {
            let row = inst.neighbours(c);
            let mut i = 0;
            while i < row.len() {
                let part = inst.part_of(row[i] as usize);
                let mut j = i + 1;
                while j < row.len() && inst.part_of(row[j] as usize) == part {
                    j += 1;
                }
                max_mult = max_mult.max(j - i);
                cross[part] += (j - i) as u64;
                i = j;
            }
        }
        for &(w, _) in inst.base_neighbours(v) {
            let r = Ratio::new(cross[w], inst.list_len(v) as u64);
            if r > max_avg_mult {
                max_avg_mult = r;
            }
            cross[w] = 0;
        }
    }

    let lens = inst.list_lens();
    InstanceStats {
        max_degree,
        max_avg_colour_degree,
        max_colour_multiplicity: max_mult,
        max_avg_colour_multiplicity: max_avg_mult,
        base_max_degree: (0..n).map(|p| inst.base_degree(p)).max().unwrap_or(0),
        min_list_size: lens.iter().copied().min().unwrap_or(0),
        max_list_size: lens.iter().copied().max().unwrap_or(0),
    }
}

mod ratio_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
