use super::{CoverInstance, Embedding};
use crate::error::{Error, Result};

/// Shrink every list to `targets[part]` by repeatedly deleting a colour of
/// largest current conflict degree (lowest slot on ties). Parts are processed
/// in index order and degrees are updated after every deletion.
///
/// A removed colour always has degree at least its part's current average, so
/// no part's average colour degree ever increases.
pub fn truncate_lists(inst: &CoverInstance, targets: &[usize]) -> Result<(CoverInstance, Embedding)> {
    if targets.len() != inst.num_parts() {
        return Err(Error::InvalidArgument(format!(
            "{} targets for {} parts",
            targets.len(),
            inst.num_parts()
        )));
    }
    for (part, &t) in targets.iter().enumerate() {
        if t == 0 || t > inst.list_len(part) {
            return Err(Error::InvalidArgument(format!(
                "target {t} for part {part} with list size {}",
                inst.list_len(part)
            )));
        }
    }

    let mut deg = inst.degrees();
    let mut removed = vec![false; inst.num_colours()];
    for (part, &target) in targets.iter().enumerate() {
        let ids = inst.colour_ids(part);
        let mut size = ids.len();
        let mut sum: usize = ids.clone().map(|c| deg[c]).sum();
        while size > target {
            let mut best = None;
            for c in ids.clone().filter(|&c| !removed[c]) {
                if best.is_none_or(|b| deg[c] > deg[b]) {
                    best = Some(c);
                }
            }
            let c = best.expect("list above target has a colour");
            debug_assert!(deg[c] * size >= sum, "removal would raise the average");
            removed[c] = true;
            sum -= deg[c];
            size -= 1;
            for &w in inst.neighbours(c) {
                if !removed[w as usize] {
                    deg[w as usize] -= 1;
                }
            }
        }
    }

    let selection: Vec<(usize, Vec<usize>)> = (0..inst.num_parts())
        .map(|p| {
            let start = inst.colour_ids(p).start;
            let kept = inst
                .colour_ids(p)
                .filter(|&c| !removed[c])
                .map(|c| c - start)
                .collect();
            (p, kept)
        })
        .collect();
    Ok(inst.induced(&selection))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::tiny1;
    use super::super::{stats, ColourRef};
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn drops_a_from_u() {
        let t = tiny1();
        let (out, emb) = truncate_lists(&t, &[1, 2]).unwrap();
        assert_eq!(out.labels(0), &["b".to_string()]);
        assert_eq!(out.num_conflicts(), 1);
        // b–c survives
        assert_eq!(out.label(out.colour_ref(out.neighbours(0)[0] as usize)), "c");
        assert_eq!(emb.map(ColourRef::new(0, 0)), ColourRef::new(0, 1));
    }

    #[test]
    fn drops_c_from_v() {
        let t = tiny1();
        let (out, _) = truncate_lists(&t, &[2, 1]).unwrap();
        assert_eq!(out.labels(1), &["d".to_string()]);
        let pairs: Vec<_> = out
            .conflict_pairs()
            .map(|(a, b)| (out.label(out.colour_ref(a)).to_string(), out.label(out.colour_ref(b)).to_string()))
            .collect();
        assert_eq!(pairs, vec![("a".to_string(), "d".to_string())]);
    }

    #[test]
    fn identity_targets_change_nothing() {
        let t = tiny1();
        let (out, emb) = truncate_lists(&t, &[2, 2]).unwrap();
        assert_eq!(out, t);
        assert_eq!(emb, Embedding::identity(&t));
    }

    #[test]
    fn bad_targets_are_rejected() {
        let t = tiny1();
        assert!(truncate_lists(&t, &[0, 2]).is_err());
        assert!(truncate_lists(&t, &[3, 2]).is_err());
        assert!(truncate_lists(&t, &[2]).is_err());
    }

    #[test]
    fn averages_never_rise() {
        let t = tiny1();
        let before = stats(&t).max_avg_colour_degree;
        let (out, _) = truncate_lists(&t, &[1, 1]).unwrap();
        assert!(stats(&out).max_avg_colour_degree <= before);
        assert_eq!(stats(&out).max_avg_colour_degree, Ratio::from_integer(0));
    }
}
