use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Alignment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Heuristic {
    Intersection,
    #[default]
    GrowDiagFinal,
}

const NEIGHBOURS: [(i64, i64); 8] = [(-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)];

/// Combines a source→target and a target→source alignment, both expressed in
/// (source, target) coordinates.
pub fn symmetrize(forward: &Alignment, reverse: &Alignment, heuristic: Heuristic) -> Result<Alignment> {
    if (forward.source_len, forward.target_len) != (reverse.source_len, reverse.target_len) {
        return Err(Error::Invariant(format!(
            "cannot symmetrize a {}x{} alignment with a {}x{} one",
            forward.source_len, forward.target_len, reverse.source_len, reverse.target_len
        )));
    }
    let inter: BTreeSet<(usize, usize)> = forward.links().intersection(reverse.links()).copied().collect();
    let links = match heuristic {
        Heuristic::Intersection => inter,
        Heuristic::GrowDiagFinal => {
            let union: BTreeSet<(usize, usize)> = forward.links().union(reverse.links()).copied().collect();
            grow_diag_final(inter, &union)
        }
    };
    Alignment::new(forward.source_len, forward.target_len, links)
}

fn grow_diag_final(mut links: BTreeSet<(usize, usize)>, union: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
    let src_aligned = |l: &BTreeSet<(usize, usize)>, i: usize| l.iter().any(|x| x.0 == i);
    let tgt_aligned = |l: &BTreeSet<(usize, usize)>, j: usize| l.iter().any(|x| x.1 == j);

    // Grow along (diagonal) neighbours of existing links.
    loop {
        let mut added = false;
        for (i, j) in links.clone() {
            for (di, dj) in NEIGHBOURS {
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                if ni < 1 || nj < 1 {
                    continue;
                }
                let cand = (ni as usize, nj as usize);
                if union.contains(&cand)
                    && !links.contains(&cand)
                    && (!src_aligned(&links, cand.0) || !tgt_aligned(&links, cand.1))
                {
                    links.insert(cand);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    // Final: remaining union links touching an unaligned word.
    for &cand in union {
        if !links.contains(&cand) && (!src_aligned(&links, cand.0) || !tgt_aligned(&links, cand.1)) {
            links.insert(cand);
        }
    }
    links
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn al(links: &[(usize, usize)]) -> Alignment {
        Alignment::new(4, 4, links.iter().copied()).unwrap()
    }

    #[test]
    fn intersection_of_disjoint_sets_is_empty() {
        let out = symmetrize(&al(&[(1, 1)]), &al(&[(2, 2)]), Heuristic::Intersection).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn grow_adds_diagonal_neighbour() {
        let fwd = al(&[(1, 1), (2, 2), (3, 4)]);
        let rev = al(&[(1, 1), (2, 2)]);
        let out = symmetrize(&fwd, &rev, Heuristic::GrowDiagFinal).unwrap();
        assert!(out.contains(3, 4));
        let out = symmetrize(&fwd, &rev, Heuristic::Intersection).unwrap();
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn grow_skips_links_between_aligned_words() {
        // (1,2) joins two words that are already aligned.
        let fwd = al(&[(1, 1), (2, 2), (1, 2)]);
        let rev = al(&[(1, 1), (2, 2)]);
        let out = symmetrize(&fwd, &rev, Heuristic::GrowDiagFinal).unwrap();
        assert!(!out.contains(1, 2));
    }

    #[test]
    fn mismatched_pairs_are_rejected() {
        let a = Alignment::new(2, 3, []).unwrap();
        let b = Alignment::new(3, 2, []).unwrap();
        assert!(symmetrize(&a, &b, Heuristic::Intersection).is_err());
    }

    fn arb_alignment() -> impl Strategy<Value = Alignment> {
        prop::collection::btree_set((1usize..=5, 1usize..=5), 0..12)
            .prop_map(|s| Alignment::new(5, 5, s).unwrap())
    }

    proptest! {
        #[test]
        fn idempotent_on_equal_inputs(a in arb_alignment()) {
            prop_assert_eq!(&symmetrize(&a, &a, Heuristic::Intersection).unwrap(), &a);
            prop_assert_eq!(&symmetrize(&a, &a, Heuristic::GrowDiagFinal).unwrap(), &a);
        }

        #[test]
        fn set_relations(a in arb_alignment(), b in arb_alignment()) {
            let inter = symmetrize(&a, &b, Heuristic::Intersection).unwrap();
            let gdf = symmetrize(&a, &b, Heuristic::GrowDiagFinal).unwrap();
            prop_assert!(inter.links().is_subset(a.links()));
            prop_assert!(inter.links().is_subset(b.links()));
            prop_assert!(inter.links().is_subset(gdf.links()));
            let union: BTreeSet<_> = a.links().union(b.links()).copied().collect();
            prop_assert!(gdf.links().is_subset(&union));
        }
    }
}
