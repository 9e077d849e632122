mod common;

use std::collections::BTreeSet;

use common::*;
use rand::Rng;

#[test]
fn matches_brute_force_up_to_four_holes() {
    let counts: Vec<usize> = (0..=4).map(|n| check_all_achievable(n).1).collect();
    // multisets of nonempty subsets with every element used at most 4 times
    assert_eq!(counts, vec![1, 5, 55, 1459, 92550]);
}

/// Profiles no multiset realizes must come back empty.
#[test]
fn unachievable_profiles_have_no_solutions() {
    // every profile over three holes, achievable or not
    let n = 3;
    for single in singles_vectors(n) {
        let buckets = brute_force_by_joint(n, &single);
        let caps = [single[0].min(single[1]), single[0].min(single[2]), single[1].min(single[2])];
        for j0 in 0..=caps[0] {
            for j1 in 0..=caps[1] {
                for j2 in 0..=caps[2] {
                    let joint = vec![j0, j1, j2];
                    let expected: BTreeSet<Vec<u32>> =
                        buckets.get(&joint).cloned().unwrap_or_default().into_iter().collect();
                    assert_eq!(solve_masks(n, &single, &joint), expected);
                }
            }
        }
    }

    // random feasible-looking profiles over four and five holes
    let mut r = rng(7);
    let mut cache = std::collections::HashMap::new();
    for _ in 0..2000 {
        let n = r.gen_range(4..=5);
        let single: Vec<u32> = (0..n).map(|_| r.gen_range(0..=MAX_M)).collect();
        let mut joint = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                joint.push(r.gen_range(0..=single[a].min(single[b])));
            }
        }
        let buckets = cache
            .entry(single.clone())
            .or_insert_with(|| brute_force_by_joint(n, &single));
        let expected: BTreeSet<Vec<u32>> = buckets
            .get(&joint)
            .cloned()
            .unwrap_or_default()
            .into_iter()
            .collect();
        assert_eq!(solve_masks(n, &single, &joint), expected, "{single:?} {joint:?}");
    }
}
