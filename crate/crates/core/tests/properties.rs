mod common;

use std::collections::BTreeSet;

use common::*;
use fillings::graph::{
    arrange_conveniently, longest_chain, parse_graph, rearrange_after_removal, reduce_for_capping,
    validate_no_bad_vertices, Arrangement, ResolutionGraph,
};
use fillings::multiplicity::{check_bounds, check_min_formula, page_profile, profile};
use fillings::open_book::{
    build_page, cap_holes, lantern_replace_last, last_domain_holes, select_marked_holes, standard_factorization,
};
use fillings::solver::{is_laminar, lantern_moves, lantern_orbit};
use proptest::prelude::*;

fn tree_strategy(max_n: usize) -> impl Strategy<Value = ResolutionGraph> {
    (any::<u64>(), 1..=max_n).prop_map(|(seed, n)| random_tree(&mut rng(seed), n, -8, -5))
}

fn good_tree_strategy(max_n: usize) -> impl Strategy<Value = ResolutionGraph> {
    any::<u64>().prop_map(move |seed| random_good_tree(&mut rng(seed), max_n, -8, -5))
}

fn check_arrangement(g: &ResolutionGraph) {
    let arr = arrange_conveniently(g);
    let (chain, satellites) = arrangement_oracle(g);
    assert_eq!(arr.chain(), chain.as_slice(), "{g}");
    assert_eq!(arr.satellite_sets(), &satellites, "{g}");
}

#[test]
fn arrangement_matches_oracle_on_every_small_tree() {
    for n in 1..=7 {
        for g in all_trees(n, -5) {
            check_arrangement(&g);
        }
    }
}

#[test]
fn longest_chain_is_a_diameter() {
    for n in 1..=8 {
        let trees = all_trees(n, -6);
        let step = (trees.len() / 3000).max(1);
        for g in trees.iter().step_by(step) {
            let chain = longest_chain(g);
            let dist = Distances::new(g);
            let diam = dist
                .ids()
                .iter()
                .flat_map(|&a| dist.ids().iter().map(move |&b| (a, b)))
                .map(|(a, b)| dist.get(a, b))
                .max()
                .unwrap();
            assert_eq!(chain.len(), diam + 1);
            assert!(chain.windows(2).all(|w| g.has_edge(w[0], w[1])));
            assert!(chain[0] <= *chain.last().unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn arrangement_matches_oracle_on_random_trees(g in tree_strategy(12)) {
        check_arrangement(&g);
    }

    #[test]
    fn rearrangement_is_convenient_and_keeps_the_last_vertex(g in tree_strategy(12)) {
        let arr = arrange_conveniently(&g);
        prop_assume!(arr.k() >= 2);
        let next = rearrange_after_removal(&g, &arr).unwrap();
        let reduced = g.without_vertices(&BTreeSet::from([arr.first()])).unwrap();
        // from_chain re-validates every invariant
        prop_assert_eq!(&Arrangement::from_chain(&reduced, next.chain().to_vec()).unwrap(), &next);
        prop_assert_eq!(next.last(), arr.last());
        prop_assert!(next.k() == arr.k() || next.k() == arr.k() - 1);
    }

    #[test]
    fn reduction_keeps_vertices_good(g in good_tree_strategy(10)) {
        let arr = arrange_conveniently(&g);
        prop_assume!(arr.k() >= 2);
        let reduced = reduce_for_capping(&g, &arr).unwrap();
        prop_assert!(validate_no_bad_vertices(&reduced).passed);
        let prev = arr.chain_vertex(arr.k() - 1);
        prop_assert_eq!(reduced.boundary_count(prev), g.boundary_count(prev));
    }

    #[test]
    fn hole_count_identity(g in good_tree_strategy(10)) {
        let page = build_page(&g, &arrange_conveniently(&g)).unwrap();
        let circles: i64 = g.vertices().map(|v| g.boundary_count(v)).sum();
        prop_assert_eq!(page.holes().len() as i64, circles - 1);
        let ids = page.hole_ids();
        prop_assert_eq!(ids, (1..=page.holes().len() as u32).collect::<Vec<_>>());
        let standard = standard_factorization(&page);
        prop_assert_eq!(standard.len(), page.holes().len() + 1 + g.edge_count());
    }

    #[test]
    fn standard_profile_matches_distances(g in good_tree_strategy(10)) {
        let arr = arrange_conveniently(&g);
        let page = build_page(&g, &arr).unwrap();
        let standard = standard_factorization(&page);
        let ids = page.hole_ids();
        let (single, joint) = count_profile(&standard, &ids);
        let dist = Distances::new(&g);
        let root = arr.first();
        let depth = |h| dist.get(root, page.owner(h).unwrap());
        for &h in &ids {
            prop_assert_eq!(single[&h] as usize, 2 + depth(h));
        }
        for (&(a, b), &m) in &joint {
            let (oa, ob) = (page.owner(a).unwrap(), page.owner(b).unwrap());
            let meet = (depth(a) + depth(b) - dist.get(oa, ob)) / 2;
            prop_assert_eq!(m as usize, 1 + meet);
        }
        let p = page_profile(&page, &standard).unwrap();
        prop_assert!(check_bounds(&page, &p).passed);
        prop_assert!(is_laminar(&standard));
    }

    #[test]
    fn marked_holes_follow_the_min_formula(g in good_tree_strategy(9)) {
        let page = build_page(&g, &arrange_conveniently(&g)).unwrap();
        if let Ok(marks) = select_marked_holes(&page) {
            let p = page_profile(&page, &standard_factorization(&page)).unwrap();
            let report = check_min_formula(&page, &marks, &p);
            prop_assert!(report.passed, "{:?}", report.violations);
        }
    }

    #[test]
    fn capping_gives_the_reduced_page(g in good_tree_strategy(10)) {
        let arr = arrange_conveniently(&g);
        prop_assume!(arr.k() >= 2);
        let page = build_page(&g, &arr).unwrap();
        let (capped, f) = cap_holes(&page, &standard_factorization(&page), &last_domain_holes(&page)).unwrap();
        let reduced = reduce_for_capping(&g, &arr).unwrap();
        let expected = build_page(&reduced, &arr.truncated(&reduced).unwrap()).unwrap();
        prop_assert_eq!(&capped, &expected);
        prop_assert_eq!(f, standard_factorization(&expected));
    }

    #[test]
    fn lantern_moves_preserve_profiles(g in good_tree_strategy(7)) {
        let g = relaxed_variant(&g).unwrap_or(g);
        let page = build_page(&g, &arrange_conveniently(&g)).unwrap();
        let standard = standard_factorization(&page);
        let ids = page.hole_ids();
        let target = profile(&standard, &ids).unwrap();
        for member in lantern_orbit(&standard, 50).members {
            prop_assert_eq!(&profile(&member, &ids).unwrap(), &target);
            for m in lantern_moves(&member) {
                prop_assert_eq!(&profile(&m.result, &ids).unwrap(), &target);
            }
        }
    }
}

#[test]
fn lantern_image_is_not_laminar() {
    for text in ["vertex 1 -4\n", "vertex 1 -5\nvertex 2 -4\nedge 1 2\n"] {
        let g = parse_graph(text).unwrap();
        let page = build_page(&g, &arrange_conveniently(&g)).unwrap();
        let image = lantern_replace_last(&page, &standard_factorization(&page)).unwrap();
        assert!(!is_laminar(&image));
    }
}
