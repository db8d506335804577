mod common;

use std::collections::BTreeSet;

use common::*;
use marketgraph_core::rational::harmonic;
use marketgraph_core::{market_welfare, max_weight_matching, BipartiteMarket, EdgeSet, Rat};
use marketgraph_disruption::oracle::*;
use marketgraph_disruption::*;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn w_star(mk: &BipartiteMarket) -> Rat {
    market_welfare(mk, &mk.all_pairs())
}

fn w_world(mk: &BipartiteMarket) -> Rat {
    market_welfare(mk, mk.world_edges())
}

fn subsets_of(n: usize) -> impl Iterator<Item = BTreeSet<usize>> {
    (0u32..1 << n).map(move |mask| (0..n).filter(|k| mask >> k & 1 == 1).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matching_search_matches_all_subsets(mk in general_market(4, 4, 12, 0, 4)) {
        let full = brute_force_subsets(&mk, 20).unwrap();
        let pruned = brute_force_matchings(&mk).unwrap();
        prop_assert_eq!(full.revenue, pruned.revenue);
    }

    #[test]
    fn some_optimum_saturates(mk in general_market(4, 4, 12, 1, 4)) {
        let full = brute_force_subsets(&mk, 20).unwrap();
        let k = mk.buyers().min(mk.sellers());
        let saturates = full.optima.iter().any(|o| platform_revenue(&mk, &o.edges).unwrap().matching.len() == k);
        prop_assert!(saturates);
        prop_assert_eq!(brute_force_saturating(&mk).unwrap().revenue, full.revenue);
    }

    #[test]
    fn homogeneous_saturating_search_is_exact(mk in homogeneous_market(4, 4, 1, 6)) {
        prop_assume!(mk.buyers() * mk.sellers() <= 12);
        let full = brute_force_subsets(&mk, 20).unwrap();
        prop_assert_eq!(brute_force_saturating(&mk).unwrap().revenue, full.revenue);
    }

    #[test]
    fn swsh_square_matches_brute_force(mk in swsh_market(1..=8, true, 9)) {
        let plan = swsh_optimal(&mk).unwrap();
        prop_assert_eq!(plan.revenue, brute_force_saturating(&mk).unwrap().revenue);
        prop_assert_eq!(platform_revenue(&mk, &plan.edges).unwrap().revenue, plan.revenue);
    }

    #[test]
    fn swsh_rectangular_matches_brute_force(mk in swsh_market(1..=6, false, 9)) {
        let plan = swsh_optimal(&mk).unwrap();
        prop_assert_eq!(plan.revenue, brute_force_matchings(&mk).unwrap().revenue);
    }

    #[test]
    fn swsh_with_many_ties(mk in swsh_market(1..=6, false, 3)) {
        let plan = swsh_optimal(&mk).unwrap();
        prop_assert_eq!(plan.revenue, brute_force_matchings(&mk).unwrap().revenue);
    }

    #[test]
    fn shgb_matches_brute_force(mk in shgb_market(8, 8)) {
        let plan = shgb_optimal(&mk).unwrap();
        prop_assert_eq!(plan.revenue, brute_force_saturating(&mk).unwrap().revenue);
        prop_assert!(plan.violator.surplus() <= 0);
    }

    #[test]
    fn max_difference_violator(g in graph(8, 8)) {
        let s = max_diff_hall_violator(&g);
        let best = subsets_of(g.buyers())
            .map(|b| b.len() as isize - g.neighborhood(&b).len() as isize)
            .max()
            .unwrap();
        prop_assert_eq!(s.deficiency as isize, best.max(0));
        prop_assert_eq!(s.buyers.len() - s.neighborhood.len(), s.deficiency);
    }

    #[test]
    fn vertex_violator(g in graph(7, 7), b in 0usize..7) {
        prop_assume!(b < g.buyers());
        let exists = subsets_of(g.buyers()).any(|s| s.contains(&b) && s.len() > g.neighborhood(&s).len());
        match vertex_hall_violator(&g, b).unwrap() {
            Some(s) => {
                prop_assert!(exists);
                prop_assert!(s.buyers.contains(&b));
                prop_assert!(s.buyers.len() > s.neighborhood.len());
            }
            None => prop_assert!(!exists),
        }
    }

    #[test]
    fn extraction_recovers_the_welfare_gap(mk in homogeneous_market(7, 7, 0, 9)) {
        let x = homogeneous_extract(&mk).unwrap();
        prop_assert_eq!(x.welfare_gap, w_star(&mk) - w_world(&mk));
        prop_assert!(x.revenue >= x.welfare_gap);
    }

    #[test]
    fn pair_price_is_achievable_and_best(mk in homogeneous_market(4, 4, 1, 6)) {
        let k = mk.buyers().min(mk.sellers());
        let mut best = Rat::zero();
        for b in 0..mk.buyers() {
            for s in 0..mk.sellers() {
                let Ok(p) = single_pair_max_revenue(&mk, b, s) else { continue };
                prop_assert!(p.edges.contains(&(b, s)));
                prop_assert_eq!(p.price, brute_force_pair(&mk, b, s, 20).unwrap());
                best = best.max(p.price);
            }
        }
        let rev = brute_force_matchings(&mk).unwrap().revenue;
        prop_assert!(best * Rat::from_integer(k as i128) >= rev, "best pair {} vs optimum {}", best, rev);
    }

    #[test]
    fn revenue_optima_lose_at_most_harmonic_welfare(mk in general_market(4, 4, 16, 0, 6)) {
        let k = mk.buyers().min(mk.sellers());
        let bound = harmonic(k) + Rat::one();
        for o in brute_force_matchings(&mk).unwrap().optima {
            prop_assert!(w_star(&mk) <= bound * o.welfare, "{} vs {}", w_star(&mk), o.welfare);
        }
    }

    #[test]
    fn homogeneous_revenue_optima_are_efficient(mk in homogeneous_market(5, 5, 0, 9)) {
        let w = w_star(&mk);
        for o in brute_force_matchings(&mk).unwrap().optima {
            prop_assert_eq!(o.welfare, w);
        }
    }

    #[test]
    fn greedy_conversion_bound(mk in general_market(5, 5, 25, 0, 6)) {
        let (opt, _) = max_weight_matching(&mk, &mk.all_pairs()).unwrap();
        let ep: EdgeSet = opt.pairs.iter().copied().filter(|e| !mk.world_edges().contains(e)).collect();
        prop_assume!(!ep.is_empty());
        let g = greedy_welfare_to_revenue(&mk, &ep).unwrap();
        prop_assert!(g.revenue * harmonic(ep.len()) >= g.delta_welfare);
        prop_assert_eq!(platform_revenue(&mk, &g.edges).unwrap().revenue, g.revenue);
    }
}

fn graph(max_n: usize, max_m: usize) -> impl Strategy<Value = BipartiteGraph> {
    (1..=max_n, 1..=max_m).prop_flat_map(|(n, m)| {
        prop::collection::vec(prop::bool::weighted(0.3), n * m).prop_map(move |mask| {
            BipartiteGraph::new(n, m, (0..n * m).filter(|k| mask[*k]).map(|k| (k / m, k % m))).unwrap()
        })
    })
}
