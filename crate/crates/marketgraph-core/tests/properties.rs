use std::collections::BTreeSet;

use marketgraph_core::{
    int, market_welfare, max_walrasian_prices, max_weight_matching, min_walrasian_prices, rat, verify_competitive_equilibrium,
    BipartiteMarket, EdgeSet, GoodsClass, Rat,
};
use proptest::prelude::*;

/// Values in {0, 1/2, .., 3}, each pair an edge with probability 2/3.
fn market_and_edges() -> impl Strategy<Value = (BipartiteMarket, EdgeSet)> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(n, m)| {
        (prop::collection::vec(0i128..=6, n * m), prop::collection::vec(0u8..3, n * m)).prop_map(move |(vals, mask)| {
            let values = (0..n).map(|i| (0..m).map(|j| rat(vals[i * m + j], 2)).collect()).collect();
            let mk = BipartiteMarket::new(values, m, Vec::<(usize, usize)>::new(), GoodsClass::General).unwrap();
            let edges = (0..n * m).filter(|k| mask[*k] != 0).map(|k| (k / m, k % m)).collect();
            (mk, edges)
        })
    })
}

/// Best matching weight by trying every injective assignment of buyers.
fn brute_welfare(mk: &BipartiteMarket, edges: &EdgeSet) -> Rat {
    fn go(i: usize, used: &mut BTreeSet<usize>, mk: &BipartiteMarket, edges: &EdgeSet) -> Rat {
        if i == mk.buyers() {
            return int(0);
        }
        let mut best = go(i + 1, used, mk, edges);
        for j in 0..mk.sellers() {
            if edges.contains(&(i, j)) && used.insert(j) {
                best = best.max(mk.value(i, j) + go(i + 1, used, mk, edges));
                used.remove(&j);
            }
        }
        best
    }
    go(0, &mut BTreeSet::new(), mk, edges)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn welfare_matches_exhaustive_search((mk, edges) in market_and_edges()) {
        let (matching, w) = max_weight_matching(&mk, &edges).unwrap();
        prop_assert_eq!(w, brute_welfare(&mk, &edges));
        prop_assert_eq!(matching.weight(&mk), w);
        prop_assert_eq!(market_welfare(&mk, &edges), w);
    }

    #[test]
    fn extreme_prices_clear_the_market((mk, edges) in market_and_edges()) {
        let (matching, _) = max_weight_matching(&mk, &edges).unwrap();
        let hi = max_walrasian_prices(&mk, &edges);
        let lo = min_walrasian_prices(&mk, &edges);
        prop_assert!(verify_competitive_equilibrium(&mk, &edges, &matching, &hi).is_empty());
        prop_assert!(verify_competitive_equilibrium(&mk, &edges, &matching, &lo).is_empty());
        prop_assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h && *l >= int(0)));
    }

    #[test]
    fn max_price_is_marginal_contribution((mk, edges) in market_and_edges()) {
        let hi = max_walrasian_prices(&mk, &edges);
        let w = brute_welfare(&mk, &edges);
        for (j, p) in hi.iter().enumerate() {
            let without: EdgeSet = edges.iter().copied().filter(|e| e.1 != j).collect();
            prop_assert_eq!(*p, w - brute_welfare(&mk, &without));
        }
    }
}
