//! A platform adds edges to a world graph of buyers and sellers and collects the
//! price of every sale made over one of its own edges. The market clears at the
//! maximum Walrasian prices of the combined graph; among the welfare-maximizing
//! matchings the platform picks one with the most price mass on its edges.

pub mod hall;
pub mod homogeneous;
pub mod instances;
pub mod oracle;
pub mod shgb;
pub mod swsh;

use marketgraph_core::prices::max_prices_table;
use marketgraph_core::welfare::best_matching_lex;
use marketgraph_core::{BipartiteMarket, EdgeSet, Error, Matching, Rat};
use num_traits::Zero;

pub use hall::{max_diff_hall_violator, vertex_hall_violator, BipartiteGraph, SurplusSet};
pub use homogeneous::{homogeneous_extract, single_pair_max_revenue, PairPrice};
pub use shgb::{shgb_optimal, ShgbPlan};
pub use swsh::{seller_subgraphs, swsh_optimal, SellerSubgraph, SwshPlan};

/// Market outcome once the platform has added its edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlatformOutcome {
    pub revenue: Rat,
    pub welfare: Rat,
    pub matching: Matching,
    pub prices: Vec<Rat>,
    /// platform edges that carry a sale
    pub transacting: EdgeSet,
}

/// Rejects platform edges that are out of range or duplicate a world edge.
pub fn check_platform_edges(world: &BipartiteMarket, ep: &EdgeSet) -> Result<(), Error> {
    world.check_edges(ep)?;
    match ep.iter().find(|e| world.world_edges().contains(e)) {
        Some((i, j)) => Err(Error::Input(format!("platform edge ({i},{j}) is already a world edge"))),
        None => Ok(()),
    }
}

/// Clears the platform graph G_w ∪ E_p and sums prices over platform edges
/// that transact.
pub fn platform_revenue(world: &BipartiteMarket, ep: &EdgeSet) -> Result<PlatformOutcome, Error> {
    check_platform_edges(world, ep)?;
    let m = world.sellers();
    let mut g = world.world_edges().clone();
    g.extend(ep.iter().copied());
    let t = world.table(&g);
    let prices = max_prices_table(&t, m);
    // secondary weight: the seller's price on platform edges, 0 on world edges
    let lex: Vec<Vec<Option<(Rat, Rat)>>> = t
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, v)| v.map(|v| (v, if ep.contains(&(i, j)) { prices[j] } else { Rat::zero() })))
                .collect()
        })
        .collect();
    let a = best_matching_lex(&lex, m);
    let matching = Matching::from_mates(&a.mate);
    let transacting = matching.pairs.iter().filter(|e| ep.contains(e)).copied().collect();
    Ok(PlatformOutcome { revenue: a.weight.1, welfare: a.weight.0, matching, prices, transacting })
}

/// Result of the greedy edge-pruning conversion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyConversion {
    pub edges: EdgeSet,
    pub revenue: Rat,
    /// W(G_w ∪ E_p) − W(G_w) for the input edge set
    pub delta_welfare: Rat,
}

/// Repeatedly drops the platform edge earning the least (0 when it does not
/// transact; ties go to the smallest pair) and keeps the best edge set seen.
/// The result earns at least ΔW / H_k for k input edges.
pub fn greedy_welfare_to_revenue(world: &BipartiteMarket, ep: &EdgeSet) -> Result<GreedyConversion, Error> {
    let base = platform_revenue(world, &EdgeSet::new())?.welfare;
    let mut cur = ep.clone();
    let mut out = platform_revenue(world, &cur)?;
    let delta_welfare = out.welfare - base;
    let mut best = (cur.clone(), out.revenue);
    while cur.len() > 1 {
        let earn = |e: &(usize, usize)| if out.transacting.contains(e) { out.prices[e.1] } else { Rat::zero() };
        let worst = *cur.iter().min_by(|a, b| earn(a).cmp(&earn(b)).then(a.cmp(b))).expect("non-empty");
        cur.remove(&worst);
        out = platform_revenue(world, &cur)?;
        if out.revenue > best.1 {
            best = (cur.clone(), out.revenue);
        }
    }
    Ok(GreedyConversion { edges: best.0, revenue: best.1, delta_welfare })
}

/// Per-buyer values when every row of the value matrix is constant.
pub(crate) fn row_values(world: &BipartiteMarket) -> Result<Vec<Rat>, Error> {
    let values = world.values();
    match values.iter().position(|r| r.iter().any(|v| *v != r[0])) {
        Some(i) => Err(Error::Domain(format!("requires homogeneous goods; buyer {i} values sellers differently"))),
        None => Ok((0..world.buyers()).map(|i| world.buyer_value(i)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use marketgraph_core::{int, rat, GoodsClass};

    #[test]
    fn empty_platform_earns_nothing() {
        let mk = instances::chain(4);
        let out = platform_revenue(&mk, &EdgeSet::new()).unwrap();
        assert_eq!(out.revenue, int(0));
        assert!(out.transacting.is_empty());
    }

    #[test]
    fn overlap_with_world_is_rejected() {
        let mk = instances::monopolization(rat(1, 100));
        assert!(matches!(platform_revenue(&mk, &[(0, 0)].into()), Err(Error::Input(_))));
    }

    #[test]
    fn ties_favor_platform_edges() {
        // one seller, two equal buyers: the world buyer or the platform buyer
        let mk = BipartiteMarket::homogeneous(&[int(2), int(2)], 1, [(0, 0)]).unwrap();
        let out = platform_revenue(&mk, &[(1, 0)].into()).unwrap();
        assert_eq!(out.transacting, [(1, 0)].into());
        assert_eq!(out.revenue, int(2));
    }

    #[test]
    fn chain_all_edges_versus_diagonal() {
        let mk = instances::chain(5);
        assert_eq!(platform_revenue(&mk, &instances::chain_valued_pairs(5)).unwrap().revenue, int(5));
        assert_eq!(platform_revenue(&mk, &instances::chain_diagonal(5)).unwrap().revenue, int(15));
    }

    #[test]
    fn prm_market_welfare_edge() {
        let mk = instances::prm2(rat(1, 100));
        let out = platform_revenue(&mk, &[(0, 1)].into()).unwrap();
        assert_eq!(out.welfare, int(2));
        assert_eq!(out.revenue, int(1));
        let out = platform_revenue(&mk, &[(0, 0), (1, 1)].into()).unwrap();
        assert_eq!(out.revenue, rat(101, 100));
        assert_eq!(out.welfare, rat(101, 100));
    }

    #[test]
    fn greedy_on_single_edge_keeps_it() {
        let mk = BipartiteMarket::new(vec![vec![int(3), int(1)]], 2, [(0, 1)], GoodsClass::General).unwrap();
        let g = greedy_welfare_to_revenue(&mk, &[(0, 0)].into()).unwrap();
        assert_eq!(g.delta_welfare, int(2));
        assert!(g.revenue >= g.delta_welfare);
    }

    #[test]
    fn greedy_conversion_on_tight_market() {
        for k in 2..=4 {
            let mk = instances::conv_tight(k);
            let g = greedy_welfare_to_revenue(&mk, &instances::conv_tight_edges(k)).unwrap();
            assert_eq!(g.delta_welfare, marketgraph_core::rational::harmonic(k));
            assert_eq!(g.revenue, int(1));
        }
    }
}
