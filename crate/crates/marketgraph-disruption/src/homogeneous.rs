//! Homogeneous goods (every buyer values every seller at its own v_i): lossless
//! extraction of the welfare the platform adds, and the best price the platform
//! can secure on one chosen pair.

use std::collections::BTreeSet;

use marketgraph_core::welfare::{welfare, without_seller};
use marketgraph_core::{max_weight_matching, BipartiteMarket, EdgeSet, Error, Rat};
use num_traits::Zero;

use crate::hall::{vertex_hall_violator, BipartiteGraph, SurplusSet};
use crate::{platform_revenue, row_values};

/// Buyer order used for "the top min(n, m) buyers": value descending, then
/// buyers flagged in `prefer`, then index.
fn ranked(vals: &[Rat], prefer: &[bool]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[b].cmp(&vals[a]).then(prefer[b].cmp(&prefer[a])).then(a.cmp(&b)));
    order
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub edges: EdgeSet,
    pub revenue: Rat,
    /// W* − W(G_w)
    pub welfare_gap: Rat,
}

/// Links every buyer that the optimal matching serves but the world matching
/// does not to a seller freed from a displaced buyer, or to an unsold seller.
/// Each such buyer then pays its full value.
pub fn homogeneous_extract(world: &BipartiteMarket) -> Result<Extraction, Error> {
    let vals = row_values(world)?;
    let (n, m) = (world.buyers(), world.sellers());
    let (mw, w_world) = max_weight_matching(world, world.world_edges())?;
    let mut matched = vec![false; n];
    let mut sold = vec![false; m];
    for &(i, j) in &mw.pairs {
        matched[i] = true;
        sold[j] = true;
    }
    let top: BTreeSet<usize> = ranked(&vals, &matched).into_iter().take(n.min(m)).collect();
    let w_star: Rat = top.iter().map(|&i| vals[i]).sum();
    let fresh: Vec<usize> = top.iter().copied().filter(|&i| !matched[i] && !vals[i].is_zero()).collect();
    let freed = mw.pairs.iter().filter(|(i, _)| !top.contains(i)).map(|&(_, j)| j);
    let slots: Vec<usize> = freed.chain((0..m).filter(|&j| !sold[j])).collect();
    let edges: EdgeSet = fresh
        .iter()
        .zip(&slots)
        .map(|(&i, &j)| (i, j))
        .filter(|e| !world.world_edges().contains(e))
        .collect();
    let revenue = platform_revenue(world, &edges)?.revenue;
    Ok(Extraction { edges, revenue, welfare_gap: w_star - w_world })
}

/// Best price for one platform pair and the edges that realize it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairPrice {
    pub edges: EdgeSet,
    pub price: Rat,
    /// Hall violator that pins the price; absent when the price is 0
    pub violator: Option<SurplusSet>,
}

/// Largest price at which `seller` can sell to `buyer` over a platform edge.
/// Scans candidate prices from the top: at each one, keeps only the top
/// min(n, m) buyers worth at least that much and asks for a world-graph Hall
/// violator containing `buyer` once `seller` is removed.
pub fn single_pair_max_revenue(world: &BipartiteMarket, buyer: usize, seller: usize) -> Result<PairPrice, Error> {
    let vals = row_values(world)?;
    let (n, m) = (world.buyers(), world.sellers());
    if buyer >= n || seller >= m {
        return Err(Error::Input(format!("pair ({buyer},{seller}) out of range")));
    }
    if world.world_edges().contains(&(buyer, seller)) {
        return Err(Error::Domain(format!("pair ({buyer},{seller}) is already a world edge")));
    }
    // ties at the cut are resolved in the buyer's favor
    let prefer: Vec<bool> = (0..n).map(|i| i == buyer).collect();
    let top: Vec<usize> = ranked(&vals, &prefer).into_iter().take(n.min(m)).collect();
    if !top.contains(&buyer) {
        return Err(Error::Domain(format!("buyer {buyer} is not among the top {} buyers", n.min(m))));
    }
    let graph = BipartiteGraph::world(world);
    let mut thresholds: Vec<Rat> = top.iter().map(|&i| vals[i]).filter(|v| *v <= vals[buyer]).collect();
    thresholds.sort_by(|a, b| b.cmp(a));
    thresholds.dedup();
    let others: BTreeSet<usize> = (0..m).filter(|&j| j != seller).collect();
    for t in thresholds {
        if t.is_zero() {
            break;
        }
        let eligible: BTreeSet<usize> = top.iter().copied().filter(|&i| vals[i] >= t).collect();
        let (sub, bmap, _) = graph.induced(&eligible, &others);
        let local = bmap.binary_search(&buyer).expect("buyer is eligible");
        let Some(found) = vertex_hall_violator(&sub, local)? else { continue };
        let members: BTreeSet<usize> = found.buyers.iter().map(|&b| bmap[b]).collect();
        let edges = pair_construction(world, &graph, &vals, &top, &members, buyer, seller);
        let price = transacting_price(world, &edges, buyer, seller)?;
        let violator = SurplusSet::of(&graph, members);
        return Ok(PairPrice { edges, price, violator: Some(violator) });
    }
    Ok(PairPrice { edges: [(buyer, seller)].into(), price: Rat::zero(), violator: None })
}

/// Platform edges for a violator `members` ∋ buyer: the pair itself, the highest
/// other members onto the violator's neighborhood, and every other top buyer
/// onto the remaining sellers.
fn pair_construction(
    world: &BipartiteMarket,
    graph: &BipartiteGraph,
    vals: &[Rat],
    top: &[usize],
    members: &BTreeSet<usize>,
    buyer: usize,
    seller: usize,
) -> EdgeSet {
    let hood: Vec<usize> = graph.neighborhood(members).into_iter().filter(|&j| j != seller).collect();
    let mut rest: Vec<usize> = members.iter().copied().filter(|&i| i != buyer).collect();
    rest.sort_by(|&a, &b| vals[b].cmp(&vals[a]).then(a.cmp(&b)));
    let mut pairs = vec![(buyer, seller)];
    pairs.extend(rest.iter().zip(&hood).map(|(&i, &j)| (i, j)));
    let used_buyers: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
    let used_sellers: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
    let spare_buyers = top.iter().copied().filter(|i| !used_buyers.contains(i));
    let spare_sellers: Vec<usize> = (0..world.sellers()).filter(|j| !used_sellers.contains(j)).collect();
    pairs.extend(spare_buyers.zip(spare_sellers));
    pairs.into_iter().filter(|e| !world.world_edges().contains(e)).collect()
}

/// p̄ of `seller` in G_w ∪ edges, provided (buyer, seller) lies in some
/// maximum-weight matching; 0 otherwise.
fn transacting_price(world: &BipartiteMarket, edges: &EdgeSet, buyer: usize, seller: usize) -> Result<Rat, Error> {
    let mut g = world.world_edges().clone();
    g.extend(edges.iter().copied());
    let t = world.table(&g);
    let m = world.sellers();
    let w = welfare(&t, m);
    let mut rest = without_seller(&t, seller);
    rest[buyer].iter_mut().for_each(|x| *x = None);
    if world.value(buyer, seller) + welfare(&rest, m) != w {
        return Ok(Rat::zero());
    }
    Ok(w - welfare(&without_seller(&t, seller), m))
}
