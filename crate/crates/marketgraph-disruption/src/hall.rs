//! Hall violators: buyer sets with more members than world neighbors.

use std::collections::{BTreeSet, VecDeque};

use marketgraph_core::{BipartiteMarket, Error};

/// Unweighted bipartite graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    sellers: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(buyers: usize, sellers: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); buyers];
        for (i, j) in edges {
            if i >= buyers || j >= sellers {
                return Err(Error::Input(format!("edge ({i},{j}) out of range")));
            }
            adj[i].insert(j);
        }
        Ok(BipartiteGraph { sellers, adj: adj.into_iter().map(|s| s.into_iter().collect()).collect() })
    }

    /// The world graph of a market.
    pub fn world(market: &BipartiteMarket) -> Self {
        Self::new(market.buyers(), market.sellers(), market.world_edges().iter().copied())
            .expect("market edges are in range")
    }

    pub fn buyers(&self) -> usize {
        self.adj.len()
    }

    pub fn sellers(&self) -> usize {
        self.sellers
    }

    pub fn neighbors(&self, buyer: usize) -> &[usize] {
        &self.adj[buyer]
    }

    pub fn has_edge(&self, buyer: usize, seller: usize) -> bool {
        self.adj[buyer].binary_search(&seller).is_ok()
    }

    /// N(B_v): sellers adjacent to some buyer in the set.
    pub fn neighborhood<'a>(&self, buyers: impl IntoIterator<Item = &'a usize>) -> BTreeSet<usize> {
        buyers.into_iter().flat_map(|&b| self.adj[b].iter().copied()).collect()
    }

    /// Subgraph on the given buyers and sellers, reindexed; returns the graph and
    /// the original index of every new buyer and seller.
    pub fn induced(&self, buyers: &BTreeSet<usize>, sellers: &BTreeSet<usize>) -> (Self, Vec<usize>, Vec<usize>) {
        let bmap: Vec<usize> = buyers.iter().copied().collect();
        let smap: Vec<usize> = sellers.iter().copied().collect();
        let adj = bmap
            .iter()
            .map(|&b| self.adj[b].iter().filter_map(|s| smap.binary_search(s).ok()).collect())
            .collect();
        (BipartiteGraph { sellers: smap.len(), adj }, bmap, smap)
    }

    /// Maximum matching by augmenting paths, buyers tried in index order.
    /// Entry `i` is buyer i's seller.
    pub fn max_matching(&self) -> Vec<Option<usize>> {
        let mut owner: Vec<Option<usize>> = vec![None; self.sellers];
        for b in 0..self.buyers() {
            let mut seen = vec![false; self.sellers];
            self.augment(b, &mut seen, &mut owner);
        }
        let mut mate = vec![None; self.buyers()];
        for (s, o) in owner.iter().enumerate() {
            if let Some(b) = o {
                mate[*b] = Some(s);
            }
        }
        mate
    }

    fn augment(&self, b: usize, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &s in &self.adj[b] {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            if owner[s].is_none_or(|o| self.augment(o, seen, owner)) {
                owner[s] = Some(b);
                return true;
            }
        }
        false
    }

    /// Buyers reachable by alternating paths from `starts` under `mate`.
    fn alternating_reach(&self, mate: &[Option<usize>], starts: &[usize]) -> BTreeSet<usize> {
        let mut owner: Vec<Option<usize>> = vec![None; self.sellers];
        for (b, s) in mate.iter().enumerate() {
            if let Some(s) = s {
                owner[*s] = Some(b);
            }
        }
        let mut reached: BTreeSet<usize> = starts.iter().copied().collect();
        let mut queue: VecDeque<usize> = starts.iter().copied().collect();
        while let Some(b) = queue.pop_front() {
            for &s in &self.adj[b] {
                if let Some(o) = owner[s] {
                    if reached.insert(o) {
                        queue.push_back(o);
                    }
                }
            }
        }
        reached
    }
}

/// A buyer set with its neighborhood and the numbers the surplus analysis needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurplusSet {
    pub buyers: BTreeSet<usize>,
    pub neighborhood: BTreeSet<usize>,
    /// maximum matching between the buyers and their neighborhood over non-edges
    pub k_v: usize,
    /// max(|B_v| − |N(B_v)|, 0)
    pub deficiency: usize,
}

impl SurplusSet {
    pub fn of(graph: &BipartiteGraph, buyers: BTreeSet<usize>) -> Self {
        let neighborhood = graph.neighborhood(&buyers);
        let complement = buyers
            .iter()
            .flat_map(|&b| neighborhood.iter().filter(move |&&s| !graph.has_edge(b, s)).map(move |&s| (b, s)));
        let g = BipartiteGraph::new(graph.buyers(), graph.sellers(), complement).expect("in range");
        let (sub, _, _) = g.induced(&buyers, &neighborhood);
        let k_v = sub.max_matching().iter().flatten().count();
        let deficiency = buyers.len().saturating_sub(neighborhood.len());
        SurplusSet { buyers, neighborhood, k_v, deficiency }
    }

    /// |N(B_v)| − |B_v|.
    pub fn surplus(&self) -> isize {
        self.neighborhood.len() as isize - self.buyers.len() as isize
    }
}

/// Buyer set of maximum deficiency: everything reachable by alternating paths
/// from the buyers a maximum matching leaves unmatched. Empty when every buyer
/// can be matched.
pub fn max_diff_hall_violator(graph: &BipartiteGraph) -> SurplusSet {
    let mate = graph.max_matching();
    let unmatched: Vec<usize> = (0..graph.buyers()).filter(|&b| mate[b].is_none()).collect();
    let set = graph.alternating_reach(&mate, &unmatched);
    SurplusSet::of(graph, set)
}

/// A Hall violator containing `buyer`, if one exists. Removes the buyer and its
/// neighbors and looks for a set whose size exceeds its neighborhood by
/// |N(buyer)|; the returned violator is the smallest such reach plus `buyer`.
pub fn vertex_hall_violator(graph: &BipartiteGraph, buyer: usize) -> Result<Option<SurplusSet>, Error> {
    if buyer >= graph.buyers() {
        return Err(Error::Input(format!("buyer {buyer} out of range")));
    }
    let k = graph.neighbors(buyer).len();
    let rest: BTreeSet<usize> = (0..graph.buyers()).filter(|&b| b != buyer).collect();
    let free: BTreeSet<usize> = (0..graph.sellers()).filter(|s| !graph.has_edge(buyer, *s)).collect();
    let (sub, bmap, _) = graph.induced(&rest, &free);
    let mate = sub.max_matching();
    let unmatched: Vec<usize> = (0..sub.buyers()).filter(|&b| mate[b].is_none()).collect();
    if unmatched.len() < k {
        return Ok(None);
    }
    let reach = sub.alternating_reach(&mate, &unmatched[..k]);
    let mut set: BTreeSet<usize> = reach.into_iter().map(|b| bmap[b]).collect();
    set.insert(buyer);
    Ok(Some(SurplusSet::of(graph, set)))
}
