//! Exhaustive searches over platform edge sets. Exponential; used to check the
//! polynomial algorithms on small markets.

use std::collections::BTreeMap;

use marketgraph_core::welfare::welfare;
use marketgraph_core::{BipartiteMarket, EdgeSet, Error, Rat};
use num_traits::Zero;

use crate::{platform_revenue, row_values};

/// Cap on candidate edge sets examined by the matching-based searches.
pub const MAX_CANDIDATES: usize = 5_000_000;

/// An optimal edge set and the welfare of the platform graph it produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum {
    pub edges: EdgeSet,
    pub welfare: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForce {
    pub revenue: Rat,
    /// every revenue-optimal edge set among the candidates
    pub optima: Vec<Optimum>,
    pub examined: usize,
}

struct Tally {
    revenue: Rat,
    optima: BTreeMap<EdgeSet, Rat>,
    examined: usize,
}

impl Tally {
    fn new() -> Self {
        Tally { revenue: Rat::zero(), optima: BTreeMap::new(), examined: 0 }
    }

    fn offer(&mut self, edges: EdgeSet, revenue: Rat, welfare: Rat) {
        if revenue > self.revenue {
            self.revenue = revenue;
            self.optima.clear();
        }
        if revenue == self.revenue {
            self.optima.insert(edges, welfare);
        }
    }

    fn finish(self) -> BruteForce {
        let optima = self.optima.into_iter().map(|(edges, welfare)| Optimum { edges, welfare }).collect();
        BruteForce { revenue: self.revenue, optima, examined: self.examined }
    }
}

/// Maximum-weight matching value of an edge list. Homogeneous markets with at
/// most 64 sellers use the greedy over the transversal matroid (buyers by value,
/// augmenting paths over seller bitmasks); everything else goes to the
/// assignment solver.
pub(crate) enum Evaluator<'a> {
    General(&'a BipartiteMarket),
    Homogeneous { vals: Vec<Rat>, order: Vec<usize>, m: usize },
}

const FREE: usize = usize::MAX;

impl<'a> Evaluator<'a> {
    pub(crate) fn new(world: &'a BipartiteMarket) -> Self {
        match row_values(world) {
            Ok(vals) if world.sellers() <= 64 => {
                let mut order: Vec<usize> = (0..vals.len()).filter(|&i| !vals[i].is_zero()).collect();
                order.sort_by(|&a, &b| vals[b].cmp(&vals[a]).then(a.cmp(&b)));
                Evaluator::Homogeneous { vals, order, m: world.sellers() }
            }
            _ => Evaluator::General(world),
        }
    }

    pub(crate) fn welfare<'e>(&self, edges: impl IntoIterator<Item = &'e (usize, usize)>) -> Rat {
        match self {
            Evaluator::General(mk) => {
                let set: EdgeSet = edges.into_iter().copied().collect();
                welfare(&mk.table(&set), mk.sellers())
            }
            Evaluator::Homogeneous { vals, order, m } => {
                let mut masks = vec![0u64; vals.len()];
                for &(i, j) in edges {
                    masks[i] |= 1 << j;
                }
                let mut owner = vec![FREE; *m];
                let mut total = Rat::zero();
                for &b in order {
                    let mut seen = 0u64;
                    if augment(b, &masks, &mut owner, &mut seen) {
                        total += vals[b];
                    }
                }
                total
            }
        }
    }

    fn welfare_without(&self, edges: &[(usize, usize)], buyer: Option<usize>, seller: usize) -> Rat {
        self.welfare(edges.iter().filter(|&&(i, j)| j != seller && Some(i) != buyer))
    }
}

fn augment(b: usize, masks: &[u64], owner: &mut [usize], seen: &mut u64) -> bool {
    let mut cand = masks[b];
    while cand != 0 {
        let s = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        if *seen & (1 << s) != 0 {
            continue;
        }
        *seen |= 1 << s;
        if owner[s] == FREE || augment(owner[s], masks, owner, seen) {
            owner[s] = b;
            return true;
        }
    }
    false
}

/// Positive-valued pairs that are not world edges.
fn candidate_pairs(world: &BipartiteMarket) -> Vec<(usize, usize)> {
    world
        .all_pairs()
        .into_iter()
        .filter(|&(i, j)| !world.world_edges().contains(&(i, j)) && !world.value(i, j).is_zero())
        .collect()
}

/// Every subset of the positive non-world pairs, scored by [`platform_revenue`].
pub fn brute_force_subsets(world: &BipartiteMarket, max_pairs: usize) -> Result<BruteForce, Error> {
    let pairs = candidate_pairs(world);
    if pairs.len() > max_pairs || pairs.len() >= 32 {
        return Err(Error::Limit(format!("{} candidate pairs exceed the limit of {max_pairs}", pairs.len())));
    }
    let mut tally = Tally::new();
    for mask in 0u32..1 << pairs.len() {
        let ep: EdgeSet = (0..pairs.len()).filter(|k| mask >> k & 1 == 1).map(|k| pairs[k]).collect();
        let out = platform_revenue(world, &ep)?;
        tally.examined += 1;
        tally.offer(ep, out.revenue, out.welfare);
    }
    Ok(tally.finish())
}

/// Matchings over `pairs` with at least `min_size` edges.
fn for_each_matching(
    n: usize,
    pairs: &[(usize, usize)],
    min_size: usize,
    mut visit: impl FnMut(&[(usize, usize)]) -> Result<(), Error>,
) -> Result<usize, Error> {
    let mut by_buyer: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j) in pairs {
        by_buyer[i].push(j);
    }
    let mut count = 0usize;
    let mut used = std::collections::BTreeSet::new();
    let mut cur = Vec::new();
    type Visit<'v> = dyn FnMut(&[(usize, usize)]) -> Result<(), Error> + 'v;
    fn rec(
        i: usize,
        min_size: usize,
        by_buyer: &[Vec<usize>],
        used: &mut std::collections::BTreeSet<usize>,
        cur: &mut Vec<(usize, usize)>,
        count: &mut usize,
        visit: &mut Visit,
    ) -> Result<(), Error> {
        if cur.len() + (by_buyer.len() - i) < min_size {
            return Ok(());
        }
        if i == by_buyer.len() {
            *count += 1;
            if *count > MAX_CANDIDATES {
                return Err(Error::Limit(format!("more than {MAX_CANDIDATES} candidate matchings")));
            }
            return visit(cur);
        }
        rec(i + 1, min_size, by_buyer, used, cur, count, visit)?;
        for &j in &by_buyer[i] {
            if used.insert(j) {
                cur.push((i, j));
                rec(i + 1, min_size, by_buyer, used, cur, count, visit)?;
                cur.pop();
                used.remove(&j);
            }
        }
        Ok(())
    }
    rec(0, min_size, &by_buyer, &mut used, &mut cur, &mut count, &mut visit)?;
    Ok(count)
}

/// Platform edge sets that form a matching and can all transact together.
/// Adding at most one edge per agent loses nothing, so this reaches the same
/// optimum as [`brute_force_subsets`] on far more pairs.
pub fn brute_force_matchings(world: &BipartiteMarket) -> Result<BruteForce, Error> {
    let eval = Evaluator::new(world);
    let base: Vec<(usize, usize)> = world.world_edges().iter().copied().collect();
    let mut tally = Tally::new();
    tally.examined = for_each_matching(world.buyers(), &candidate_pairs(world), 0, |ms| {
        let value: Rat = ms.iter().map(|&(i, j)| world.value(i, j)).sum();
        let rest = base.iter().filter(|&&(i, j)| ms.iter().all(|&(a, b)| a != i && b != j));
        let mut g = base.clone();
        g.extend_from_slice(ms);
        let w = eval.welfare(&g);
        if w != value + eval.welfare(rest) {
            return Ok(());
        }
        let revenue: Rat = ms.iter().map(|&(_, j)| w - eval.welfare_without(&g, None, j)).sum();
        tally.offer(ms.iter().copied().collect(), revenue, w);
        Ok(())
    })?;
    Ok(tally.finish())
}

/// Maximum matchings x of the positive-valued pairs (world pairs included),
/// taking E_p = x minus the world edges whenever x is optimal in G_w ∪ E_p.
/// Some revenue optimum saturates one side when every value is positive, so
/// this search is exact there.
pub fn brute_force_saturating(world: &BipartiteMarket) -> Result<BruteForce, Error> {
    let eval = Evaluator::new(world);
    let positive: Vec<(usize, usize)> =
        world.all_pairs().into_iter().filter(|&(i, j)| !world.value(i, j).is_zero()).collect();
    let size = {
        let g = crate::BipartiteGraph::new(world.buyers(), world.sellers(), positive.iter().copied())?;
        g.max_matching().iter().flatten().count()
    };
    let base: Vec<(usize, usize)> = world.world_edges().iter().copied().collect();
    let mut tally = Tally::new();
    let mut seen = std::collections::BTreeSet::new();
    tally.examined = for_each_matching(world.buyers(), &positive, size, |xs| {
        if xs.len() != size {
            return Ok(());
        }
        let ep: Vec<(usize, usize)> = xs.iter().copied().filter(|e| !world.world_edges().contains(e)).collect();
        let key: EdgeSet = ep.iter().copied().collect();
        if !seen.insert(key.clone()) {
            return Ok(());
        }
        let mut g = base.clone();
        g.extend_from_slice(&ep);
        let w = eval.welfare(&g);
        let value: Rat = xs.iter().map(|&(i, j)| world.value(i, j)).sum();
        if w != value {
            return Ok(());
        }
        let revenue: Rat = ep.iter().map(|&(_, j)| w - eval.welfare_without(&g, None, j)).sum();
        tally.offer(key, revenue, w);
        Ok(())
    })?;
    Ok(tally.finish())
}

/// Highest price `seller` can command while selling to `buyer` over a platform
/// edge, over every platform edge set containing that pair.
pub fn brute_force_pair(world: &BipartiteMarket, buyer: usize, seller: usize, max_pairs: usize) -> Result<Rat, Error> {
    if world.world_edges().contains(&(buyer, seller)) {
        return Err(Error::Input(format!("pair ({buyer},{seller}) is already a world edge")));
    }
    world.check_edges(&[(buyer, seller)].into())?;
    let pairs: Vec<(usize, usize)> = candidate_pairs(world).into_iter().filter(|&e| e != (buyer, seller)).collect();
    if pairs.len() > max_pairs || pairs.len() >= 32 {
        return Err(Error::Limit(format!("{} candidate pairs exceed the limit of {max_pairs}", pairs.len())));
    }
    let eval = Evaluator::new(world);
    let base: Vec<(usize, usize)> = world.world_edges().iter().copied().collect();
    let v = world.value(buyer, seller);
    let mut best = Rat::zero();
    for mask in 0u32..1 << pairs.len() {
        let mut g = base.clone();
        g.push((buyer, seller));
        g.extend((0..pairs.len()).filter(|k| mask >> k & 1 == 1).map(|k| pairs[k]));
        let w = eval.welfare(&g);
        if v + eval.welfare_without(&g, Some(buyer), seller) != w {
            continue;
        }
        best = best.max(w - eval.welfare_without(&g, None, seller));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use marketgraph_core::{int, rat};

    #[test]
    fn evaluators_agree() {
        let mk = instances::swsh4();
        let fast = Evaluator::new(&mk);
        assert!(matches!(fast, Evaluator::Homogeneous { .. }));
        let slow = Evaluator::General(&mk);
        let all: Vec<_> = mk.all_pairs().into_iter().collect();
        for mask in 0u32..1 << 10 {
            let es: Vec<_> = (0..10).filter(|k| mask >> k & 1 == 1).map(|k| all[k]).collect();
            assert_eq!(fast.welfare(&es), slow.welfare(&es));
        }
    }

    #[test]
    fn chain_optimum() {
        let mk = instances::chain(4);
        assert_eq!(brute_force_subsets(&mk, 20).unwrap().revenue, int(10));
        assert_eq!(brute_force_matchings(&mk).unwrap().revenue, int(10));
    }

    #[test]
    fn subset_limit() {
        let mk = instances::chain(12);
        assert!(matches!(brute_force_subsets(&mk, 20), Err(Error::Limit(_))));
    }

    #[test]
    fn prm_pair_price() {
        assert_eq!(brute_force_pair(&instances::prm2(rat(1, 100)), 0, 0, 20).unwrap(), int(1));
    }
}
