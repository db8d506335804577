//! Identity goods (every pair worth the same c) where each buyer has at most two
//! world sellers and no two sellers share more than one buyer. The platform's
//! revenue is c times the best score min(|B_v|, m) − |N(B_v)| + k_v over buyer
//! sets B_v with no more world neighbors than members.

use std::collections::{BTreeMap, BTreeSet};

use marketgraph_core::{BipartiteMarket, EdgeSet, Error, Rat};
use num_traits::Zero;

use crate::hall::{BipartiteGraph, SurplusSet};
use crate::platform_revenue;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShgbPlan {
    pub edges: EdgeSet,
    pub revenue: Rat,
    /// buyer set whose competition the platform exploits
    pub violator: SurplusSet,
    /// c · (min(|B_v|, m) − |N(B_v)| + k_v)
    pub predicted: Rat,
}

fn common_value(world: &BipartiteMarket) -> Result<Option<Rat>, Error> {
    let mut c = None;
    for (i, row) in world.values().iter().enumerate() {
        for v in row {
            if v.is_zero() || c.is_some_and(|c| c != *v) {
                return Err(Error::Domain(format!("requires one positive value on every pair; buyer {i} differs")));
            }
            c = Some(*v);
        }
    }
    Ok(c)
}

fn check_shape(graph: &BipartiteGraph) -> Result<(), Error> {
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    for b in 0..graph.buyers() {
        let ns = graph.neighbors(b);
        if ns.len() > 2 {
            return Err(Error::Domain(format!("buyer {b} has {} world edges, at most 2 allowed", ns.len())));
        }
        if ns.len() == 2 && !seen.insert((ns[0], ns[1])) {
            return Err(Error::Domain(format!("sellers {} and {} share more than one buyer", ns[0], ns[1])));
        }
    }
    Ok(())
}

/// Largest buyer set with non-positive surplus. Buyers that can be peeled (at
/// most one remaining seller) all belong to it and bank one unit of slack each
/// beyond the sellers they use up; the degree-two buyers left over are edges of
/// a graph on sellers, whose cyclic components come for free and whose trees
/// cost one unit of slack each.
fn max_cardinality(graph: &BipartiteGraph) -> BTreeSet<usize> {
    let n = graph.buyers();
    let mut gone_sellers: BTreeSet<usize> = BTreeSet::new();
    let mut peeled: BTreeSet<usize> = BTreeSet::new();
    loop {
        let next: Vec<usize> = (0..n)
            .filter(|b| !peeled.contains(b))
            .filter(|&b| graph.neighbors(b).iter().filter(|s| !gone_sellers.contains(s)).count() <= 1)
            .collect();
        if next.is_empty() {
            break;
        }
        for b in next {
            peeled.insert(b);
            gone_sellers.extend(graph.neighbors(b).iter().copied());
        }
    }
    let mut slack = peeled.len() as isize - gone_sellers.len() as isize;

    // components of the remaining buyers, seen as edges between their sellers
    let rest: Vec<usize> = (0..n).filter(|b| !peeled.contains(b)).collect();
    let mut root: BTreeMap<usize, usize> = BTreeMap::new();
    fn find(root: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let p = *root.entry(x).or_insert(x);
        if p == x {
            return x;
        }
        let r = find(root, p);
        root.insert(x, r);
        r
    }
    for &b in &rest {
        let ns = graph.neighbors(b);
        let (x, y) = (find(&mut root, ns[0]), find(&mut root, ns[1]));
        if x != y {
            root.insert(x.max(y), x.min(y));
        }
    }
    let mut comps: BTreeMap<usize, (BTreeSet<usize>, BTreeSet<usize>)> = BTreeMap::new();
    for &b in &rest {
        let r = find(&mut root, graph.neighbors(b)[0]);
        let c = comps.entry(r).or_default();
        c.0.insert(b);
        c.1.extend(graph.neighbors(b).iter().copied());
    }
    let mut chosen = peeled;
    let mut trees: Vec<BTreeSet<usize>> = Vec::new();
    for (buyers, sellers) in comps.into_values() {
        if buyers.len() >= sellers.len() {
            slack += buyers.len() as isize - sellers.len() as isize;
            chosen.extend(buyers);
        } else {
            trees.push(buyers);
        }
    }
    trees.sort_by(|a, b| b.len().cmp(&a.len()).then(a.first().cmp(&b.first())));
    for t in trees.into_iter().take(slack.max(0) as usize) {
        chosen.extend(t);
    }
    chosen
}

/// Buyer sets worth scoring.
fn candidates(graph: &BipartiteGraph) -> Vec<BTreeSet<usize>> {
    let n = graph.buyers();
    let mut out = vec![BTreeSet::new(), max_cardinality(graph)];
    for a in 0..n {
        out.push([a].into());
        for b in a + 1..n {
            out.push([a, b].into());
        }
    }
    let low: BTreeSet<usize> = (0..n).filter(|&b| graph.neighbors(b).len() <= 1).collect();
    let two: Vec<usize> = (0..n).filter(|&b| graph.neighbors(b).len() == 2).collect();
    out.push(low.clone());
    for (x, &a) in two.iter().enumerate() {
        out.push(low.iter().copied().chain([a]).collect());
        for &b in &two[x + 1..] {
            out.push(low.iter().copied().chain([a, b]).collect());
        }
    }
    out
}

fn score(s: &SurplusSet, m: usize) -> Option<usize> {
    (s.surplus() <= 0).then(|| s.buyers.len().min(m) - s.neighborhood.len() + s.k_v)
}

/// Platform edges that let every member of `v` compete: the complement
/// matching into N(B_v), world edges covering the rest of N(B_v), and platform
/// edges from further members to sellers outside it.
fn construct(graph: &BipartiteGraph, v: &SurplusSet) -> EdgeSet {
    let m = graph.sellers();
    let hood = &v.neighborhood;
    let complement = v.buyers.iter().flat_map(|&b| hood.iter().filter(move |&&s| !graph.has_edge(b, s)).map(move |&s| (b, s)));
    let cg = BipartiteGraph::new(graph.buyers(), m, complement).expect("in range");
    let (sub, bmap, smap) = cg.induced(&v.buyers, hood);
    let mut edges = EdgeSet::new();
    for (b, s) in sub.max_matching().into_iter().enumerate() {
        if let Some(s) = s {
            edges.insert((bmap[b], smap[s]));
        }
    }
    let used_b: BTreeSet<usize> = edges.iter().map(|e| e.0).collect();
    let used_s: BTreeSet<usize> = edges.iter().map(|e| e.1).collect();
    let mut spare = v.buyers.iter().copied().filter(|b| !used_b.contains(b));
    // leftover members on leftover neighbors are world-adjacent, or the
    // complement matching would not be maximum
    for _ in hood.iter().filter(|s| !used_s.contains(s)) {
        spare.next();
    }
    let extra = v.buyers.len().min(m) - hood.len();
    let linked: BTreeSet<usize> = (0..graph.buyers()).flat_map(|b| graph.neighbors(b).iter().copied()).collect();
    let mut outside: Vec<usize> = (0..m).filter(|s| !hood.contains(s)).collect();
    outside.sort_by_key(|s| (linked.contains(s), *s));
    edges.extend(spare.zip(outside).take(extra));
    edges
}

/// Revenue-optimal platform edges for identity goods under the degree and
/// overlap limits above.
pub fn shgb_optimal(world: &BipartiteMarket) -> Result<ShgbPlan, Error> {
    let graph = BipartiteGraph::world(world);
    check_shape(&graph)?;
    let Some(c) = common_value(world)? else {
        let violator = SurplusSet::of(&graph, BTreeSet::new());
        return Ok(ShgbPlan { edges: EdgeSet::new(), revenue: Rat::zero(), violator, predicted: Rat::zero() });
    };
    let m = world.sellers();
    let mut best: Option<(usize, SurplusSet)> = None;
    for set in candidates(&graph) {
        let s = SurplusSet::of(&graph, set);
        let Some(x) = score(&s, m) else { continue };
        let better = match &best {
            None => true,
            Some((bx, bs)) => {
                (x, s.buyers.len()) > (*bx, bs.buyers.len()) || ((x, s.buyers.len()) == (*bx, bs.buyers.len()) && s.buyers < bs.buyers)
            }
        };
        if better {
            best = Some((x, s));
        }
    }
    let (x, violator) = best.expect("the empty set always qualifies");
    let edges = construct(&graph, &violator);
    let revenue = platform_revenue(world, &edges)?.revenue;
    let predicted = c * Rat::from_integer(x as i128);
    if revenue < predicted {
        return Err(Error::Invariant(format!("edges earn {revenue}, the surplus bound promised {predicted}")));
    }
    Ok(ShgbPlan { edges, revenue, violator, predicted })
}
