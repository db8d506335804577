//! Homogeneous markets where every buyer has at most one world seller. The
//! world graph splits into seller subgraphs (a seller with its world buyers);
//! an optimal platform links their top buyers in short cycles and at most one
//! chain, and hands every other buyer a seller with no world edges.

use std::collections::{BTreeMap, BTreeSet};

use marketgraph_core::{BipartiteMarket, EdgeSet, Error, Rat};
use num_traits::Zero;

use crate::{platform_revenue, row_values};

/// A seller with its world buyers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SellerSubgraph {
    pub seller: usize,
    pub buyers: BTreeSet<usize>,
    /// v(S): the highest buyer value in the subgraph
    pub top_value: Rat,
    pub second_value: Option<Rat>,
}

/// Subgraphs of every seller with at least one world buyer, sorted by top
/// value (descending) and then seller index.
pub fn seller_subgraphs(world: &BipartiteMarket) -> Result<Vec<SellerSubgraph>, Error> {
    let vals = row_values(world)?;
    let mut by_seller: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(i, j) in world.world_edges() {
        by_seller.entry(j).or_default().insert(i);
    }
    let mut out: Vec<SellerSubgraph> = by_seller
        .into_iter()
        .map(|(seller, buyers)| {
            let mut vs: Vec<Rat> = buyers.iter().map(|&b| vals[b]).collect();
            vs.sort_by(|a, b| b.cmp(a));
            SellerSubgraph { seller, buyers, top_value: vs[0], second_value: vs.get(1).copied() }
        })
        .collect();
    out.sort_by(|a, b| b.top_value.cmp(&a.top_value).then(a.seller.cmp(&b.seller)));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwshPlan {
    pub edges: EdgeSet,
    pub revenue: Rat,
    /// subgraphs of the reduced market in processing order
    pub subgraphs: Vec<SellerSubgraph>,
    /// sellers of each cycle of length 2 or 3
    pub cycles: Vec<Vec<usize>>,
    /// sellers along the chain, from the attachment end to the head
    pub chain: Vec<usize>,
    pub attachment: Option<usize>,
    /// buyer and seller-without-world-edges pairs
    pub zero_chains: Vec<(usize, usize)>,
}

/// Reduced market: n = m, positive values, original indices kept for output.
struct Reduced {
    buyers: Vec<usize>,
    sellers: Vec<usize>,
    vals: Vec<Rat>,
    /// world seller of each reduced buyer
    world: Vec<Option<usize>>,
}

/// Most tie resolutions at the top-m cut tried exactly.
const MAX_TIE_SPLITS: usize = 4096;

/// Candidate sets of kept buyers: the positive buyers, or when they outnumber
/// the sellers, the top m of them. Which buyers of the value straddling the
/// cut to keep changes the subgraph structure. Tied buyers with the same world
/// seller (or with none) are interchangeable, so only how many of each class
/// to keep matters; every such split is tried while there are at most
/// [`MAX_TIE_SPLITS`], past that one split is taken, preferring buyers without
/// a world seller, then buyers that open a subgraph of their own.
fn keep_options(vals: &[Rat], seller_of: &[Option<usize>], m: usize) -> Vec<Vec<usize>> {
    let positive: Vec<usize> = (0..vals.len()).filter(|&i| !vals[i].is_zero()).collect();
    if positive.len() <= m {
        return vec![positive];
    }
    let mut sorted = positive.clone();
    sorted.sort_by(|&a, &b| vals[b].cmp(&vals[a]).then(a.cmp(&b)));
    let cut = vals[sorted[m - 1]];
    let above: Vec<usize> = positive.iter().copied().filter(|&b| vals[b] > cut).collect();
    let mut classes: BTreeMap<Option<usize>, Vec<usize>> = BTreeMap::new();
    for &b in positive.iter().filter(|&&b| vals[b] == cut) {
        classes.entry(seller_of[b]).or_default().push(b);
    }
    let classes: Vec<Vec<usize>> = classes.into_values().collect();
    let need = m - above.len();
    let with = |counts: &[usize]| -> Vec<usize> {
        let mut k = above.clone();
        for (c, &t) in classes.iter().zip(counts) {
            k.extend_from_slice(&c[..t]);
        }
        k.sort_unstable();
        k
    };
    let mut out = Vec::new();
    let complete = splits(&classes, need, &mut Vec::new(), &mut |counts| {
        out.push(with(counts));
        out.len() <= MAX_TIE_SPLITS
    });
    if complete {
        return out;
    }
    // dangling first (the None class sorts first), then one buyer per seller
    let mut counts = vec![0; classes.len()];
    let mut left = need;
    let first = if seller_of[classes[0][0]].is_none() { 1 } else { 0 };
    if first == 1 {
        counts[0] = classes[0].len().min(left);
        left -= counts[0];
    }
    for pass in 0..2 {
        for (c, class) in classes.iter().enumerate().skip(first) {
            let take = if pass == 0 { 1 } else { class.len() - counts[c] }.min(left);
            counts[c] += take;
            left -= take;
        }
    }
    vec![with(&counts)]
}

/// Visits every way to take `left` buyers across the classes; stops early when
/// `f` returns false, and reports whether the walk finished.
fn splits(classes: &[Vec<usize>], left: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    let c = cur.len();
    if c == classes.len() {
        return left > 0 || f(cur);
    }
    let room: usize = classes[c + 1..].iter().map(Vec::len).sum();
    for t in left.saturating_sub(room)..=classes[c].len().min(left) {
        cur.push(t);
        let go = splits(classes, left - t, cur, f);
        cur.pop();
        if !go {
            return false;
        }
    }
    true
}

fn reduce(m: usize, vals: &[Rat], seller_of: &[Option<usize>], buyers: Vec<usize>) -> Reduced {
    let linked: BTreeSet<usize> = buyers.iter().filter_map(|&b| seller_of[b]).collect();
    let mut surplus = m - buyers.len();
    let mut sellers = Vec::new();
    for j in (0..m).rev() {
        if surplus > 0 && !linked.contains(&j) {
            surplus -= 1;
        } else {
            sellers.push(j);
        }
    }
    sellers.reverse();
    let world_r = buyers
        .iter()
        .map(|&b| seller_of[b].map(|s| sellers.binary_search(&s).expect("linked sellers are kept")))
        .collect();
    let vals_r = buyers.iter().map(|&b| vals[b]).collect();
    Reduced { buyers, sellers, vals: vals_r, world: world_r }
}

/// Subgraph layout of the reduced market.
struct Layout {
    /// seller of each subgraph, in processing order
    seller: Vec<usize>,
    top: Vec<usize>,
    /// non-top buyers of each subgraph
    rest: Vec<Vec<usize>>,
    dangling_buyers: Vec<usize>,
    dangling_sellers: Vec<usize>,
}

fn layout(r: &Reduced) -> Layout {
    let n = r.vals.len();
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for b in 0..n {
        if let Some(s) = r.world[b] {
            groups.entry(s).or_default().push(b);
        }
    }
    let mut subs: Vec<(usize, usize, Vec<usize>)> = groups
        .into_iter()
        .map(|(s, bs)| {
            let top = *bs.iter().min_by(|&&a, &&b| r.vals[b].cmp(&r.vals[a]).then(a.cmp(&b))).expect("non-empty");
            (s, top, bs.into_iter().filter(|&b| b != top).collect())
        })
        .collect();
    subs.sort_by(|a, b| r.vals[b.1].cmp(&r.vals[a.1]).then(a.0.cmp(&b.0)));
    let linked: BTreeSet<usize> = subs.iter().map(|s| s.0).collect();
    Layout {
        seller: subs.iter().map(|s| s.0).collect(),
        top: subs.iter().map(|s| s.1).collect(),
        rest: subs.into_iter().map(|s| s.2).collect(),
        dangling_buyers: (0..n).filter(|&b| r.world[b].is_none()).collect(),
        dangling_sellers: (0..r.sellers.len()).filter(|j| !linked.contains(j)).collect(),
    }
}

/// Small homogeneous market assembled from pieces of the layout.
#[derive(Default)]
struct Piece {
    vals: Vec<Rat>,
    sellers: usize,
    world: Vec<(usize, usize)>,
    platform: EdgeSet,
}

impl Piece {
    fn buyer(&mut self, v: Rat) -> usize {
        self.vals.push(v);
        self.vals.len() - 1
    }

    fn seller(&mut self) -> usize {
        self.sellers += 1;
        self.sellers - 1
    }

    /// A subgraph: its seller, top and non-top buyers, each non-top buyer with
    /// its own seller without world edges. Returns (seller, top).
    fn subgraph(&mut self, r: &Reduced, lay: &Layout, g: usize) -> (usize, usize) {
        let s = self.seller();
        let t = self.buyer(r.vals[lay.top[g]]);
        self.world.push((t, s));
        for &b in &lay.rest[g] {
            let x = self.buyer(r.vals[b]);
            self.world.push((x, s));
            let d = self.seller();
            self.platform.insert((x, d));
        }
        (s, t)
    }

    fn revenue(&self) -> Rat {
        let mk = BipartiteMarket::homogeneous(&self.vals, self.sellers, self.world.iter().copied())
            .expect("piece is a valid market");
        platform_revenue(&mk, &self.platform).expect("piece edges are valid").revenue
    }
}

/// Cycle edges over consecutive subgraphs, as (top of, seller of) positions
/// within the window.
fn cycle_links(len: usize) -> &'static [(usize, usize)] {
    match len {
        2 => &[(0, 1), (1, 0)],
        3 => &[(1, 0), (2, 1), (0, 2)],
        _ => &[],
    }
}

fn window_revenue(r: &Reduced, lay: &Layout, a: usize, e: usize) -> Rat {
    let mut p = Piece::default();
    let parts: Vec<(usize, usize)> = (a..=e).map(|g| p.subgraph(r, lay, g)).collect();
    for &(x, y) in cycle_links(e + 1 - a) {
        p.platform.insert((parts[x].1, parts[y].0));
    }
    p.revenue()
}

/// Revenue of the chain over subgraphs k.. fed by an attachment buyer worth
/// `attach`, less `attach` itself.
fn chain_revenue(r: &Reduced, lay: &Layout, k: usize, attach: Rat) -> Rat {
    let mut p = Piece::default();
    let parts: Vec<(usize, usize)> = (k..lay.top.len()).map(|g| p.subgraph(r, lay, g)).collect();
    let att = p.buyer(attach);
    p.platform.insert((att, parts[0].0));
    for w in parts.windows(2) {
        p.platform.insert((w[0].1, w[1].0));
    }
    let head = p.seller();
    p.platform.insert((parts[parts.len() - 1].1, head));
    p.revenue() - attach
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Attach {
    Dangling(usize),
    /// non-top buyer inside the window [a, e]
    Window { buyer: usize, a: usize, e: usize },
}

struct Choice {
    total: Rat,
    windows: Vec<(usize, usize)>,
    chain: Option<(usize, Attach)>,
}

/// Best split of subgraphs x..y into windows of length 1 to 3.
struct Partitions {
    q: Vec<Vec<Rat>>,
    next: Vec<Vec<usize>>,
}

impl Partitions {
    fn new(rev: &BTreeMap<(usize, usize), Rat>, count: usize) -> Self {
        let mut q = vec![vec![Rat::zero(); count + 1]; count + 1];
        let mut next = vec![vec![0; count + 1]; count + 1];
        for y in 0..=count {
            for x in (0..y).rev() {
                let mut best: Option<(Rat, usize)> = None;
                for len in 1..=3.min(y - x) {
                    let v = rev[&(x, x + len - 1)] + q[x + len][y];
                    if best.is_none_or(|(b, _)| v > b) {
                        best = Some((v, len));
                    }
                }
                let (v, len) = best.expect("non-empty range");
                q[x][y] = v;
                next[x][y] = len;
            }
        }
        Partitions { q, next }
    }

    fn windows(&self, mut x: usize, y: usize, out: &mut Vec<(usize, usize)>) {
        while x < y {
            let len = self.next[x][y];
            out.push((x, x + len - 1));
            x += len;
        }
    }
}

/// Revenue-optimal platform edges for a homogeneous market in which every
/// buyer has at most one world edge.
pub fn swsh_optimal(world: &BipartiteMarket) -> Result<SwshPlan, Error> {
    let vals = row_values(world)?;
    let mut seller_of = vec![None; world.buyers()];
    for &(i, j) in world.world_edges() {
        if seller_of[i].replace(j).is_some() {
            return Err(Error::Domain(format!("buyer {i} has more than one world edge")));
        }
    }
    let mut best: Option<SwshPlan> = None;
    for kept in keep_options(&vals, &seller_of, world.sellers()) {
        let plan = solve(world, &reduce(world.sellers(), &vals, &seller_of, kept))?;
        if best.as_ref().is_none_or(|b| plan.revenue > b.revenue) {
            best = Some(plan);
        }
    }
    Ok(best.expect("at least one candidate"))
}

fn solve(world: &BipartiteMarket, r: &Reduced) -> Result<SwshPlan, Error> {
    let lay = layout(r);
    let count = lay.top.len();
    let mut rev = BTreeMap::new();
    for a in 0..count {
        for e in a..count.min(a + 3) {
            rev.insert((a, e), window_revenue(r, &lay, a, e));
        }
    }
    let parts = Partitions::new(&rev, count);
    let base: Rat = lay.dangling_buyers.iter().map(|&b| r.vals[b]).sum();
    let mut chains: BTreeMap<(usize, Rat), Rat> = BTreeMap::new();
    let mut chain_of = |k: usize, attach: Rat| -> Rat {
        *chains.entry((k, attach)).or_insert_with(|| chain_revenue(r, &lay, k, attach))
    };

    let mut best = Choice { total: base + parts.q[0][count], windows: Vec::new(), chain: None };
    for k in 0..count {
        for &b in &lay.dangling_buyers {
            let total = base + parts.q[0][k] + chain_of(k, r.vals[b]);
            if total > best.total {
                best = Choice { total, windows: Vec::new(), chain: Some((k, Attach::Dangling(b))) };
            }
        }
        for a in 0..k {
            for e in a..k.min(a + 3) {
                let floor = (a..=e).map(|g| r.vals[lay.top[g]]).min().expect("non-empty window");
                let outer = parts.q[0][a] + rev[&(a, e)] + parts.q[e + 1][k];
                for &b in (a..=e).flat_map(|g| &lay.rest[g]) {
                    let total = base + outer + chain_of(k, r.vals[b].min(floor));
                    if total > best.total {
                        let chain = Some((k, Attach::Window { buyer: b, a, e }));
                        best = Choice { total, windows: Vec::new(), chain };
                    }
                }
            }
        }
    }
    match best.chain {
        None => parts.windows(0, count, &mut best.windows),
        Some((k, Attach::Dangling(_))) => parts.windows(0, k, &mut best.windows),
        Some((k, Attach::Window { a, e, .. })) => {
            parts.windows(0, a, &mut best.windows);
            best.windows.push((a, e));
            parts.windows(e + 1, k, &mut best.windows);
        }
    }
    assemble(world, r, &lay, best)
}

fn assemble(world: &BipartiteMarket, r: &Reduced, lay: &Layout, choice: Choice) -> Result<SwshPlan, Error> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut cycles = Vec::new();
    for &(a, e) in &choice.windows {
        let links = cycle_links(e + 1 - a);
        for &(x, y) in links {
            edges.push((lay.top[a + x], lay.seller[a + y]));
        }
        if !links.is_empty() {
            cycles.push((a..=e).map(|g| r.sellers[lay.seller[g]]).collect());
        }
    }
    let mut needy: BTreeSet<usize> = lay.rest.iter().flatten().chain(&lay.dangling_buyers).copied().collect();
    let mut chain = Vec::new();
    let mut attachment = None;
    if let Some((k, att)) = choice.chain {
        let b = match att {
            Attach::Dangling(b) | Attach::Window { buyer: b, .. } => b,
        };
        needy.remove(&b);
        edges.push((b, lay.seller[k]));
        for g in k + 1..lay.top.len() {
            edges.push((lay.top[g - 1], lay.seller[g]));
        }
        needy.insert(lay.top[lay.top.len() - 1]);
        chain = (k..lay.top.len()).map(|g| r.sellers[lay.seller[g]]).collect();
        attachment = Some(r.buyers[b]);
    }
    let zero: Vec<(usize, usize)> = needy.into_iter().zip(lay.dangling_sellers.iter().copied()).collect();
    edges.extend(&zero);
    let edges: EdgeSet = edges.into_iter().map(|(b, s)| (r.buyers[b], r.sellers[s])).collect();
    let revenue = platform_revenue(world, &edges)?.revenue;
    if revenue < choice.total {
        return Err(Error::Invariant(format!(
            "assembled edges earn {revenue} but the decomposition predicted {}",
            choice.total
        )));
    }
    let subgraphs = seller_subgraphs(world)?
        .into_iter()
        .filter(|s| lay.seller.iter().any(|&j| r.sellers[j] == s.seller))
        .map(|mut s| {
            s.buyers.retain(|b| r.buyers.contains(b));
            s
        })
        .collect();
    let zero_chains = zero.into_iter().map(|(b, s)| (r.buyers[b], r.sellers[s])).collect();
    Ok(SwshPlan { edges, revenue, subgraphs, cycles, chain, attachment, zero_chains })
}
