//! Opportunity paths: alternate a non-transacting edge out of a buyer with the
//! transacting edge into the next buyer.

use std::collections::{BTreeSet, VecDeque};

use num_traits::Zero;

use crate::market::{BipartiteMarket, EdgeSet, Matching};
use crate::rational::Rat;
use crate::Error;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Reachable {
    pub buyers: BTreeSet<usize>,
    pub sellers: BTreeSet<usize>,
    /// some reached seller is unsold
    pub unsold_seller: bool,
}

pub fn opportunity_reachable(
    market: &BipartiteMarket,
    edges: &EdgeSet,
    matching: &Matching,
    buyer: usize,
) -> Result<Reachable, Error> {
    if buyer >= market.buyers() {
        return Err(Error::Input(format!("buyer {buyer} out of range")));
    }
    let mate: Vec<Option<usize>> = (0..market.buyers()).map(|i| matching.seller_of(i)).collect();
    let holder: Vec<Option<usize>> = (0..market.sellers()).map(|j| matching.buyer_of(j)).collect();
    if mate[buyer].is_none() {
        return Err(Error::Domain("no transaction".into()));
    }
    let mut out = Reachable::default();
    out.buyers.insert(buyer);
    let mut queue = VecDeque::from([buyer]);
    while let Some(b) = queue.pop_front() {
        for &(_, s) in edges.range((b, 0)..(b + 1, 0)) {
            if Some(s) == mate[b] || !out.sellers.insert(s) {
                continue;
            }
            match holder[s] {
                Some(next) => {
                    if out.buyers.insert(next) {
                        queue.push_back(next);
                    }
                }
                None => out.unsold_seller = true,
            }
        }
    }
    Ok(out)
}

/// Price of the seller matched to `buyer` in a market where each buyer values
/// all its edges equally: the lowest reachable buyer value, or 0 when an unsold
/// seller is reachable.
pub fn opportunity_price(
    market: &BipartiteMarket,
    edges: &EdgeSet,
    matching: &Matching,
    buyer: usize,
) -> Result<Rat, Error> {
    let own = |i: usize| -> Result<Rat, Error> {
        let mut vals = edges.range((i, 0)..(i + 1, 0)).map(|&(_, j)| market.value(i, j));
        let first = vals.next().unwrap_or_else(Rat::zero);
        if vals.any(|v| v != first) {
            return Err(Error::Domain(format!("buyer {i} is not homogeneous on its edges")));
        }
        Ok(first)
    };
    let r = opportunity_reachable(market, edges, matching, buyer)?;
    if r.unsold_seller {
        return Ok(Rat::zero());
    }
    let mut best: Option<Rat> = None;
    for &i in &r.buyers {
        let v = own(i)?;
        best = Some(best.map_or(v, |b| b.min(v)));
    }
    Ok(best.unwrap_or_else(Rat::zero))
}
