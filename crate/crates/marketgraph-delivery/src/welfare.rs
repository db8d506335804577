//! Welfare-optimal allocations for structured markets by minimum-cost flow, and
//! the efficient with-tip equilibria they support.

use marketgraph_core::flow::{min_cost_flow_profile, Network};
use marketgraph_core::{Error, Rat};

use crate::equilibrium::{check_equilibrium_allocation, Certificate};
use crate::market::{Allocation3, CostStructure, ThreeSidedMarket};

/// Cheapest flow over all flow values, smallest value on ties.
fn best_flow(net: &Network, limit: usize) -> Result<Vec<i64>, Error> {
    let profile = min_cost_flow_profile(net, limit as i64)?;
    let best = profile.iter().min_by(|a, b| a.cost.cmp(&b.cost).then(a.value.cmp(&b.value))).expect("zero flow");
    Ok(best.flow.clone())
}

/// Flow through x → (x,y) → y → y' → courier with costs −v, c(x,y), c_d(y);
/// returns the (x, y, courier) units. The courier part depends on y only.
fn split_flow(
    nx: usize,
    ny: usize,
    l: usize,
    value: impl Fn(usize, usize) -> Rat,
    pair: impl Fn(usize, usize) -> Option<Rat>,
    courier: impl Fn(usize, usize) -> Option<Rat>,
) -> Result<Vec<(usize, usize, usize)>, Error> {
    let (src, sink) = (0, 1);
    let xs = 2;
    let orders = xs + nx;
    let ys = orders + nx * ny;
    let dummies = ys + ny;
    let ds = dummies + ny;
    let mut net = Network::new(ds + l, src, sink);
    let mut order_arcs = Vec::new();
    let mut courier_arcs = Vec::new();
    for x in 0..nx {
        net.add_arc(src, xs + x, 1, Rat::from_integer(0));
        for y in 0..ny {
            let Some(c) = pair(x, y) else { continue };
            let o = orders + x * ny + y;
            order_arcs.push((net.add_arc(xs + x, o, 1, -value(x, y)), x, y));
            net.add_arc(o, ys + y, 1, c);
        }
    }
    for y in 0..ny {
        net.add_arc(ys + y, dummies + y, 1, Rat::from_integer(0));
        for d in 0..l {
            if let Some(c) = courier(d, y) {
                courier_arcs.push((net.add_arc(dummies + y, ds + d, 1, c), y, d));
            }
        }
    }
    for d in 0..l {
        net.add_arc(ds + d, sink, 1, Rat::from_integer(0));
    }
    let flow = best_flow(&net, nx.min(ny).min(l))?;
    let mut out = Vec::new();
    for &(a, x, y) in &order_arcs {
        if flow[a] > 0 {
            let &(_, _, d) = courier_arcs.iter().find(|&&(k, yy, _)| yy == y && flow[k] > 0).expect("flow conservation");
            out.push((x, y, d));
        }
    }
    Ok(out)
}

/// Welfare-optimal allocation when courier costs split as c(b,s) + c_d(s) or
/// c(b,s) + c_d(b).
pub fn optimal_welfare_structured(market: &ThreeSidedMarket) -> Result<(Allocation3, Rat), Error> {
    let (m, n, l) = (market.buyers(), market.stores(), market.couriers());
    let triples = match market.structure() {
        CostStructure::StoreSplit => {
            let sp = market.store_split_parts().expect("validated at construction");
            split_flow(m, n, l, |b, s| market.value(b, s), |b, s| sp.pair[b][s], |d, s| sp.courier[d][s])?
        }
        CostStructure::BuyerSplit => {
            let sp = market.buyer_split_parts().expect("validated at construction");
            split_flow(n, m, l, |s, b| market.value(b, s), |s, b| sp.pair[b][s], |d, b| sp.courier[d][b])?
                .into_iter()
                .map(|(s, b, d)| (b, s, d))
                .collect()
        }
        other => return Err(Error::Domain(format!("needs split courier costs, market is {}", other.name()))),
    };
    let x = Allocation3::new(market, triples)?;
    let w = x.welfare(market);
    Ok((x, w))
}

/// Welfare-optimal allocation when every buyer values at most one store.
pub fn optimal_welfare_single_minded(market: &ThreeSidedMarket) -> Result<(Allocation3, Rat), Error> {
    if market.structure() != CostStructure::SingleMindedBuyers {
        return Err(Error::Domain(format!("needs single-minded buyers, market is {}", market.structure().name())));
    }
    let (m, n, l) = (market.buyers(), market.stores(), market.couriers());
    let (src, sink) = (0, 1);
    let stores = 2;
    let pairs = stores + n;
    let ds = pairs + m;
    let mut net = Network::new(ds + l, src, sink);
    let mut arcs = Vec::new();
    for s in 0..n {
        net.add_arc(src, stores + s, 1, Rat::from_integer(0));
    }
    // one node per buyer, tied to the store it values
    for b in 0..m {
        let Some(s) = (0..n).find(|&s| market.value(b, s) > Rat::from_integer(0)) else { continue };
        net.add_arc(stores + s, pairs + b, 1, -market.value(b, s));
        for d in 0..l {
            if let Some(c) = market.cost(d, b, s) {
                arcs.push((net.add_arc(pairs + b, ds + d, 1, c), b, s, d));
            }
        }
    }
    for d in 0..l {
        net.add_arc(ds + d, sink, 1, Rat::from_integer(0));
    }
    let flow = best_flow(&net, m.min(n).min(l))?;
    let x = Allocation3::new(market, arcs.iter().filter(|a| flow[a.0] > 0).map(|&(_, b, s, d)| (b, s, d)))?;
    let w = x.welfare(market);
    Ok((x, w))
}

/// Welfare-optimal allocation together with a with-tip equilibrium supporting
/// it, for split courier costs or single-minded buyers.
pub fn efficient_with_tip_equilibrium(market: &ThreeSidedMarket) -> Result<(Allocation3, Certificate), Error> {
    let (x, _) = match market.structure() {
        CostStructure::SingleMindedBuyers => optimal_welfare_single_minded(market)?,
        _ => optimal_welfare_structured(market)?,
    };
    match check_equilibrium_allocation(market, &x)? {
        Some(cert) => Ok((x, cert)),
        None => Err(Error::Invariant("welfare-optimal allocation is not supported by an equilibrium".into())),
    }
}
