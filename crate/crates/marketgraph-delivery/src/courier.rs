//! Courier plans: compensations that make couriers deliver exactly a given set
//! of orders.
//!
//! Orders and couriers form a two-sided market in which order o values courier
//! d at H − c_d(o). Courier plans serving Ω correspond to Walrasian equilibria
//! of that market, with courier utilities as prices, so the highest and lowest
//! compensations come from the extreme Walrasian prices.

use std::collections::{BTreeMap, BTreeSet};

use marketgraph_core::welfare::{best_matching_lex, with_seller_copy, without_seller};
use marketgraph_core::{Error, Rat};
use num_traits::Zero;

use crate::market::{Allocation3, ThreeSidedMarket};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CourierPlan {
    /// w̄[b][s], zero off the served orders
    pub compensation: Vec<Vec<Rat>>,
    /// courier delivering each served order
    pub assignment: BTreeMap<(usize, usize), usize>,
    /// ū_d, the utility of each courier under the plan
    pub utilities: Vec<Rat>,
}

/// Maximum-cardinality, minimum-cost courier matching for a list of orders.
struct Cover {
    count: usize,
    cost: Rat,
    mate: Vec<Option<usize>>,
}

type LexTable = Vec<Vec<Option<(Rat, Rat)>>>;

fn cover_table(market: &ThreeSidedMarket, orders: &[(usize, usize)]) -> LexTable {
    orders
        .iter()
        .map(|&(b, s)| (0..market.couriers()).map(|d| market.cost(d, b, s).map(|c| (Rat::from_integer(1), -c))).collect())
        .collect()
}

fn solve(t: &LexTable, cols: usize) -> Cover {
    let a = best_matching_lex(t, cols);
    Cover { count: a.weight.0.to_integer() as usize, cost: -a.weight.1, mate: a.mate }
}

pub(crate) fn check_orders(market: &ThreeSidedMarket, omega: &BTreeSet<(usize, usize)>) -> Result<(), Error> {
    let (mut bs, mut ss) = (BTreeSet::new(), BTreeSet::new());
    for &(b, s) in omega {
        if b >= market.buyers() || s >= market.stores() {
            return Err(Error::Input(format!("order ({b},{s}) out of range")));
        }
        if !bs.insert(b) || !ss.insert(s) {
            return Err(Error::Input(format!("order ({b},{s}) shares a buyer or store with another order")));
        }
    }
    if omega.len() > market.couriers() {
        return Err(Error::Input(format!("{} orders but only {} couriers", omega.len(), market.couriers())));
    }
    Ok(())
}

/// Cheapest cost of delivering all of Ω.
pub fn min_cover_cost(market: &ThreeSidedMarket, omega: &BTreeSet<(usize, usize)>) -> Result<Rat, Error> {
    check_orders(market, omega)?;
    let orders: Vec<_> = omega.iter().copied().collect();
    let c = solve(&cover_table(market, &orders), market.couriers());
    if c.count < orders.len() {
        return Err(Error::Infeasible("the couriers cannot cover every order".into()));
    }
    Ok(c.cost)
}

/// Highest courier utilities ū_d over plans serving Ω, and the courier matching
/// the solver picks.
fn highest_utilities(market: &ThreeSidedMarket, orders: &[(usize, usize)]) -> Result<(Vec<Rat>, Cover), Error> {
    let l = market.couriers();
    let t = cover_table(market, orders);
    let full = solve(&t, l);
    if full.count < orders.len() {
        return Err(Error::Infeasible("the couriers cannot cover every order".into()));
    }
    let h = market.utility_ceiling();
    let utilities = (0..l)
        .map(|d| {
            let rest = solve(&without_seller(&t, d), l);
            // marginal welfare of d at order values H − c
            h * Rat::from_integer((full.count - rest.count) as i128) + rest.cost - full.cost
        })
        .collect();
    Ok((utilities, full))
}

fn plan(market: &ThreeSidedMarket, utilities: Vec<Rat>, assignment: BTreeMap<(usize, usize), usize>) -> CourierPlan {
    let mut compensation = vec![vec![Rat::zero(); market.stores()]; market.buyers()];
    for (&(b, s), &d) in &assignment {
        compensation[b][s] = utilities[d] + market.cost(d, b, s).expect("assigned courier serves the order");
    }
    CourierPlan { compensation, assignment, utilities }
}

/// Plan serving Ω with the highest compensations w̄. With |Ω| < l the utilities
/// are ū_d = C_Ω(G_D∖d) − C_Ω(G_D); with |Ω| = l they are
/// ū_d = H + C_{Ω−1}(G_D∖d) − C_Ω(G_D), H = Σv + Σc.
pub fn courier_plan_max(market: &ThreeSidedMarket, omega: &BTreeSet<(usize, usize)>) -> Result<CourierPlan, Error> {
    check_orders(market, omega)?;
    let orders: Vec<_> = omega.iter().copied().collect();
    let (utilities, full) = highest_utilities(market, &orders)?;
    let assignment = orders.iter().zip(&full.mate).map(|(o, d)| (*o, d.expect("full cover"))).collect();
    Ok(plan(market, utilities, assignment))
}

/// Highest-compensation plan that keeps the allocation's own couriers, or
/// `None` when those couriers are not a cheapest cover of the orders (then no
/// compensation makes them deliver as allocated).
pub fn courier_plan_for(market: &ThreeSidedMarket, x: &Allocation3) -> Result<Option<CourierPlan>, Error> {
    let orders: Vec<_> = x.orders().into_iter().collect();
    let (utilities, full) = highest_utilities(market, &orders)?;
    if x.delivery_cost(market) != full.cost {
        return Ok(None);
    }
    let assignment = x.triples.iter().map(|&(b, s, d)| ((b, s), d)).collect();
    Ok(Some(plan(market, utilities, assignment)))
}

/// Lowest compensations keeping the allocation's couriers: w = c_d(o) + u̲_d with
/// u̲_d = C_Ω(G_D) − C_Ω(G_D + copy of d). `None` when the allocation's
/// couriers are not a cheapest cover.
pub fn courier_plan_min(market: &ThreeSidedMarket, x: &Allocation3) -> Result<Option<CourierPlan>, Error> {
    let orders: Vec<_> = x.orders().into_iter().collect();
    let l = market.couriers();
    let t = cover_table(market, &orders);
    let full = solve(&t, l);
    if full.count < orders.len() || x.delivery_cost(market) != full.cost {
        return Ok(None);
    }
    let utilities = (0..l).map(|d| full.cost - solve(&with_seller_copy(&t, d), l + 1).cost).collect();
    let assignment = x.triples.iter().map(|&(b, s, d)| ((b, s), d)).collect();
    Ok(Some(plan(market, utilities, assignment)))
}
