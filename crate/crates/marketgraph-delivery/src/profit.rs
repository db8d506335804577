//! Profit-maximizing without-tip equilibria when each courier serves one store.

use marketgraph_core::prices::max_prices_table;
use marketgraph_core::welfare::best_matching_lex;
use marketgraph_core::{Error, Rat};
use num_traits::Zero;

use crate::equilibrium::{verify_equilibrium, TipState};
use crate::market::{Allocation3, CostStructure, ThreeSidedMarket};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfitPlan {
    /// prices, compensations and zero tips
    pub state: TipState,
    pub allocation: Allocation3,
    /// Σ p_s − Σ w_{bs}
    pub profit: Rat,
    /// (min positive value) / (1 + Σ costs), the size of a perturbation that
    /// breaks welfare ties by delivery cost; `None` when every value is zero
    pub epsilon: Option<Rat>,
}

fn epsilon(market: &ThreeSidedMarket) -> Option<Rat> {
    let total: Rat = market.costs().iter().flatten().flatten().flatten().copied().sum();
    let least = market.values().iter().flatten().filter(|v| **v > Rat::zero()).min().copied()?;
    Some(least / (Rat::from_integer(1) + total))
}

/// Without-tip equilibrium of maximum platform profit. Prices are the highest
/// Walrasian prices of the buyer-store market and couriers are paid their cost.
/// Among the welfare-maximizing buyer matchings the one with the cheapest
/// deliveries is taken, which is the limit of perturbing each value by a
/// vanishing multiple of the order's cheapest delivery cost.
pub fn without_tip_profit_max(market: &ThreeSidedMarket) -> Result<ProfitPlan, Error> {
    if market.structure() != CostStructure::SingleStoreCouriers {
        return Err(Error::Domain(format!("needs single-store couriers, market is {}", market.structure().name())));
    }
    let (m, n) = (market.buyers(), market.stores());
    let mut cheapest = vec![vec![None; n]; m];
    for (b, s) in market.orders() {
        match market.cheapest_courier(b, s) {
            Some(dc) => cheapest[b][s] = Some(dc),
            None => return Err(Error::Domain(format!("store {s} has no courier"))),
        }
    }
    let lex: Vec<Vec<Option<(Rat, Rat)>>> = (0..m)
        .map(|b| (0..n).map(|s| cheapest[b][s].map(|(_, c)| (market.value(b, s), -c))).collect())
        .collect();
    let a = best_matching_lex(&lex, n);
    let triples = a.mate.iter().enumerate().filter_map(|(b, s)| {
        let s = (*s)?;
        let (d, _) = cheapest[b][s].expect("every order has a courier");
        Some((b, s, d))
    });
    let allocation = Allocation3::new(market, triples)?;

    let plain: Vec<Vec<Option<Rat>>> = market.values().iter().map(|r| r.iter().map(|v| Some(*v)).collect()).collect();
    let prices = max_prices_table(&plain, n);
    let mut compensation = vec![vec![Rat::zero(); n]; m];
    for &(b, s, d) in &allocation.triples {
        compensation[b][s] = market.cost(d, b, s).expect("courier serves its home store");
    }
    let state = TipState::zero_tips(prices, compensation);
    if let Some(v) = verify_equilibrium(market, &state.prices, &state.compensation, &allocation, None)?.first() {
        return Err(Error::Invariant(format!("profit plan is not an equilibrium: {v}")));
    }
    let profit = state.profit(&allocation);
    Ok(ProfitPlan { state, allocation, profit, epsilon: epsilon(market) })
}
