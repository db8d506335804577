//! Equilibrium definitions with and without tips, the minimum tip, and the
//! polynomial test of whether an allocation is supported by some equilibrium.

use std::fmt;

use marketgraph_core::prices::max_prices_table;
use marketgraph_core::welfare::welfare;
use marketgraph_core::{fmt_rat, Error, Rat};
use num_traits::Zero;

use crate::courier::{courier_plan_for, courier_plan_min, CourierPlan};
use crate::market::{Allocation3, ThreeSidedMarket};

/// Prices p_s, compensations w_{bs} and tips t_{bs}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TipState {
    pub prices: Vec<Rat>,
    pub compensation: Vec<Vec<Rat>>,
    pub tips: Vec<Vec<Rat>>,
}

impl TipState {
    pub fn zero_tips(prices: Vec<Rat>, compensation: Vec<Vec<Rat>>) -> Self {
        let tips = vec![vec![Rat::zero(); prices.len()]; compensation.len()];
        TipState { prices, compensation, tips }
    }

    /// Platform profit Σ p_s − Σ w_{bs} over the allocation's trades.
    pub fn profit(&self, x: &Allocation3) -> Rat {
        x.triples.iter().map(|&(b, s, _)| self.prices[s] - self.compensation[b][s]).sum()
    }

    /// Moves the tips into prices and compensations of executed orders:
    /// p' = p + t, w' = w + t, t' = 0.
    pub fn fold_tips(&self, x: &Allocation3) -> Self {
        let mut out = TipState::zero_tips(vec![Rat::zero(); self.prices.len()], self.compensation.clone());
        for row in &mut out.compensation {
            row.iter_mut().for_each(|w| *w = Rat::zero());
        }
        for &(b, s, _) in &x.triples {
            out.prices[s] = self.prices[s] + self.tips[b][s];
            out.compensation[b][s] = self.compensation[b][s] + self.tips[b][s];
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Nonnegative,
    BuyerChoice,
    MinimumTip,
    CourierChoice,
    UnsoldZeroPrice,
    UndeliveredZeroPay,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Nonnegative => "nonnegative",
            Condition::BuyerChoice => "buyer-choice",
            Condition::MinimumTip => "minimum-tip",
            Condition::CourierChoice => "courier-choice",
            Condition::UnsoldZeroPrice => "unsold-zero-price",
            Condition::UndeliveredZeroPay => "undelivered-zero-pay",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Agent {
    Buyer(usize),
    Store(usize),
    Courier(usize),
    Order(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub agent: Agent,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let who = match self.agent {
            Agent::Buyer(b) => format!("buyer {b}"),
            Agent::Store(s) => format!("store {s}"),
            Agent::Courier(d) => format!("courier {d}"),
            Agent::Order(b, s) => format!("order ({b},{s})"),
        };
        write!(f, "{} at {}: {}", self.condition.name(), who, self.detail)
    }
}

fn shape(market: &ThreeSidedMarket, p: &[Rat], table: &[Vec<Rat>], what: &str) -> Result<(), Error> {
    if p.len() != market.stores() {
        return Err(Error::Input(format!("{} prices for {} stores", p.len(), market.stores())));
    }
    if table.len() != market.buyers() || table.iter().any(|r| r.len() != market.stores()) {
        return Err(Error::Input(format!("{what} table is not buyers x stores")));
    }
    Ok(())
}

/// Smallest tip t_{bs} for which some courier has (b,s) among its favorite
/// orders, given compensations and the other buyers' tips (row b of `tips` is
/// ignored). `None` when no courier can deliver the order.
pub fn min_tip(market: &ThreeSidedMarket, w: &[Vec<Rat>], tips: &[Vec<Rat>], b: usize, s: usize) -> Option<Rat> {
    let mut best: Option<Rat> = None;
    for d in 0..market.couriers() {
        let Some(c) = market.cost(d, b, s) else { continue };
        let mut need = (c - w[b][s]).max(Rat::zero());
        for (b2, s2) in market.orders() {
            if (b2, s2) == (b, s) {
                continue;
            }
            let Some(c2) = market.cost(d, b2, s2) else { continue };
            let t2 = if b2 == b { Rat::zero() } else { tips[b2][s2] };
            need = need.max(w[b2][s2] + t2 - c2 - w[b][s] + c);
        }
        if best.is_none_or(|t| need < t) {
            best = Some(need);
        }
    }
    best
}

/// Checks the equilibrium definition. Without `tips` this is the without-tip
/// equilibrium; with them, the with-tip one, where buyers compare stores after
/// paying the minimum tip and pay exactly that tip on their own order.
pub fn verify_equilibrium(
    market: &ThreeSidedMarket,
    p: &[Rat],
    w: &[Vec<Rat>],
    x: &Allocation3,
    tips: Option<&[Vec<Rat>]>,
) -> Result<Vec<Violation>, Error> {
    shape(market, p, w, "compensation")?;
    if let Some(t) = tips {
        shape(market, p, t, "tip")?;
    }
    Allocation3::new(market, x.triples.iter().copied())?;
    let zeros = vec![vec![Rat::zero(); market.stores()]; market.buyers()];
    let t = tips.unwrap_or(&zeros);
    let mut out = Vec::new();
    let mut push = |condition, agent, detail: String| out.push(Violation { condition, agent, detail });

    for (s, ps) in p.iter().enumerate() {
        if *ps < Rat::zero() {
            push(Condition::Nonnegative, Agent::Store(s), format!("price {}", fmt_rat(ps)));
        }
    }
    for (b, s) in market.orders() {
        if w[b][s] < Rat::zero() || t[b][s] < Rat::zero() {
            push(Condition::Nonnegative, Agent::Order(b, s), "negative compensation or tip".into());
        }
    }

    for b in 0..market.buyers() {
        let utility = |s: usize| -> Option<Rat> {
            let base = market.value(b, s) - p[s];
            match tips {
                None => Some(base),
                Some(_) => min_tip(market, w, t, b, s).map(|tip| base - tip),
            }
        };
        let utils: Vec<Option<Rat>> = (0..market.stores()).map(utility).collect();
        let best = utils.iter().flatten().copied().max();
        let chosen = x.store_of(b);
        match (best, chosen) {
            (Some(top), None) if top > Rat::zero() => {
                push(Condition::BuyerChoice, Agent::Buyer(b), format!("buys nothing but can get {}", fmt_rat(&top)));
            }
            (_, Some(s)) => {
                let u = utils[s];
                let ok = u.is_some_and(|u| u >= Rat::zero() && best.is_none_or(|top| u >= top));
                if !ok {
                    let got = u.map_or("no delivery".to_string(), |u| fmt_rat(&u));
                    push(Condition::BuyerChoice, Agent::Buyer(b), format!("gets {got} from store {s}, best is {}", fmt_rat(&best.unwrap_or_else(Rat::zero))));
                }
                if tips.is_some() {
                    let need = min_tip(market, w, t, b, s);
                    if need != Some(t[b][s]) {
                        let need = need.map_or("none".to_string(), |n| fmt_rat(&n));
                        push(Condition::MinimumTip, Agent::Buyer(b), format!("pays {} on store {s}, minimum is {need}", fmt_rat(&t[b][s])));
                    }
                }
            }
            _ => {}
        }
    }

    for d in 0..market.couriers() {
        let utils: Vec<((usize, usize), Rat)> = market
            .orders()
            .filter_map(|(b, s)| market.cost(d, b, s).map(|c| ((b, s), w[b][s] + t[b][s] - c)))
            .collect();
        let best = utils.iter().map(|u| u.1).max();
        let own = x.order_of(d).map(|o| utils.iter().find(|u| u.0 == o).expect("allocation was validated").1);
        let ok = match own {
            None => best.is_none_or(|top| top <= Rat::zero()),
            Some(u) => u >= Rat::zero() && best.is_none_or(|top| u >= top),
        };
        if !ok {
            let got = own.map_or("idle".to_string(), |u| fmt_rat(&u));
            push(Condition::CourierChoice, Agent::Courier(d), format!("gets {got}, best is {}", fmt_rat(&best.unwrap_or_else(Rat::zero))));
        }
    }

    for (s, ps) in p.iter().enumerate() {
        if x.buyer_of(s).is_none() && !ps.is_zero() {
            push(Condition::UnsoldZeroPrice, Agent::Store(s), format!("unsold at price {}", fmt_rat(ps)));
        }
    }
    let served = x.orders();
    for (b, s) in market.orders() {
        if !served.contains(&(b, s)) && !(w[b][s].is_zero() && t[b][s].is_zero()) {
            push(Condition::UndeliveredZeroPay, Agent::Order(b, s), "undelivered order carries pay".into());
        }
    }
    Ok(out)
}

/// Supporting with-tip equilibrium for an allocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// prices, highest compensations w̄, zero tips
    pub state: TipState,
    pub plan: CourierPlan,
    /// t̲_{bs} under w̄ and zero tips, `None` where no courier can deliver
    pub min_tips: Vec<Vec<Option<Rat>>>,
    pub welfare: Rat,
}

fn self_check(market: &ThreeSidedMarket, state: &TipState, x: &Allocation3, tips: bool) -> Result<(), Error> {
    let t = tips.then_some(state.tips.as_slice());
    let v = verify_equilibrium(market, &state.prices, &state.compensation, x, t)?;
    match v.first() {
        None => Ok(()),
        Some(first) => Err(Error::Invariant(format!("constructed equilibrium fails: {first}"))),
    }
}

/// Decides whether `x` is part of some with-tip equilibrium. Tips are folded
/// into prices, couriers are paid the highest compensations w̄, and buyers face
/// the graph G_x whose off-allocation weights are v_b(s) − t̲_{bs}; `x` is
/// supported exactly when its buyer matching has maximum weight in G_x. The
/// certificate uses the highest Walrasian prices of G_x.
pub fn check_equilibrium_allocation(market: &ThreeSidedMarket, x: &Allocation3) -> Result<Option<Certificate>, Error> {
    let x = Allocation3::new(market, x.triples.iter().copied())?;
    let Some(plan) = courier_plan_for(market, &x)? else { return Ok(None) };
    let zeros = vec![vec![Rat::zero(); market.stores()]; market.buyers()];
    let min_tips: Vec<Vec<Option<Rat>>> = (0..market.buyers())
        .map(|b| (0..market.stores()).map(|s| min_tip(market, &plan.compensation, &zeros, b, s)).collect())
        .collect();
    let gx: Vec<Vec<Option<Rat>>> = (0..market.buyers())
        .map(|b| {
            (0..market.stores())
                .map(|s| match x.store_of(b) == Some(s) {
                    true => Some(market.value(b, s)),
                    false => min_tips[b][s].map(|t| market.value(b, s) - t),
                })
                .collect()
        })
        .collect();
    let z: Rat = x.triples.iter().map(|&(b, s, _)| market.value(b, s)).sum();
    if z != welfare(&gx, market.stores()) {
        return Ok(None);
    }
    let prices = max_prices_table(&gx, market.stores());
    let state = TipState::zero_tips(prices, plan.compensation.clone());
    self_check(market, &state, &x, true)?;
    Ok(Some(Certificate { state, plan, min_tips, welfare: x.welfare(market) }))
}

/// Which courier compensation a without-tip certificate uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pay {
    Highest,
    Lowest,
}

/// Decides whether `x` is part of some without-tip equilibrium: its buyer
/// matching must be a Walrasian allocation of the buyer-store market and its
/// couriers a cheapest cover of the orders. Prices are the highest Walrasian
/// prices; compensations are the highest or lowest courier plan.
pub fn check_without_tip_allocation(market: &ThreeSidedMarket, x: &Allocation3, pay: Pay) -> Result<Option<TipState>, Error> {
    let x = Allocation3::new(market, x.triples.iter().copied())?;
    let table: Vec<Vec<Option<Rat>>> = market.values().iter().map(|r| r.iter().map(|v| Some(*v)).collect()).collect();
    let z: Rat = x.triples.iter().map(|&(b, s, _)| market.value(b, s)).sum();
    if z != welfare(&table, market.stores()) {
        return Ok(None);
    }
    let plan = match pay {
        Pay::Highest => courier_plan_for(market, &x)?,
        Pay::Lowest => courier_plan_min(market, &x)?,
    };
    let Some(plan) = plan else { return Ok(None) };
    let state = TipState::zero_tips(max_prices_table(&table, market.stores()), plan.compensation);
    self_check(market, &state, &x, false)?;
    Ok(Some(state))
}
