//! Competitive equilibrium checks.

use std::fmt;

use num_traits::Zero;

use crate::market::{BipartiteMarket, EdgeSet, Matching};
use crate::rational::{fmt_rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Feasibility,
    UnitConstraint,
    Envy,
    NonnegativeUtility,
    UnsoldZeroPrice,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Feasibility => "feasibility",
            Condition::UnitConstraint => "unit-constraint",
            Condition::Envy => "envy",
            Condition::NonnegativeUtility => "nonnegative-utility",
            Condition::UnsoldZeroPrice => "unsold-zero-price",
        }
    }
}

/// Which agent a violation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Agent {
    Buyer(usize),
    Seller(usize),
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
            Agent::Buyer(i) => format!("buyer {i}"),
            Agent::Seller(j) => format!("seller {j}"),
        };
        write!(f, "{} at {}: {}", self.condition.name(), who, self.detail)
    }
}

fn violation(condition: Condition, agent: Agent, detail: String) -> Violation {
    Violation { condition, agent, detail }
}

/// Checks the five competitive-equilibrium conditions; empty means `prices`
/// and `matching` form an equilibrium on `edges`.
pub fn verify_competitive_equilibrium(
    market: &BipartiteMarket,
    edges: &EdgeSet,
    matching: &Matching,
    prices: &[Rat],
) -> Vec<Violation> {
    let (n, m) = (market.buyers(), market.sellers());
    let mut out = Vec::new();
    if prices.len() != m {
        out.push(violation(
            Condition::Feasibility,
            Agent::Seller(prices.len().min(m)),
            format!("{} prices for {m} sellers", prices.len()),
        ));
        return out;
    }
    for (j, p) in prices.iter().enumerate() {
        if *p < Rat::zero() {
            out.push(violation(Condition::Feasibility, Agent::Seller(j), format!("negative price {}", fmt_rat(p))));
        }
    }
    let mut buyer_seller: Vec<Option<usize>> = vec![None; n];
    let mut seller_taken = vec![false; m];
    for &(i, j) in &matching.pairs {
        if i >= n || j >= m || !edges.contains(&(i, j)) {
            out.push(violation(Condition::Feasibility, Agent::Buyer(i), format!("pair ({i},{j}) is not a permitted edge")));
            continue;
        }
        if buyer_seller[i].is_some() {
            out.push(violation(Condition::UnitConstraint, Agent::Buyer(i), "buyer matched twice".into()));
        }
        if seller_taken[j] {
            out.push(violation(Condition::UnitConstraint, Agent::Seller(j), "seller matched twice".into()));
        }
        buyer_seller[i] = Some(j);
        seller_taken[j] = true;
    }
    for (i, &mine) in buyer_seller.iter().enumerate() {
        let u = match mine {
            Some(j) => market.value(i, j) - prices[j],
            None => Rat::zero(),
        };
        if u < Rat::zero() {
            out.push(violation(Condition::NonnegativeUtility, Agent::Buyer(i), format!("utility {}", fmt_rat(&u))));
        }
        let better = edges
            .range((i, 0)..(i + 1, 0))
            .map(|&(_, j)| (j, market.value(i, j) - prices[j]))
            .find(|(_, alt)| *alt > u);
        if let Some((j, alt)) = better {
            out.push(violation(
                Condition::Envy,
                Agent::Buyer(i),
                format!("prefers seller {j} (utility {} > {})", fmt_rat(&alt), fmt_rat(&u)),
            ));
        }
    }
    for j in 0..m {
        if !seller_taken[j] && !prices[j].is_zero() {
            out.push(violation(
                Condition::UnsoldZeroPrice,
                Agent::Seller(j),
                format!("unsold at price {}", fmt_rat(&prices[j])),
            ));
        }
    }
    out
}
