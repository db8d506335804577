//! Exact-arithmetic market primitives: rationals, maximum-weight matching,
//! Walrasian prices, competitive-equilibrium checks, opportunity paths and
//! minimum-cost flow.

pub mod assignment;
pub mod equilibrium;
pub mod flow;
pub mod market;
pub mod opportunity;
pub mod prices;
pub mod rational;
pub mod welfare;

pub use equilibrium::{verify_competitive_equilibrium, Agent, Condition, Violation};
pub use market::{BipartiteMarket, EdgeSet, GoodsClass, Matching};
pub use prices::{max_walrasian_prices, min_walrasian_prices};
pub use rational::{fmt_rat, int, parse_rat, rat, Rat};
pub use welfare::{market_welfare, max_weight_matching};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// malformed or out-of-range input
    #[error("input error: {0}")]
    Input(String),
    /// input is well formed but outside an operation's domain
    #[error("{0}")]
    Domain(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("limit exceeded: {0}")]
    Limit(String),
    /// an internal certificate failed; indicates a bug
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
