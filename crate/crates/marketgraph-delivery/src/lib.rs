//! Three-sided delivery markets: buyers order from stores and couriers carry
//! the orders. The platform sets store prices and courier compensations;
//! buyers may add a tip to attract a courier. This crate verifies both kinds
//! of equilibrium, decides in polynomial time whether an allocation is part of
//! some with-tip equilibrium, finds welfare-optimal allocations by min-cost
//! flow when costs are structured, and maximizes platform profit when every
//! courier works for a single store.

pub mod brute;
pub mod courier;
pub mod equilibrium;
pub mod instances;
pub mod market;
pub mod profit;
pub mod welfare;

pub use brute::{all_allocations, brute_force_3sided, BruteMode, BruteReport, BRUTE_LIMIT};
pub use courier::{courier_plan_for, courier_plan_max, courier_plan_min, min_cover_cost, CourierPlan};
pub use equilibrium::{
    check_equilibrium_allocation, check_without_tip_allocation, min_tip, verify_equilibrium, Agent, Certificate, Condition,
    Pay, TipState, Violation,
};
pub use market::{fold_store_costs, Allocation3, CostSplit, CostStructure, ThreeSidedMarket};
pub use marketgraph_core::Error;
pub use profit::{without_tip_profit_max, ProfitPlan};
pub use welfare::{efficient_with_tip_equilibrium, optimal_welfare_single_minded, optimal_welfare_structured};
