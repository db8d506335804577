//! Platforms that buy exclusive rights from sellers and sell the bundle.
//! Buyer values for item i are μ_i + σZ with Z standard normal, so a bundle's
//! value is again normal and its optimal revenue has a one-dimensional root
//! characterization. Covers complete-information bundle choice, threshold
//! procurement under private quality, Monte-Carlo profit estimates, and
//! in-house production in two-quality markets.

pub mod bundle;
pub mod deviation;
pub mod inhouse;
pub mod mechanism;
pub mod montecarlo;
pub mod normal;
pub mod prior;

pub use bundle::{brute_force_bundle, BUNDLE_BRUTE_LIMIT, bundle_profit, bundle_rev, complete_info_optimal_bundle, t0_threshold, BundleChoice};
pub use deviation::{rev_deviation_bound, SubexponentialParams};
pub use inhouse::{
    inhouse_options, large_market_rule, two_quality_inhouse, InHousePlan, LargeMarketRule, PostedPrice, Quality, QualityMix,
};
pub use marketgraph_core::Error;
pub use mechanism::{surrogate_curve, surrogate_threshold_mechanism, ThresholdMechanism, QUANTILE_GRID};
pub use montecarlo::{monte_carlo_profit, realized_profit, Estimate};
pub use normal::{alpha_zero, monopoly_rev, z_star, MonopolyRev, NormalDemand};
pub use prior::{virtual_cost, virtual_surplus_regions, UniformPrior};
