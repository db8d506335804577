//! Exhaustive oracles over the instance kinds, with explicit size guards.

use marketgraph_bundling::{brute_force_bundle, complete_info_optimal_bundle, BundleChoice, BUNDLE_BRUTE_LIMIT};
use marketgraph_core::{Error, Rat};
use marketgraph_delivery::{brute_force_3sided, BruteMode, BruteReport, BRUTE_LIMIT};
use marketgraph_disruption::oracle::{brute_force_subsets, BruteForce};
use marketgraph_fees::{enumerate_pure_equilibria, platform_revenue_and_poa, PoaReport, SellerSet, MAX_ENUM_SELLERS};

use crate::format::InstanceFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    /// every pure platform equilibrium at one fee
    PlatformEqEnum,
    /// every subset of candidate platform edges
    PlatformEdgesEnum,
    /// every allocation of a three-sided market, under all four objectives
    ThreeSidedEnum,
    /// every subset of sellers as a bundle
    BundleEnum,
}

impl OracleKind {
    pub const ALL: [OracleKind; 4] =
        [OracleKind::PlatformEqEnum, OracleKind::PlatformEdgesEnum, OracleKind::ThreeSidedEnum, OracleKind::BundleEnum];

    pub fn name(self) -> &'static str {
        match self {
            OracleKind::PlatformEqEnum => "platform_eq_enum",
            OracleKind::PlatformEdgesEnum => "platform_edges_enum",
            OracleKind::ThreeSidedEnum => "three_sided_enum",
            OracleKind::BundleEnum => "bundle_enum",
        }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        let s = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown oracle {s:?}")))
    }
}

/// Size guards. Each oracle refuses instances above its limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// sellers whose on/off subsets are enumerated
    pub max_sellers: usize,
    /// candidate platform pairs whose subsets are enumerated
    pub max_pairs: usize,
    /// m·n·l for three-sided allocations
    pub max_three_sided: usize,
    /// sellers whose subsets are enumerated as bundles
    pub max_bundle: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_sellers: MAX_ENUM_SELLERS, max_pairs: 20, max_three_sided: BRUTE_LIMIT, max_bundle: BUNDLE_BRUTE_LIMIT }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleReport {
    PlatformEquilibria { alpha: Rat, equilibria: Vec<(SellerSet, PoaReport)> },
    PlatformEdges(BruteForce),
    ThreeSided(Vec<BruteReport>),
    Bundle {
        /// optimal members by subset enumeration, as input indices
        members: Vec<usize>,
        profit: f64,
        /// whether the members form a run in sorted quality
        contiguous: bool,
        window: BundleChoice,
    },
}

fn limit(what: &str, size: usize, name: &str, max: usize) -> Result<(), Error> {
    if size > max {
        return Err(Error::Limit(format!("{what} {size} exceeds {name} = {max}")));
    }
    Ok(())
}

/// Runs `kind` on `instance`. The platform equilibrium oracle takes its fee
/// from `alpha` or else from the instance.
pub fn oracle(kind: OracleKind, instance: &InstanceFile, limits: &Limits, alpha: Option<Rat>) -> Result<OracleReport, Error> {
    match kind {
        OracleKind::PlatformEqEnum => {
            let b = instance.bipartite()?;
            let alpha = alpha
                .or(b.alpha.map(|q| q.0))
                .ok_or_else(|| Error::Input("platform_eq_enum needs a fee; the instance has none".into()))?;
            let market = b.market()?;
            limit("seller count", market.sellers(), "max_sellers", limits.max_sellers.min(MAX_ENUM_SELLERS))?;
            let equilibria = enumerate_pure_equilibria(&market, alpha)?
                .into_iter()
                .map(|p| platform_revenue_and_poa(&market, alpha, &p).map(|r| (p, r)))
                .collect::<Result<_, _>>()?;
            Ok(OracleReport::PlatformEquilibria { alpha, equilibria })
        }
        OracleKind::PlatformEdgesEnum => {
            let market = instance.bipartite()?.market()?;
            brute_force_subsets(&market, limits.max_pairs.min(20)).map(OracleReport::PlatformEdges).map_err(|e| match e {
                Error::Limit(s) => Error::Limit(format!("{s} (max_pairs)")),
                other => other,
            })
        }
        OracleKind::ThreeSidedEnum => {
            let market = instance.three_sided()?.market()?;
            let size = market.buyers() * market.stores() * market.couriers();
            limit("m·n·l", size, "max_three_sided", limits.max_three_sided.min(BRUTE_LIMIT))?;
            let modes = [BruteMode::OptWelfare, BruteMode::BestWithTip, BruteMode::BestWithoutTip, BruteMode::MaxProfit];
            Ok(OracleReport::ThreeSided(modes.into_iter().map(|m| brute_force_3sided(&market, m)).collect::<Result<_, _>>()?))
        }
        OracleKind::BundleEnum => {
            let b = instance.bundling()?;
            limit("seller count", b.qualities.len(), "max_bundle", limits.max_bundle.min(BUNDLE_BRUTE_LIMIT))?;
            let (members, profit) = brute_force_bundle(&b.qualities, b.sigma)?;
            let window = complete_info_optimal_bundle(&b.qualities, b.sigma)?;
            let mut order: Vec<usize> = (0..b.qualities.len()).collect();
            order.sort_by(|&x, &y| b.qualities[x].total_cmp(&b.qualities[y]));
            let pos: Vec<usize> = members.iter().map(|m| order.iter().position(|o| o == m).expect("member index")).collect();
            let contiguous = pos.windows(2).all(|w| w[1] == w[0] + 1);
            Ok(OracleReport::Bundle { members, profit, contiguous, window })
        }
    }
}
