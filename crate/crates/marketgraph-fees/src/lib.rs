//! Platform fees: sellers choose whether to join a platform that charges a
//! fraction α of every on-platform sale. A seller on the platform can trade with
//! every buyer; prices clear at the maximum Walrasian prices of the resulting graph.

pub mod instances;

use std::collections::{BTreeSet, HashMap};

use marketgraph_core::prices::max_prices_table;
use marketgraph_core::welfare::welfare;
use marketgraph_core::{int, BipartiteMarket, EdgeSet, Error, GoodsClass, Rat};
use num_traits::{One, Zero};

pub type SellerSet = BTreeSet<usize>;

/// Largest seller count for which subsets are enumerated.
pub const MAX_ENUM_SELLERS: usize = 16;

/// G(P): world edges plus every buyer linked to every seller in `p`.
pub fn platform_graph(market: &BipartiteMarket, p: &SellerSet) -> EdgeSet {
    let mut e = market.world_edges().clone();
    for &j in p {
        for i in 0..market.buyers() {
            e.insert((i, j));
        }
    }
    e
}

fn mask_of(p: &SellerSet) -> u64 {
    p.iter().fold(0u64, |acc, &j| acc | (1 << j))
}

fn set_of(mask: u64) -> SellerSet {
    (0..64).filter(|j| mask >> j & 1 == 1).collect()
}

/// Memoized max Walrasian prices of G(P) keyed by the seller set.
pub struct PriceBook<'a> {
    market: &'a BipartiteMarket,
    cache: HashMap<u64, Vec<Rat>>,
}

impl<'a> PriceBook<'a> {
    pub fn new(market: &'a BipartiteMarket) -> Self {
        PriceBook { market, cache: HashMap::new() }
    }

    pub fn prices(&mut self, p: &SellerSet) -> &[Rat] {
        let market = self.market;
        self.cache.entry(mask_of(p)).or_insert_with(|| {
            max_prices_table(&market.table(&platform_graph(market, p)), market.sellers())
        })
    }

    /// (p_on, p_off) for seller `j` given the others' choices in `p`.
    pub fn on_off(&mut self, p: &SellerSet, j: usize) -> (Rat, Rat) {
        let mut with = p.clone();
        with.insert(j);
        let mut without = p.clone();
        without.remove(&j);
        let on = self.prices(&with)[j];
        let off = self.prices(&without)[j];
        (on, off)
    }

    pub fn gain(&mut self, alpha: Rat, p: &SellerSet, j: usize) -> SellerGain {
        let (p_on, p_off) = self.on_off(p, j);
        SellerGain { seller: j, p_on, p_off, phi: (Rat::one() - alpha) * p_on - p_off }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SellerGain {
    pub seller: usize,
    pub p_on: Rat,
    pub p_off: Rat,
    /// (1 − α)·p_on − p_off
    pub phi: Rat,
}

fn check_alpha(alpha: Rat) -> Result<(), Error> {
    if alpha < Rat::zero() || alpha > Rat::one() {
        return Err(Error::Input(format!("fee {alpha} outside [0,1]")));
    }
    Ok(())
}

fn check_sellers(market: &BipartiteMarket, p: &SellerSet) -> Result<(), Error> {
    match p.iter().find(|&&j| j >= market.sellers()) {
        Some(j) => Err(Error::Input(format!("seller {j} out of range"))),
        None => Ok(()),
    }
}

fn require_homogeneous(market: &BipartiteMarket) -> Result<(), Error> {
    if market.goods_class() != GoodsClass::Homogeneous {
        return Err(Error::Domain("requires homogeneous goods".into()));
    }
    if market.sellers() > 63 {
        return Err(Error::Limit("at most 63 sellers".into()));
    }
    Ok(())
}

pub fn on_off_prices(market: &BipartiteMarket, p: &SellerSet, j: usize) -> Result<(Rat, Rat), Error> {
    check_sellers(market, p)?;
    if j >= market.sellers() {
        return Err(Error::Input(format!("seller {j} out of range")));
    }
    Ok(PriceBook::new(market).on_off(p, j))
}

/// Ordering used whenever several sellers compete: larger key wins, then the
/// smaller off-platform price, then the lower index.
fn better(a: (Rat, Rat, usize), b: (Rat, Rat, usize)) -> bool {
    (a.0, std::cmp::Reverse(a.1), std::cmp::Reverse(a.2)) > (b.0, std::cmp::Reverse(b.1), std::cmp::Reverse(b.2))
}

fn greedy_from(book: &mut PriceBook, alpha: Rat, mut p: SellerSet) -> SellerSet {
    let m = book.market.sellers();
    while p.len() < m {
        let mut pick: Option<SellerGain> = None;
        for j in (0..m).filter(|j| !p.contains(j)) {
            let g = book.gain(alpha, &p, j);
            let replace = match &pick {
                None => true,
                Some(b) => better((g.phi, g.p_off, j), (b.phi, b.p_off, b.seller)),
            };
            if replace {
                pick = Some(g);
            }
        }
        let g = pick.expect("some seller is off the platform");
        if g.phi < Rat::zero() {
            break;
        }
        p.insert(g.seller);
    }
    p
}

/// Greedy construction of a pure equilibrium in a homogeneous market: keep adding
/// the seller with the largest gain φ while that gain is nonnegative.
pub fn find_pure_equilibrium(market: &BipartiteMarket, alpha: Rat) -> Result<SellerSet, Error> {
    check_alpha(alpha)?;
    require_homogeneous(market)?;
    Ok(greedy_from(&mut PriceBook::new(market), alpha, SellerSet::new()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlatformViolation {
    pub seller: usize,
    /// true: the seller is on the platform and strictly prefers to leave
    pub wants_to_leave: bool,
    pub gain: SellerGain,
}

fn violations_with(book: &mut PriceBook, alpha: Rat, p: &SellerSet) -> Vec<PlatformViolation> {
    let mut out = Vec::new();
    for j in 0..book.market.sellers() {
        let g = book.gain(alpha, p, j);
        let on = p.contains(&j);
        if (on && g.phi < Rat::zero()) || (!on && g.phi > Rat::zero()) {
            out.push(PlatformViolation { seller: j, wants_to_leave: on, gain: g });
        }
    }
    out
}

/// Empty iff every member weakly prefers staying on and every non-member weakly
/// prefers staying off.
pub fn verify_platform_equilibrium(
    market: &BipartiteMarket,
    alpha: Rat,
    p: &SellerSet,
) -> Result<Vec<PlatformViolation>, Error> {
    check_alpha(alpha)?;
    check_sellers(market, p)?;
    Ok(violations_with(&mut PriceBook::new(market), alpha, p))
}

/// Lowers the fee from 1 towards 0, adding one seller each time the next
/// seller's gain reaches zero. The first entry is the equilibrium at α = 1 (when
/// nonempty); every later entry adds exactly one seller at fee 1 − p_off/p_on.
pub fn sweep_alpha(market: &BipartiteMarket) -> Result<Vec<(Rat, SellerSet)>, Error> {
    require_homogeneous(market)?;
    let mut book = PriceBook::new(market);
    let m = market.sellers();
    let mut alpha = Rat::one();
    let mut p = greedy_from(&mut book, alpha, SellerSet::new());
    let mut out = Vec::new();
    if !p.is_empty() {
        out.push((alpha, p.clone()));
    }
    while p.len() < m {
        let mut pick: Option<(Rat, Rat, usize)> = None;
        for j in (0..m).filter(|j| !p.contains(j)) {
            let (on, off) = book.on_off(&p, j);
            let a = if on.is_zero() { alpha } else { (Rat::one() - off / on).min(alpha) };
            if pick.is_none_or(|b| better((a, off, j), b)) {
                pick = Some((a, off, j));
            }
        }
        let (a, _, j) = pick.expect("some seller is off the platform");
        alpha = a;
        p.insert(j);
        out.push((alpha, p.clone()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Audit {
    Converged { profile: SellerSet, steps: usize },
    /// profiles from the first visit of the repeated one up to the step before the repeat
    Cycle { profiles: Vec<SellerSet> },
    Exhausted { trail: Vec<SellerSet> },
}

/// Single-seller best-response dynamics from nobody on the platform. Deviators
/// are scanned round-robin: starting at seller 0, and after each move from the
/// seller following the last mover; the first strictly profitable switch is taken.
pub fn best_response_audit(market: &BipartiteMarket, alpha: Rat, max_iters: usize) -> Result<Audit, Error> {
    check_alpha(alpha)?;
    if max_iters == 0 {
        return Err(Error::Input("max_iters must be at least 1".into()));
    }
    let m = market.sellers();
    if m > 63 {
        return Err(Error::Limit("at most 63 sellers".into()));
    }
    let mut book = PriceBook::new(market);
    let mut p = SellerSet::new();
    let mut trail = vec![p.clone()];
    let mut start = 0;
    for step in 0..max_iters {
        let v = violations_with(&mut book, alpha, &p);
        let Some(mover) = (0..m).map(|k| (start + k) % m).find_map(|j| v.iter().find(|x| x.seller == j)) else {
            return Ok(Audit::Converged { profile: p, steps: step });
        };
        if mover.wants_to_leave {
            p.remove(&mover.seller);
        } else {
            p.insert(mover.seller);
        }
        start = mover.seller + 1;
        if let Some(k) = trail.iter().position(|q| *q == p) {
            return Ok(Audit::Cycle { profiles: trail[k..].to_vec() });
        }
        trail.push(p.clone());
    }
    Ok(Audit::Exhausted { trail })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoaReport {
    pub revenue: Rat,
    pub welfare: Rat,
    pub optimal_welfare: Rat,
    /// optimal/welfare; `None` stands for +∞ (zero welfare)
    pub poa: Option<Rat>,
}

fn report(market: &BipartiteMarket, book: &mut PriceBook, alpha: Rat, p: &SellerSet, opt: Rat) -> PoaReport {
    let prices = book.prices(p);
    let revenue = alpha * p.iter().map(|&j| prices[j]).sum::<Rat>();
    let w = welfare(&market.table(&platform_graph(market, p)), market.sellers());
    let poa = if w.is_zero() {
        if opt.is_zero() { Some(Rat::one()) } else { None }
    } else {
        Some(opt / w)
    };
    PoaReport { revenue, welfare: w, optimal_welfare: opt, poa }
}

pub fn platform_revenue_and_poa(market: &BipartiteMarket, alpha: Rat, p: &SellerSet) -> Result<PoaReport, Error> {
    check_alpha(alpha)?;
    check_sellers(market, p)?;
    let opt = welfare(&market.table(&market.all_pairs()), market.sellers());
    Ok(report(market, &mut PriceBook::new(market), alpha, p, opt))
}

/// Every pure equilibrium at fee `alpha`, by subset enumeration.
pub fn enumerate_pure_equilibria(market: &BipartiteMarket, alpha: Rat) -> Result<Vec<SellerSet>, Error> {
    check_alpha(alpha)?;
    let m = market.sellers();
    if m > MAX_ENUM_SELLERS {
        return Err(Error::Limit(format!("seller count {m} exceeds {MAX_ENUM_SELLERS}")));
    }
    let mut book = PriceBook::new(market);
    Ok((0u64..1 << m)
        .map(set_of)
        .filter(|p| violations_with(&mut book, alpha, p).is_empty())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeeChoice {
    pub alpha: Rat,
    pub on_platform: SellerSet,
    pub report: PoaReport,
}

/// For each fee on the grid, the revenue-maximizing pure equilibrium (ties: the
/// first set in subset-mask order). Fees with no pure equilibrium are skipped.
pub fn revenue_optimal_fees(market: &BipartiteMarket, grid: &[Rat]) -> Result<Vec<FeeChoice>, Error> {
    let m = market.sellers();
    if m > MAX_ENUM_SELLERS {
        return Err(Error::Limit(format!("seller count {m} exceeds {MAX_ENUM_SELLERS}")));
    }
    let opt = welfare(&market.table(&market.all_pairs()), m);
    let mut book = PriceBook::new(market);
    let mut out = Vec::new();
    for &alpha in grid {
        check_alpha(alpha)?;
        let mut best: Option<FeeChoice> = None;
        for mask in 0u64..1 << m {
            let p = set_of(mask);
            if !violations_with(&mut book, alpha, &p).is_empty() {
                continue;
            }
            let r = report(market, &mut book, alpha, &p, opt);
            if best.as_ref().is_none_or(|b| r.revenue > b.report.revenue) {
                best = Some(FeeChoice { alpha, on_platform: p, report: r });
            }
        }
        out.extend(best);
    }
    Ok(out)
}

/// The overall revenue-optimal (fee, equilibrium) pair over a grid.
pub fn best_fee(market: &BipartiteMarket, grid: &[Rat]) -> Result<Option<FeeChoice>, Error> {
    let all = revenue_optimal_fees(market, grid)?;
    Ok(all.into_iter().fold(None, |acc: Option<FeeChoice>, c| match acc {
        Some(a) if a.report.revenue >= c.report.revenue => Some(a),
        _ => Some(c),
    }))
}

/// PoA upper bound (2 − α)/(1 − α) for α < 1.
pub fn poa_bound(alpha: Rat) -> Option<Rat> {
    if alpha >= Rat::one() {
        None
    } else {
        Some((int(2) - alpha) / (Rat::one() - alpha))
    }
}
