//! Exhaustive search over allocations, for small markets only.

use marketgraph_core::{Error, Rat};

use crate::equilibrium::{check_equilibrium_allocation, check_without_tip_allocation, Pay, TipState};
use crate::market::{Allocation3, ThreeSidedMarket};

/// Largest m·n·l the exhaustive search accepts.
pub const BRUTE_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BruteMode {
    /// best welfare of any allocation
    OptWelfare,
    /// best welfare of an allocation in some with-tip equilibrium
    BestWithTip,
    /// best welfare of an allocation in some without-tip equilibrium
    BestWithoutTip,
    /// best platform profit over without-tip equilibria
    MaxProfit,
}

impl BruteMode {
    pub fn name(self) -> &'static str {
        match self {
            BruteMode::OptWelfare => "opt_welfare",
            BruteMode::BestWithTip => "best_with_tip",
            BruteMode::BestWithoutTip => "best_without_tip",
            BruteMode::MaxProfit => "max_profit",
        }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        match s.replace('-', "_").as_str() {
            "opt_welfare" => Ok(BruteMode::OptWelfare),
            "best_with_tip" => Ok(BruteMode::BestWithTip),
            "best_without_tip" => Ok(BruteMode::BestWithoutTip),
            "max_profit" => Ok(BruteMode::MaxProfit),
            _ => Err(Error::Input(format!("unknown brute-force mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteReport {
    pub mode: BruteMode,
    /// best objective, `None` when no allocation qualifies
    pub value: Option<Rat>,
    pub allocation: Option<Allocation3>,
    /// supporting prices and compensations for the equilibrium modes
    pub state: Option<TipState>,
    /// allocations enumerated
    pub examined: usize,
    /// allocations that qualified for the mode
    pub supported: usize,
}

fn guard(market: &ThreeSidedMarket) -> Result<(), Error> {
    let size = market.buyers() * market.stores() * market.couriers();
    if size > BRUTE_LIMIT {
        return Err(Error::Limit(format!("m·n·l = {size} exceeds the exhaustive-search limit {BRUTE_LIMIT}")));
    }
    Ok(())
}

/// Every feasible allocation, the empty one first.
pub fn all_allocations(market: &ThreeSidedMarket) -> Result<Vec<Allocation3>, Error> {
    guard(market)?;
    fn extend(
        market: &ThreeSidedMarket,
        b: usize,
        used_s: &mut [bool],
        used_d: &mut [bool],
        cur: &mut Vec<(usize, usize, usize)>,
        out: &mut Vec<Allocation3>,
    ) {
        if b == market.buyers() {
            out.push(Allocation3 { triples: cur.iter().copied().collect() });
            return;
        }
        extend(market, b + 1, used_s, used_d, cur, out);
        for s in 0..market.stores() {
            if used_s[s] {
                continue;
            }
            for d in 0..market.couriers() {
                if used_d[d] || market.cost(d, b, s).is_none() {
                    continue;
                }
                used_s[s] = true;
                used_d[d] = true;
                cur.push((b, s, d));
                extend(market, b + 1, used_s, used_d, cur, out);
                cur.pop();
                used_s[s] = false;
                used_d[d] = false;
            }
        }
    }
    let mut out = Vec::new();
    let (mut us, mut ud) = (vec![false; market.stores()], vec![false; market.couriers()]);
    extend(market, 0, &mut us, &mut ud, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Best allocation for `mode` by enumeration; the first allocation reaching
/// the best value wins ties.
pub fn brute_force_3sided(market: &ThreeSidedMarket, mode: BruteMode) -> Result<BruteReport, Error> {
    let all = all_allocations(market)?;
    let mut report = BruteReport { mode, value: None, allocation: None, state: None, examined: all.len(), supported: 0 };
    for x in all {
        let scored = match mode {
            BruteMode::OptWelfare => Some((x.welfare(market), None)),
            BruteMode::BestWithTip => check_equilibrium_allocation(market, &x)?.map(|c| (c.welfare, Some(c.state))),
            BruteMode::BestWithoutTip => {
                check_without_tip_allocation(market, &x, Pay::Highest)?.map(|st| (x.welfare(market), Some(st)))
            }
            BruteMode::MaxProfit => check_without_tip_allocation(market, &x, Pay::Lowest)?.map(|st| (st.profit(&x), Some(st))),
        };
        let Some((value, state)) = scored else { continue };
        report.supported += 1;
        if report.value.is_none_or(|v| value > v) {
            report.value = Some(value);
            report.allocation = Some(x);
            report.state = state;
        }
    }
    Ok(report)
}
