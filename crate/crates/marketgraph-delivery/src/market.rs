use std::collections::BTreeSet;

use marketgraph_core::{Error, Rat};
use num_traits::Zero;

/// Declared shape of the courier costs. The declaration is checked against the
/// cost tensor when the market is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CostStructure {
    General,
    /// c_d(b,s) = c(b,s) + c_d(s)
    StoreSplit,
    /// c_d(b,s) = c(b,s) + c_d(b)
    BuyerSplit,
    /// every buyer values at most one store positively
    SingleMindedBuyers,
    /// every courier serves the orders of a single store
    SingleStoreCouriers,
}

impl CostStructure {
    pub fn name(self) -> &'static str {
        match self {
            CostStructure::General => "general",
            CostStructure::StoreSplit => "store_split",
            CostStructure::BuyerSplit => "buyer_split",
            CostStructure::SingleMindedBuyers => "single_minded_buyers",
            CostStructure::SingleStoreCouriers => "single_store_couriers",
        }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "general" => CostStructure::General,
            "store_split" => CostStructure::StoreSplit,
            "buyer_split" => CostStructure::BuyerSplit,
            "single_minded_buyers" => CostStructure::SingleMindedBuyers,
            "single_store_couriers" => CostStructure::SingleStoreCouriers,
            _ => return Err(Error::Input(format!("unknown cost structure {s:?}"))),
        })
    }
}

/// Additive split of the courier costs. `pair[b][s]` is the buyer-store part;
/// `courier[d][k]` is the courier part, indexed by store or by buyer depending
/// on the split. `None` marks a courier that cannot serve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostSplit {
    pub pair: Vec<Vec<Option<Rat>>>,
    pub courier: Vec<Vec<Option<Rat>>>,
}

/// Buyers, stores and couriers with values v_b(s) and delivery costs c_d(b,s).
/// A missing cost means the courier cannot deliver that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeSidedMarket {
    values: Vec<Vec<Rat>>,
    costs: Vec<Vec<Vec<Option<Rat>>>>,
    structure: CostStructure,
}

impl ThreeSidedMarket {
    /// `values[b][s]`, `costs[d][b][s]`.
    pub fn new(values: Vec<Vec<Rat>>, costs: Vec<Vec<Vec<Option<Rat>>>>, structure: CostStructure) -> Result<Self, Error> {
        let m = values.len();
        let n = values.first().map_or(0, Vec::len);
        if m == 0 || n == 0 || costs.is_empty() {
            return Err(Error::Input("a market needs at least one buyer, store and courier".into()));
        }
        for (b, row) in values.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Input(format!("buyer {b} has {} values, expected {n}", row.len())));
            }
            if let Some(s) = row.iter().position(|v| *v < Rat::zero()) {
                return Err(Error::Input(format!("negative value v_{b}({s})")));
            }
        }
        for (d, table) in costs.iter().enumerate() {
            if table.len() != m || table.iter().any(|r| r.len() != n) {
                return Err(Error::Input(format!("courier {d} cost table is not {m}x{n}")));
            }
            for (b, row) in table.iter().enumerate() {
                if let Some(s) = row.iter().position(|c| c.is_some_and(|c| c < Rat::zero())) {
                    return Err(Error::Input(format!("negative cost c_{d}({b},{s})")));
                }
            }
        }
        let mk = ThreeSidedMarket { values, costs, structure };
        mk.check_structure()?;
        Ok(mk)
    }

    /// Every courier can deliver every order.
    pub fn general(values: Vec<Vec<Rat>>, costs: Vec<Vec<Vec<Rat>>>) -> Result<Self, Error> {
        let costs = costs.into_iter().map(|t| t.into_iter().map(|r| r.into_iter().map(Some).collect()).collect()).collect();
        Self::new(values, costs, CostStructure::General)
    }

    /// c_d(b,s) = pair[b][s] + courier[d][s].
    pub fn store_split(values: Vec<Vec<Rat>>, pair: &[Vec<Rat>], courier: &[Vec<Option<Rat>>]) -> Result<Self, Error> {
        let costs = courier
            .iter()
            .map(|cd| pair.iter().map(|row| row.iter().zip(cd).map(|(c, k)| k.map(|k| *c + k)).collect()).collect())
            .collect();
        Self::new(values, costs, CostStructure::StoreSplit)
    }

    /// c_d(b,s) = pair[b][s] + courier[d][b].
    pub fn buyer_split(values: Vec<Vec<Rat>>, pair: &[Vec<Rat>], courier: &[Vec<Option<Rat>>]) -> Result<Self, Error> {
        let costs = courier
            .iter()
            .map(|cd| pair.iter().zip(cd).map(|(row, k)| row.iter().map(|c| k.map(|k| *c + k)).collect()).collect())
            .collect();
        Self::new(values, costs, CostStructure::BuyerSplit)
    }

    /// Courier `d` serves only store `home[d]`, at cost `cost[d][b]` to buyer `b`.
    pub fn single_store(values: Vec<Vec<Rat>>, home: &[usize], cost: &[Vec<Rat>]) -> Result<Self, Error> {
        let n = values.first().map_or(0, Vec::len);
        if home.len() != cost.len() {
            return Err(Error::Input("one home store per courier expected".into()));
        }
        let costs = home
            .iter()
            .zip(cost)
            .map(|(&h, cd)| cd.iter().map(|c| (0..n).map(|s| (s == h).then_some(*c)).collect()).collect())
            .collect();
        Self::new(values, costs, CostStructure::SingleStoreCouriers)
    }

    pub fn buyers(&self) -> usize {
        self.values.len()
    }

    pub fn stores(&self) -> usize {
        self.values[0].len()
    }

    pub fn couriers(&self) -> usize {
        self.costs.len()
    }

    pub fn value(&self, b: usize, s: usize) -> Rat {
        self.values[b][s]
    }

    pub fn values(&self) -> &[Vec<Rat>] {
        &self.values
    }

    pub fn cost(&self, d: usize, b: usize, s: usize) -> Option<Rat> {
        self.costs[d][b][s]
    }

    pub fn costs(&self) -> &[Vec<Vec<Option<Rat>>>] {
        &self.costs
    }

    pub fn structure(&self) -> CostStructure {
        self.structure
    }

    /// Same market under another declared structure.
    pub fn with_structure(&self, structure: CostStructure) -> Result<Self, Error> {
        Self::new(self.values.clone(), self.costs.clone(), structure)
    }

    pub fn orders(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.stores();
        (0..self.buyers()).flat_map(move |b| (0..n).map(move |s| (b, s)))
    }

    /// Cheapest courier for an order, lowest index on ties.
    pub fn cheapest_courier(&self, b: usize, s: usize) -> Option<(usize, Rat)> {
        let mut best: Option<(usize, Rat)> = None;
        for d in 0..self.couriers() {
            if let Some(c) = self.cost(d, b, s) {
                if best.is_none_or(|(_, bc)| c < bc) {
                    best = Some((d, c));
                }
            }
        }
        best
    }

    /// H = Σ v + Σ c, the courier utility offset used when every courier delivers.
    pub fn utility_ceiling(&self) -> Rat {
        let v: Rat = self.values.iter().flatten().sum();
        let c: Rat = self.costs.iter().flatten().flatten().flatten().sum();
        v + c
    }

    pub fn max_value(&self) -> Rat {
        self.values.iter().flatten().copied().max().unwrap_or_else(Rat::zero)
    }

    /// The store a single-store courier serves; `None` for a courier that serves nothing.
    pub fn home_store(&self, d: usize) -> Option<usize> {
        (0..self.stores()).find(|&s| (0..self.buyers()).any(|b| self.cost(d, b, s).is_some()))
    }

    /// Split c_d(b,s) = c(b,s) + c_d(s), if one exists. The pair part is the
    /// cheapest courier's cost, which keeps both parts nonnegative.
    pub fn store_split_parts(&self) -> Option<CostSplit> {
        let (m, n, l) = (self.buyers(), self.stores(), self.couriers());
        let mut pair = vec![vec![None; n]; m];
        let mut courier = vec![vec![None; n]; l];
        for s in 0..n {
            let column = |d: usize| (0..m).map(move |b| self.cost(d, b, s));
            let (pp, cp) = split_column(l, m, column)?;
            for (row, c) in pair.iter_mut().zip(pp) {
                row[s] = c;
            }
            for (row, c) in courier.iter_mut().zip(cp) {
                row[s] = c;
            }
        }
        Some(CostSplit { pair, courier })
    }

    /// Split c_d(b,s) = c(b,s) + c_d(b), if one exists.
    pub fn buyer_split_parts(&self) -> Option<CostSplit> {
        let (m, n, l) = (self.buyers(), self.stores(), self.couriers());
        let mut pair = vec![vec![None; n]; m];
        let mut courier = vec![vec![None; m]; l];
        for b in 0..m {
            let row = |d: usize| (0..n).map(move |s| self.cost(d, b, s));
            let (pp, cp) = split_column(l, n, row)?;
            pair[b] = pp;
            for (r, c) in courier.iter_mut().zip(cp) {
                r[b] = c;
            }
        }
        Some(CostSplit { pair, courier })
    }

    fn check_structure(&self) -> Result<(), Error> {
        let bad = |why: String| Err(Error::Input(format!("{} structure: {why}", self.structure.name())));
        match self.structure {
            CostStructure::General => Ok(()),
            CostStructure::StoreSplit => match self.store_split_parts() {
                Some(_) => Ok(()),
                None => bad("costs do not split into buyer-store and courier-store parts".into()),
            },
            CostStructure::BuyerSplit => match self.buyer_split_parts() {
                Some(_) => Ok(()),
                None => bad("costs do not split into buyer-store and courier-buyer parts".into()),
            },
            CostStructure::SingleMindedBuyers => {
                match self.values.iter().position(|r| r.iter().filter(|v| !v.is_zero()).count() > 1) {
                    Some(b) => bad(format!("buyer {b} values several stores")),
                    None => Ok(()),
                }
            }
            CostStructure::SingleStoreCouriers => {
                for d in 0..self.couriers() {
                    let Some(h) = self.home_store(d) else { continue };
                    for (b, s) in self.orders() {
                        if self.cost(d, b, s).is_some() != (s == h) {
                            return bad(format!("courier {d} must serve every order of store {h} and nothing else"));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

type Parts = (Vec<Option<Rat>>, Vec<Option<Rat>>);

/// Splits a family of cost vectors `cost(d)[k]` as `pair[k] + courier[d]`.
fn split_column<I>(l: usize, len: usize, cost: impl Fn(usize) -> I) -> Option<Parts>
where
    I: Iterator<Item = Option<Rat>>,
{
    let rows: Vec<Vec<Option<Rat>>> = (0..l).map(|d| cost(d).collect()).collect();
    let mut pair = vec![None; len];
    let mut courier = vec![None; l];
    for row in &rows {
        // a courier serves either all or none of the orders sharing the part
        if row.iter().any(Option::is_some) && row.iter().any(Option::is_none) {
            return None;
        }
    }
    for k in 0..len {
        pair[k] = rows.iter().filter_map(|r| r[k]).min();
    }
    for (d, row) in rows.iter().enumerate() {
        let Some(first) = row.first().copied().flatten() else { continue };
        let part = first - pair[0]?;
        for k in 0..len {
            if row[k]? - pair[k]? != part {
                return None;
            }
        }
        courier[d] = Some(part);
    }
    Some((pair, courier))
}

/// Folds nonzero store costs into the values, v'_b(s) = v_b(s) − c_s, clamped at
/// zero. Prices of the folded market shift back by c_s.
pub fn fold_store_costs(values: &[Vec<Rat>], store_costs: &[Rat]) -> Result<Vec<Vec<Rat>>, Error> {
    if values.iter().any(|r| r.len() != store_costs.len()) {
        return Err(Error::Input("one cost per store expected".into()));
    }
    if store_costs.iter().any(|c| *c < Rat::zero()) {
        return Err(Error::Input("negative store cost".into()));
    }
    Ok(values.iter().map(|r| r.iter().zip(store_costs).map(|(v, c)| (*v - *c).max(Rat::zero())).collect()).collect())
}

/// Three-sided allocation: buyer b buys from store s and courier d delivers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation3 {
    pub triples: BTreeSet<(usize, usize, usize)>,
}

impl Allocation3 {
    /// Checks ranges, unit demand, supply and capacity, and that each courier
    /// can serve its order.
    pub fn new(market: &ThreeSidedMarket, triples: impl IntoIterator<Item = (usize, usize, usize)>) -> Result<Self, Error> {
        let triples: BTreeSet<_> = triples.into_iter().collect();
        let (mut bs, mut ss, mut ds) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
        for &(b, s, d) in &triples {
            if b >= market.buyers() || s >= market.stores() || d >= market.couriers() {
                return Err(Error::Input(format!("trade ({b},{s},{d}) out of range")));
            }
            if !bs.insert(b) || !ss.insert(s) || !ds.insert(d) {
                return Err(Error::Input(format!("trade ({b},{s},{d}) reuses an agent")));
            }
            if market.cost(d, b, s).is_none() {
                return Err(Error::Input(format!("courier {d} cannot deliver ({b},{s})")));
            }
        }
        Ok(Allocation3 { triples })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn store_of(&self, b: usize) -> Option<usize> {
        self.triples.iter().find(|t| t.0 == b).map(|t| t.1)
    }

    pub fn buyer_of(&self, s: usize) -> Option<usize> {
        self.triples.iter().find(|t| t.1 == s).map(|t| t.0)
    }

    pub fn order_of(&self, d: usize) -> Option<(usize, usize)> {
        self.triples.iter().find(|t| t.2 == d).map(|t| (t.0, t.1))
    }

    pub fn courier_of(&self, b: usize, s: usize) -> Option<usize> {
        self.triples.iter().find(|t| t.0 == b && t.1 == s).map(|t| t.2)
    }

    /// Executed orders Ω.
    pub fn orders(&self) -> BTreeSet<(usize, usize)> {
        self.triples.iter().map(|t| (t.0, t.1)).collect()
    }

    /// Σ v_b(s) − c_d(b,s) over trades.
    pub fn welfare(&self, market: &ThreeSidedMarket) -> Rat {
        self.triples
            .iter()
            .map(|&(b, s, d)| market.value(b, s) - market.cost(d, b, s).expect("allocation was validated"))
            .sum()
    }

    pub fn delivery_cost(&self, market: &ThreeSidedMarket) -> Rat {
        self.triples.iter().map(|&(b, s, d)| market.cost(d, b, s).expect("allocation was validated")).sum()
    }
}
