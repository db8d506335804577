//! Named generators for the worked markets.

use std::collections::{BTreeMap, BTreeSet};

use marketgraph_core::{fmt_rat, parse_rat, rat, int, Error, Rat};
use marketgraph_delivery::instances as delivery;
use marketgraph_disruption::instances as disruption;
use marketgraph_fees::instances as fees;

use crate::format::{BipartitePayload, BundlingPayload, InstanceFile, Metadata, Payload, ThreeSidedPayload};

/// Every recognized generator id.
pub const GENERATOR_IDS: [&str; 11] = [
    "no-pure",
    "logn",
    "tight-poa",
    "chain",
    "conv-tight",
    "swsh4",
    "prm2",
    "tip-bad",
    "no-without-tip",
    "market-clearing",
    "bundle4",
];

/// Parameter reader that records the effective values and rejects leftovers.
struct Params<'a> {
    given: &'a BTreeMap<String, String>,
    used: BTreeMap<String, String>,
}

impl<'a> Params<'a> {
    fn rat(&mut self, key: &str, default: Rat) -> Result<Rat, Error> {
        let v = match self.given.get(key) {
            Some(s) => parse_rat(s).map_err(|_| Error::Input(format!("parameter {key}: not a rational: {s:?}")))?,
            None => default,
        };
        self.used.insert(key.into(), fmt_rat(&v));
        Ok(v)
    }

    fn count(&mut self, key: &str, default: usize, lo: usize, hi: usize) -> Result<usize, Error> {
        let v = match self.given.get(key) {
            Some(s) => s.trim().parse().map_err(|_| Error::Input(format!("parameter {key}: not a count: {s:?}")))?,
            None => default,
        };
        if v < lo || v > hi {
            return Err(Error::Input(format!("parameter {key} = {v} outside {lo}..={hi}")));
        }
        self.used.insert(key.into(), v.to_string());
        Ok(v)
    }

    fn finish(self) -> Result<BTreeMap<String, String>, Error> {
        match self.given.keys().find(|k| !self.used.contains_key(*k)) {
            Some(k) => Err(Error::Input(format!("unknown parameter {k:?}"))),
            None => Ok(self.used),
        }
    }
}

fn positive(key: &str, v: Rat) -> Result<Rat, Error> {
    if v <= Rat::from_integer(0) {
        return Err(Error::Input(format!("parameter {key} must be positive")));
    }
    Ok(v)
}

fn edges(e: BTreeSet<(usize, usize)>) -> Option<Vec<(usize, usize)>> {
    Some(e.into_iter().collect())
}

/// Builds the instance for `id`. Parameters not given take their defaults;
/// the effective values are recorded in the metadata.
pub fn generate(id: &str, params: &BTreeMap<String, String>) -> Result<InstanceFile, Error> {
    let mut p = Params { given: params, used: BTreeMap::new() };
    let (description, payload) = match id {
        "no-pure" => {
            let mut b = BipartitePayload::from_market(&fees::no_pure());
            b.alpha = Some(crate::format::Q(rat(1, 2)));
            ("four buyers and three sellers without a pure platform equilibrium at fee 1/2", Payload::Bipartite(b))
        }
        "logn" => {
            let n = p.count("n", 3, 1, 40)?;
            let eps = positive("eps", p.rat("eps", rat(1, 100))?)?;
            ("n buyers valuing every seller at n/i, the first at n + eps; no world edges", Payload::Bipartite(BipartitePayload::from_market(&fees::logn(n, eps))))
        }
        "tight-poa" => {
            let alpha = p.rat("alpha", rat(1, 2))?;
            if alpha < Rat::from_integer(0) || alpha >= Rat::from_integer(1) {
                return Err(Error::Input("parameter alpha must lie in [0, 1)".into()));
            }
            let eps = positive("eps", p.rat("eps", rat(1, 1000))?)?;
            let mut b = BipartitePayload::from_market(&fees::tight_poa(alpha, eps));
            b.alpha = Some(crate::format::Q(alpha));
            ("three world pairs with a rotated off-world matching; nobody joining is an equilibrium", Payload::Bipartite(b))
        }
        "chain" => {
            let n = p.count("n", 5, 1, 40)?;
            let mut b = BipartitePayload::from_market(&disruption::chain(n));
            b.platform_edges = edges(disruption::chain_valued_pairs(n));
            ("chain market where adding every platform edge earns far less than the diagonal", Payload::Bipartite(b))
        }
        "conv-tight" => {
            let k = p.count("k", 3, 1, 10)?;
            let mut b = BipartitePayload::from_market(&disruption::conv_tight(k));
            b.platform_edges = edges(disruption::conv_tight_edges(k));
            ("k welfare-adding platform edges whose best revenue is the welfare gain over H_k", Payload::Bipartite(b))
        }
        "swsh4" => (
            "single world seller per buyer, values 10, 9, 3, 1",
            Payload::Bipartite(BipartitePayload::from_market(&disruption::swsh4())),
        ),
        "prm2" => {
            let eps = positive("eps", p.rat("eps", rat(1, 100))?)?;
            if eps >= Rat::from_integer(1) {
                return Err(Error::Input("parameter eps must be below 1".into()));
            }
            let mut b = BipartitePayload::from_market(&disruption::prm2(eps));
            b.platform_edges = Some(vec![(0, 1)]);
            ("two buyers and two sellers where revenue maximization halves welfare", Payload::Bipartite(b))
        }
        "tip-bad" => (
            "two buyers, one store, two couriers; the efficient outcome needs a tip",
            Payload::ThreeSided(ThreeSidedPayload::from_market(&delivery::tip_bad())),
        ),
        "no-without-tip" => (
            "two buyers, two stores, one courier; no equilibrium exists without tips",
            Payload::ThreeSided(ThreeSidedPayload::from_market(&delivery::no_without_tip())),
        ),
        "market-clearing" => {
            let kappa = p.rat("kappa", int(3))?;
            if kappa < Rat::from_integer(0) {
                return Err(Error::Input("parameter kappa must be nonnegative".into()));
            }
            ("two of each side with unit values; large kappa keeps every equilibrium far from the optimum", Payload::ThreeSided(ThreeSidedPayload::from_market(&delivery::market_clearing(kappa))))
        }
        "bundle4" => (
            "four sellers of qualities 0.1, 1.1, 2.1, 3.1 with unit noise",
            Payload::Bundling(BundlingPayload { sigma: 1.0, qualities: vec![0.1, 1.1, 2.1, 3.1], prior: None }),
        ),
        _ => return Err(Error::Input(format!("unknown generator {id:?}; known: {}", GENERATOR_IDS.join(", ")))),
    };
    let metadata = Metadata { name: id.into(), description: description.into(), params: p.finish()? };
    Ok(InstanceFile { metadata, payload })
}
