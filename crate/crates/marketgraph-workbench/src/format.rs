//! JSON instance files. Graph-market numbers are written as exact `"p/q"`
//! strings; bundling qualities are plain floats.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::Path;

use marketgraph_core::{fmt_rat, parse_rat, BipartiteMarket, Error, GoodsClass, Rat};
use marketgraph_delivery::{CostStructure, ThreeSidedMarket};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational stored as a `"p/q"` string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Q(pub Rat);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map(Q).map_err(serde::de::Error::custom)
    }
}

fn qs(row: &[Rat]) -> Vec<Q> {
    row.iter().copied().map(Q).collect()
}

fn rats(row: &[Q]) -> Vec<Rat> {
    row.iter().map(|q| q.0).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Bipartite,
    ThreeSided,
    Bundling,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Bipartite => "bipartite",
            Kind::ThreeSided => "three_sided",
            Kind::Bundling => "bundling",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// generator parameters, when the file came from a generator
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goods {
    General,
    Homogeneous,
    Identity,
}

impl From<GoodsClass> for Goods {
    fn from(g: GoodsClass) -> Self {
        match g {
            GoodsClass::General => Goods::General,
            GoodsClass::Homogeneous => Goods::Homogeneous,
            GoodsClass::Identity => Goods::Identity,
        }
    }
}

impl From<Goods> for GoodsClass {
    fn from(g: Goods) -> Self {
        match g {
            Goods::General => GoodsClass::General,
            Goods::Homogeneous => GoodsClass::Homogeneous,
            Goods::Identity => GoodsClass::Identity,
        }
    }
}

/// Buyers × sellers market with world edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BipartitePayload {
    pub goods: Goods,
    pub sellers: usize,
    /// values[buyer][seller]
    pub values: Vec<Vec<Q>>,
    #[serde(default)]
    pub world_edges: Vec<(usize, usize)>,
    /// platform edges used by the worked example, if any
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub platform_edges: Option<Vec<(usize, usize)>>,
    /// fee used by the worked example, if any
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Q>,
}

impl BipartitePayload {
    pub fn from_market(market: &BipartiteMarket) -> Self {
        BipartitePayload {
            goods: market.goods_class().into(),
            sellers: market.sellers(),
            values: market.values().iter().map(|r| qs(r)).collect(),
            world_edges: market.world_edges().iter().copied().collect(),
            platform_edges: None,
            alpha: None,
        }
    }

    pub fn market(&self) -> Result<BipartiteMarket, Error> {
        let values = self.values.iter().map(|r| rats(r)).collect();
        BipartiteMarket::new(values, self.sellers, self.world_edges.iter().copied(), self.goods.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    General,
    StoreSplit,
    BuyerSplit,
    SingleMindedBuyers,
    SingleStoreCouriers,
}

impl From<CostStructure> for Structure {
    fn from(c: CostStructure) -> Self {
        match c {
            CostStructure::General => Structure::General,
            CostStructure::StoreSplit => Structure::StoreSplit,
            CostStructure::BuyerSplit => Structure::BuyerSplit,
            CostStructure::SingleMindedBuyers => Structure::SingleMindedBuyers,
            CostStructure::SingleStoreCouriers => Structure::SingleStoreCouriers,
        }
    }
}

impl From<Structure> for CostStructure {
    fn from(s: Structure) -> Self {
        match s {
            Structure::General => CostStructure::General,
            Structure::StoreSplit => CostStructure::StoreSplit,
            Structure::BuyerSplit => CostStructure::BuyerSplit,
            Structure::SingleMindedBuyers => CostStructure::SingleMindedBuyers,
            Structure::SingleStoreCouriers => CostStructure::SingleStoreCouriers,
        }
    }
}

/// Buyers, stores and couriers; `null` marks a courier that cannot deliver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeSidedPayload {
    pub structure: Structure,
    /// values[buyer][store]
    pub values: Vec<Vec<Q>>,
    /// costs[courier][buyer][store]
    pub costs: Vec<Vec<Vec<Option<Q>>>>,
}

impl ThreeSidedPayload {
    pub fn from_market(market: &ThreeSidedMarket) -> Self {
        ThreeSidedPayload {
            structure: market.structure().into(),
            values: market.values().iter().map(|r| qs(r)).collect(),
            costs: market.costs().iter().map(|t| t.iter().map(|r| r.iter().map(|c| c.map(Q)).collect()).collect()).collect(),
        }
    }

    pub fn market(&self) -> Result<ThreeSidedMarket, Error> {
        let values = self.values.iter().map(|r| rats(r)).collect();
        let costs = self.costs.iter().map(|t| t.iter().map(|r| r.iter().map(|c| c.map(|q| q.0)).collect()).collect()).collect();
        ThreeSidedMarket::new(values, costs, self.structure.into())
    }
}

/// Seller qualities with a common noise level, and optionally a uniform prior
/// over qualities for the procurement mechanism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundlingPayload {
    pub sigma: f64,
    pub qualities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<(f64, f64)>,
}

impl BundlingPayload {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::Input(format!("sigma must be finite and nonnegative, got {}", self.sigma)));
        }
        if let Some(i) = self.qualities.iter().position(|q| !(q.is_finite() && *q > 0.0)) {
            return Err(Error::Input(format!("quality {i} must be finite and positive")));
        }
        if let Some((lo, hi)) = self.prior {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return Err(Error::Input(format!("prior [{lo}, {hi}] is not an interval of nonnegative reals")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Bipartite(BipartitePayload),
    ThreeSided(ThreeSidedPayload),
    Bundling(BundlingPayload),
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub metadata: Metadata,
    pub payload: Payload,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire<P> {
    kind: Kind,
    metadata: Metadata,
    payload: P,
}

#[derive(Deserialize)]
struct Header {
    kind: Kind,
}

impl InstanceFile {
    pub fn kind(&self) -> Kind {
        match self.payload {
            Payload::Bipartite(_) => Kind::Bipartite,
            Payload::ThreeSided(_) => Kind::ThreeSided,
            Payload::Bundling(_) => Kind::Bundling,
        }
    }

    pub fn name(&self) -> &str {
        &self.metadata.name
    }

    fn wrong_kind(&self, want: Kind) -> Error {
        Error::Input(format!("instance {:?} is {}, expected {}", self.metadata.name, self.kind().name(), want.name()))
    }

    pub fn bipartite(&self) -> Result<&BipartitePayload, Error> {
        match &self.payload {
            Payload::Bipartite(p) => Ok(p),
            _ => Err(self.wrong_kind(Kind::Bipartite)),
        }
    }

    pub fn three_sided(&self) -> Result<&ThreeSidedPayload, Error> {
        match &self.payload {
            Payload::ThreeSided(p) => Ok(p),
            _ => Err(self.wrong_kind(Kind::ThreeSided)),
        }
    }

    pub fn bundling(&self) -> Result<&BundlingPayload, Error> {
        match &self.payload {
            Payload::Bundling(p) => Ok(p),
            _ => Err(self.wrong_kind(Kind::Bundling)),
        }
    }

    /// Checks that the payload describes a valid market.
    pub fn validate(&self) -> Result<(), Error> {
        let res = match &self.payload {
            Payload::Bipartite(p) => p.market().map(drop),
            Payload::ThreeSided(p) => p.market().map(drop),
            Payload::Bundling(p) => p.validate(),
        };
        res.map_err(|e| Error::Input(format!("payload: {}", strip(&e))))
    }
}

/// Error message without the variant prefix, for nesting.
fn strip(e: &Error) -> String {
    match e {
        Error::Input(s) | Error::Domain(s) | Error::Infeasible(s) | Error::Limit(s) | Error::Invariant(s) => s.clone(),
    }
}

impl Serialize for InstanceFile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let metadata = self.metadata.clone();
        match &self.payload {
            Payload::Bipartite(p) => Wire { kind: Kind::Bipartite, metadata, payload: p }.serialize(s),
            Payload::ThreeSided(p) => Wire { kind: Kind::ThreeSided, metadata, payload: p }.serialize(s),
            Payload::Bundling(p) => Wire { kind: Kind::Bundling, metadata, payload: p }.serialize(s),
        }
    }
}

/// Typed parse that reports the JSON path, line and column of the first error.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, Error> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        Error::Input(format!("{path}: {}", e.into_inner()))
    })?;
    de.end().map_err(|e| Error::Input(e.to_string()))?;
    Ok(value)
}

pub fn from_str(text: &str) -> Result<InstanceFile, Error> {
    let header: Header = parse_json(text)?;
    let (metadata, payload) = match header.kind {
        Kind::Bipartite => {
            let w: Wire<BipartitePayload> = parse_json(text)?;
            (w.metadata, Payload::Bipartite(w.payload))
        }
        Kind::ThreeSided => {
            let w: Wire<ThreeSidedPayload> = parse_json(text)?;
            (w.metadata, Payload::ThreeSided(w.payload))
        }
        Kind::Bundling => {
            let w: Wire<BundlingPayload> = parse_json(text)?;
            (w.metadata, Payload::Bundling(w.payload))
        }
    };
    let file = InstanceFile { metadata, payload };
    file.validate()?;
    Ok(file)
}

pub fn to_string(file: &InstanceFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("instance files always serialize");
    s.push('\n');
    s
}

pub fn load(path: &Path) -> Result<InstanceFile, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    from_str(&text).map_err(|e| Error::Input(format!("{}: {}", path.display(), strip(&e))))
}

pub fn load_reader(mut r: impl Read) -> Result<InstanceFile, Error> {
    let mut text = String::new();
    r.read_to_string(&mut text).map_err(|e| Error::Input(format!("reading instance: {e}")))?;
    from_str(&text)
}

pub fn save(path: &Path, file: &InstanceFile) -> Result<(), Error> {
    std::fs::write(path, to_string(file)).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

impl fmt::Display for InstanceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_string(self))
    }
}
