//! Batch checks: evaluate named operations on instances and compare with
//! expected values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use marketgraph_bundling::{
    alpha_zero, complete_info_optimal_bundle, monopoly_rev, surrogate_threshold_mechanism, two_quality_inhouse, PostedPrice,
    Quality, QualityMix, UniformPrior, QUANTILE_GRID,
};
use marketgraph_core::rational::to_f64;
use marketgraph_core::{fmt_rat, parse_rat, EdgeSet, Error, Rat};
use marketgraph_delivery::{brute_force_3sided, efficient_with_tip_equilibrium, without_tip_profit_max, BruteMode};
use marketgraph_disruption::oracle::brute_force_subsets;
use marketgraph_disruption::{greedy_welfare_to_revenue, homogeneous_extract, platform_revenue, shgb_optimal, single_pair_max_revenue, swsh_optimal};
use marketgraph_fees::{
    best_response_audit, enumerate_pure_equilibria, find_pure_equilibrium, platform_revenue_and_poa, Audit, SellerSet,
};
use serde::Deserialize;

use crate::format::{self, InstanceFile};
use crate::generators::generate;
use crate::table::{Cell, Table};

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub checks: Vec<Check>,
}

/// Either a generator call or a path relative to the config file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceRef {
    #[serde(default)]
    pub generate: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub id: String,
    #[serde(default)]
    pub instance: Option<InstanceRef>,
    pub op: String,
    #[serde(default)]
    pub args: BTreeMap<String, String>,
    /// a rational, a float, free text, or `none` for an absent value
    pub expected: String,
    /// absolute tolerance; rationals compare exactly without one
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Observed {
    Exact(Rat),
    Float(f64),
    Text(String),
    Missing,
}

impl Observed {
    pub fn render(&self) -> String {
        match self {
            Observed::Exact(r) => fmt_rat(r),
            Observed::Float(x) => x.to_string(),
            Observed::Text(s) => s.clone(),
            Observed::Missing => "none".into(),
        }
    }

    /// Whether the value matches `expected` within `tolerance`.
    pub fn matches(&self, expected: &str, tolerance: Option<f64>) -> bool {
        let float = |s: &str| s.trim().parse::<f64>().ok().or_else(|| parse_rat(s).ok().map(|r| to_f64(&r)));
        match self {
            Observed::Missing => expected.trim() == "none",
            Observed::Text(s) => s == expected.trim(),
            Observed::Exact(r) => match tolerance {
                None => parse_rat(expected).is_ok_and(|e| e == *r),
                Some(t) => float(expected).is_some_and(|e| (to_f64(r) - e).abs() <= t),
            },
            Observed::Float(x) => float(expected).is_some_and(|e| (x - e).abs() <= tolerance.unwrap_or(1e-9)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRow {
    pub id: String,
    pub op: String,
    pub observed: String,
    pub expected: String,
    pub tolerance: Option<f64>,
    pub pass: bool,
    /// error text when the operation itself failed
    pub detail: String,
}

struct Args<'a>(&'a BTreeMap<String, String>);

impl Args<'_> {
    fn get(&self, key: &str) -> Result<&str, Error> {
        self.0.get(key).map(String::as_str).ok_or_else(|| Error::Input(format!("missing argument {key:?}")))
    }

    fn float(&self, key: &str) -> Result<f64, Error> {
        let s = self.get(key)?;
        s.trim().parse().map_err(|_| Error::Input(format!("argument {key}: not a number: {s:?}")))
    }

    fn count(&self, key: &str) -> Result<usize, Error> {
        let s = self.get(key)?;
        s.trim().parse().map_err(|_| Error::Input(format!("argument {key}: not a count: {s:?}")))
    }

    fn count_or(&self, key: &str, default: usize) -> Result<usize, Error> {
        if self.0.contains_key(key) { self.count(key) } else { Ok(default) }
    }

    fn alpha(&self, inst: &InstanceFile) -> Result<Rat, Error> {
        match self.0.get("alpha") {
            Some(s) => parse_rat(s),
            None => inst.bipartite()?.alpha.map(|q| q.0).ok_or_else(|| Error::Input("missing argument \"alpha\"".into())),
        }
    }

    /// `sellers`: comma-separated indices, empty for nobody.
    fn sellers(&self) -> Result<SellerSet, Error> {
        parse_indices(self.get("sellers")?)
    }

    /// `edges`: `platform` for the instance's own edge set, or `b-s` pairs
    /// separated by `;`.
    fn edges(&self, inst: &InstanceFile) -> Result<EdgeSet, Error> {
        let s = self.0.get("edges").map_or("platform", String::as_str);
        if s == "platform" {
            let b = inst.bipartite()?;
            return b
                .platform_edges
                .as_ref()
                .map(|e| e.iter().copied().collect())
                .ok_or_else(|| Error::Input("instance has no platform edges".into()));
        }
        parse_pairs(s)
    }
}

pub fn parse_indices(s: &str) -> Result<SellerSet, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Input(format!("not an index: {t:?}"))))
        .collect()
}

pub fn parse_pairs(s: &str) -> Result<EdgeSet, Error> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let bad = || Error::Input(format!("not a buyer-seller pair: {t:?}"));
            let (b, j) = t.split_once('-').ok_or_else(bad)?;
            Ok((b.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn posted(s: &str) -> Result<PostedPrice, Error> {
    [PostedPrice::Zero, PostedPrice::Low, PostedPrice::High]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| Error::Input(format!("unknown posted price {s:?}")))
}

fn quality(s: &str) -> Result<Quality, Error> {
    [Quality::Low, Quality::High]
        .into_iter()
        .find(|q| q.name() == s)
        .ok_or_else(|| Error::Input(format!("unknown quality {s:?}")))
}

fn mix(a: &Args) -> Result<QualityMix, Error> {
    QualityMix::new(a.count("n")?, a.count("nl")?, a.float("mul")?, a.float("muh")?, a.float("sigma")?)
}

/// Operations a check may name.
pub const OPS: [&str; 24] = [
    "fees.pure_equilibria",
    "fees.eq_revenue",
    "fees.revenue",
    "fees.poa",
    "fees.audit_cycle",
    "disrupt.revenue",
    "disrupt.welfare",
    "disrupt.brute_revenue",
    "disrupt.greedy_revenue",
    "disrupt.swsh_revenue",
    "disrupt.shgb_revenue",
    "disrupt.extract_revenue",
    "disrupt.pair_price",
    "delivery.opt_welfare",
    "delivery.best_with_tip",
    "delivery.best_without_tip",
    "delivery.max_profit",
    "delivery.flow_welfare",
    "delivery.profit",
    "bundle.rev",
    "bundle.alpha0",
    "bundle.optimal",
    "bundle.mechanism_profit",
    "bundle.inhouse",
];

fn need(inst: Option<&InstanceFile>) -> Result<&InstanceFile, Error> {
    inst.ok_or_else(|| Error::Input("operation needs an instance".into()))
}

/// Evaluates one operation.
pub fn evaluate(op: &str, instance: Option<&InstanceFile>, args: &BTreeMap<String, String>) -> Result<Observed, Error> {
    let a = Args(args);
    let bip = || need(instance).and_then(|i| i.bipartite()?.market());
    let three = || need(instance).and_then(|i| i.three_sided()?.market());
    let brute = |mode| -> Result<Observed, Error> {
        Ok(brute_force_3sided(&three()?, mode)?.value.map_or(Observed::Missing, Observed::Exact))
    };
    Ok(match op {
        "fees.pure_equilibria" => {
            let alpha = a.alpha(need(instance)?)?;
            Observed::Exact(Rat::from_integer(enumerate_pure_equilibria(&bip()?, alpha)?.len() as i128))
        }
        "fees.eq_revenue" => {
            let (mk, alpha) = (bip()?, a.alpha(need(instance)?)?);
            let p = find_pure_equilibrium(&mk, alpha)?;
            Observed::Exact(platform_revenue_and_poa(&mk, alpha, &p)?.revenue)
        }
        "fees.revenue" => {
            let alpha = a.alpha(need(instance)?)?;
            Observed::Exact(platform_revenue_and_poa(&bip()?, alpha, &a.sellers()?)?.revenue)
        }
        "fees.poa" => {
            let alpha = a.alpha(need(instance)?)?;
            platform_revenue_and_poa(&bip()?, alpha, &a.sellers()?)?.poa.map_or(Observed::Missing, Observed::Exact)
        }
        "fees.audit_cycle" => {
            let alpha = a.alpha(need(instance)?)?;
            match best_response_audit(&bip()?, alpha, a.count_or("max_iters", 100)?)? {
                Audit::Cycle { profiles } => Observed::Exact(Rat::from_integer(profiles.len() as i128)),
                Audit::Converged { .. } => Observed::Exact(Rat::from_integer(0)),
                Audit::Exhausted { .. } => Observed::Missing,
            }
        }
        "disrupt.revenue" => Observed::Exact(platform_revenue(&bip()?, &a.edges(need(instance)?)?)?.revenue),
        "disrupt.welfare" => Observed::Exact(platform_revenue(&bip()?, &a.edges(need(instance)?)?)?.welfare),
        "disrupt.brute_revenue" => Observed::Exact(brute_force_subsets(&bip()?, a.count_or("max_pairs", 20)?)?.revenue),
        "disrupt.greedy_revenue" => Observed::Exact(greedy_welfare_to_revenue(&bip()?, &a.edges(need(instance)?)?)?.revenue),
        "disrupt.swsh_revenue" => Observed::Exact(swsh_optimal(&bip()?)?.revenue),
        "disrupt.shgb_revenue" => Observed::Exact(shgb_optimal(&bip()?)?.revenue),
        "disrupt.extract_revenue" => Observed::Exact(homogeneous_extract(&bip()?)?.revenue),
        "disrupt.pair_price" => Observed::Exact(single_pair_max_revenue(&bip()?, a.count("buyer")?, a.count("seller")?)?.price),
        "delivery.opt_welfare" => brute(BruteMode::OptWelfare)?,
        "delivery.best_with_tip" => brute(BruteMode::BestWithTip)?,
        "delivery.best_without_tip" => brute(BruteMode::BestWithoutTip)?,
        "delivery.max_profit" => brute(BruteMode::MaxProfit)?,
        "delivery.flow_welfare" => Observed::Exact(efficient_with_tip_equilibrium(&three()?)?.1.welfare),
        "delivery.profit" => Observed::Exact(without_tip_profit_max(&three()?)?.profit),
        "bundle.rev" => Observed::Float(monopoly_rev(a.float("mu")?, a.float("sigma")?)?.rev),
        "bundle.alpha0" => Observed::Float(alpha_zero()),
        "bundle.optimal" => {
            let b = need(instance)?.bundling()?;
            let choice = complete_info_optimal_bundle(&b.qualities, b.sigma)?;
            match a.0.get("field").map(String::as_str) {
                Some("members") => {
                    Observed::Text(choice.members.iter().map(|&i| b.qualities[i].to_string()).collect::<Vec<_>>().join(","))
                }
                None | Some("profit") => Observed::Float(choice.profit),
                Some(f) => return Err(Error::Input(format!("unknown field {f:?}"))),
            }
        }
        "bundle.mechanism_profit" => {
            let prior = UniformPrior::new(a.float("lo")?, a.float("hi")?)?;
            let (_, profit) = surrogate_threshold_mechanism(&prior, a.float("sigma")?, a.count("n")?, QUANTILE_GRID)?;
            Observed::Float(profit)
        }
        "bundle.inhouse" => {
            let m = mix(&a)?;
            match a.0.get("price") {
                Some(p) => Observed::Float(m.profit(posted(p)?, a.count("produce")?, quality(a.get("quality")?)?)),
                None => Observed::Float(two_quality_inhouse(&m, a.count("cap")?).profit),
            }
        }
        _ => return Err(Error::Input(format!("unknown operation {op:?}"))),
    })
}

fn resolve(r: &InstanceRef, base: &Path) -> Result<InstanceFile, Error> {
    match (&r.generate, &r.path) {
        (Some(id), None) => generate(id, &r.params),
        (None, Some(p)) => format::load(&base.join(p)),
        _ => Err(Error::Input("an instance names exactly one of generate or path".into())),
    }
}

fn run_check(check: &Check, instance: Option<&InstanceFile>) -> SuiteRow {
    let (observed, pass, detail) = match evaluate(&check.op, instance, &check.args) {
        Ok(v) => {
            let pass = v.matches(&check.expected, check.tolerance);
            (v.render(), pass, String::new())
        }
        Err(e) => ("error".into(), false, e.to_string()),
    };
    SuiteRow {
        id: check.id.clone(),
        op: check.op.clone(),
        observed,
        expected: check.expected.clone(),
        tolerance: check.tolerance,
        pass,
        detail,
    }
}

/// Runs every check, spread over the available cores, and returns the rows
/// sorted by id. Instances are resolved first, relative to `base`; a missing
/// one is an error for the whole suite.
pub fn run_suite(config: &SuiteConfig, base: &Path) -> Result<Vec<SuiteRow>, Error> {
    let instances: Vec<Option<InstanceFile>> = config
        .checks
        .iter()
        .map(|c| {
            c.instance.as_ref().map(|r| resolve(r, base).map_err(|e| Error::Input(format!("check {}: {e}", c.id)))).transpose()
        })
        .collect::<Result<_, _>>()?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).max(1);
    let chunk = config.checks.len().div_ceil(workers).max(1);
    let jobs: Vec<(&Check, Option<&InstanceFile>)> = config.checks.iter().zip(instances.iter().map(Option::as_ref)).collect();
    let mut rows: Vec<SuiteRow> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|(c, i)| run_check(c, *i)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("check thread panicked")).collect()
    });
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(rows)
}

pub fn load_config(path: &Path) -> Result<SuiteConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    format::parse_json(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

pub fn rows_table(rows: &[SuiteRow]) -> Table {
    let mut t = Table::new(&["id", "op", "observed", "expected", "tolerance", "pass", "detail"]);
    for r in rows {
        t.push(vec![
            r.id.as_str().into(),
            r.op.as_str().into(),
            r.observed.as_str().into(),
            r.expected.as_str().into(),
            r.tolerance.map_or(Cell::Null, Cell::Float),
            r.pass.into(),
            r.detail.as_str().into(),
        ]);
    }
    t
}
