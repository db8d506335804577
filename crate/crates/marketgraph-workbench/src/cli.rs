//! The `marketgraph` command line. Exit codes: 0 success, 1 verification
//! failure, 2 input error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use marketgraph_bundling::{
    complete_info_optimal_bundle, inhouse_options, monopoly_rev, monte_carlo_profit, surrogate_curve,
    surrogate_threshold_mechanism, two_quality_inhouse, QualityMix, UniformPrior, QUANTILE_GRID,
};
use marketgraph_core::{fmt_rat, parse_rat, EdgeSet, Error, Rat};
use marketgraph_delivery::{
    brute_force_3sided, check_equilibrium_allocation, efficient_with_tip_equilibrium, verify_equilibrium,
    without_tip_profit_max, Allocation3, BruteMode, ThreeSidedMarket,
};
use marketgraph_disruption::oracle::brute_force_subsets;
use marketgraph_disruption::{
    greedy_welfare_to_revenue, homogeneous_extract, platform_revenue, shgb_optimal, single_pair_max_revenue, swsh_optimal,
};
use marketgraph_fees::{
    best_response_audit, enumerate_pure_equilibria, find_pure_equilibrium, platform_revenue_and_poa, poa_bound, sweep_alpha,
    verify_platform_equilibrium, Audit, SellerSet,
};
use serde::Deserialize;

use crate::format::{self, InstanceFile, Q};
use crate::generators::generate;
use crate::oracle::{oracle, Limits, OracleKind, OracleReport};
use crate::suite::{load_config, parse_indices, rows_table, run_suite};
use crate::table::{Cell, Format, Table};

/// Environment variable holding the Monte-Carlo seed.
pub const SEED_VAR: &str = "MARKETGRAPH_SEED";

#[derive(Parser, Debug)]
#[command(name = "marketgraph", version, about = "Equilibria, platform revenue and bundling in matching markets")]
struct Cli {
    /// output format for every emitter
    #[arg(long, value_enum, default_value_t = FormatArg::Csv, global = true)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    JsonLines,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a named worked instance as JSON
    Generate {
        id: String,
        /// generator parameter as key=value, repeatable
        #[arg(long = "param", value_parser = key_value)]
        params: Vec<(String, String)>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Load an instance file and summarize it
    Validate { instance: Option<PathBuf> },
    /// Exhaustive oracle: platform_eq_enum, platform_edges_enum, three_sided_enum or bundle_enum
    Oracle {
        kind: String,
        instance: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Run a JSON suite of checks; exits 1 if any check fails
    Suite { config: PathBuf },
    /// Seller participation under a platform fee
    #[command(subcommand)]
    Fees(Fees),
    /// Platform edges added to a bipartite world market
    #[command(subcommand)]
    Disrupt(Disrupt),
    /// Buyer, store and courier markets with tips
    #[command(subcommand)]
    Delivery(Delivery),
    /// Bundle pricing and procurement under normal valuations
    #[command(subcommand)]
    Bundle(Bundle),
}

#[derive(Subcommand, Debug)]
enum Fees {
    /// Greedy pure equilibrium of a homogeneous market
    Eq {
        #[arg(long)]
        alpha: String,
        instance: Option<PathBuf>,
    },
    /// Equilibria found while lowering the fee from 1 to 0
    Sweep { instance: Option<PathBuf> },
    /// Best-response dynamics from nobody on the platform
    Audit {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        instance: Option<PathBuf>,
    },
    /// Revenue and price of anarchy of every pure equilibrium, or of --sellers
    Poa {
        #[arg(long)]
        alpha: String,
        /// comma-separated sellers on the platform
        #[arg(long)]
        sellers: Option<String>,
        instance: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum Disrupt {
    /// Revenue of a platform edge set given as a JSON list of [buyer, seller]
    Eval {
        #[arg(long)]
        edges: PathBuf,
        instance: Option<PathBuf>,
    },
    /// Greedy conversion of welfare into revenue
    Greedy {
        /// defaults to the instance's platform edges, else every candidate pair
        #[arg(long)]
        edges: Option<PathBuf>,
        instance: Option<PathBuf>,
    },
    /// Optimal edges when each buyer has at most one world seller
    Swsh { instance: Option<PathBuf> },
    /// Optimal edges for identity goods with buyer degree at most two
    Shgb { instance: Option<PathBuf> },
    /// Extraction of the welfare gap in homogeneous markets
    Extract { instance: Option<PathBuf> },
    /// Best price for one platform pair
    Pair {
        #[arg(long)]
        buyer: usize,
        #[arg(long)]
        seller: usize,
        instance: Option<PathBuf>,
    },
    /// Every subset of candidate platform pairs
    Brute {
        #[arg(long, default_value_t = 20)]
        max_pairs: usize,
        instance: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum Delivery {
    /// Welfare-optimal allocation with a supporting with-tip equilibrium
    Opt { instance: Option<PathBuf> },
    /// Whether an allocation (JSON list of [buyer, store, courier]) is part of a with-tip equilibrium
    CheckAlloc {
        #[arg(long)]
        alloc: PathBuf,
        instance: Option<PathBuf>,
    },
    /// Check prices, compensations, tips and allocation from a JSON file
    Verify {
        #[arg(long)]
        eq: PathBuf,
        #[arg(long)]
        with_tips: bool,
        instance: Option<PathBuf>,
    },
    /// Profit-maximizing without-tip equilibrium
    Profit { instance: Option<PathBuf> },
    /// Exhaustive search: opt-welfare, best-with-tip, best-without-tip or max-profit
    Brute {
        #[arg(long)]
        mode: String,
        instance: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum Bundle {
    /// Monopoly revenue for a normal valuation
    Rev {
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long)]
        sigma: f64,
    },
    /// Profit-maximizing bundle under complete information
    Optimal { instance: Option<PathBuf> },
    /// Threshold procurement mechanism for a uniform quality prior
    Mechanism {
        /// lo,hi
        #[arg(long)]
        prior: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Monte-Carlo markets; 0 skips the estimate
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// emit the surrogate curve instead of the summary
        #[arg(long)]
        curve: bool,
    },
    /// In-house production options in a two-quality market
    Inhouse {
        #[arg(long)]
        nl: usize,
        /// total sellers, defaults to --nl
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        mul: f64,
        #[arg(long)]
        muh: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long)]
        cap: usize,
    },
}

fn key_value(s: &str) -> Result<(String, String), String> {
    s.split_once('=').map(|(k, v)| (k.trim().to_string(), v.trim().to_string())).ok_or_else(|| format!("expected key=value, got {s:?}"))
}

/// What a command produced: rows to print and whether a check failed.
struct Outcome {
    table: Table,
    failed: bool,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome { table, failed: false }
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
}

impl Io<'_> {
    fn instance(&mut self, path: &Option<PathBuf>) -> Result<InstanceFile, Error> {
        match path {
            Some(p) if p.as_os_str() != "-" => format::load(p),
            _ => format::load_reader(&mut *self.stdin),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    format::parse_json(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn join<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> String) -> String {
    items.into_iter().map(f).collect::<Vec<_>>().join(";")
}

fn rats(v: &[Rat]) -> String {
    join(v, fmt_rat)
}

fn sellers(p: &SellerSet) -> String {
    join(p, |j| j.to_string())
}

fn pairs(e: &EdgeSet) -> String {
    join(e, |(b, s)| format!("{b}-{s}"))
}

fn triples(x: &Allocation3) -> String {
    join(&x.triples, |(b, s, d)| format!("{b}-{s}-{d}"))
}

fn matrix(m: &[Vec<Rat>]) -> String {
    m.iter().map(|r| r.iter().map(fmt_rat).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join(";")
}

fn alpha_of(s: &str) -> Result<Rat, Error> {
    parse_rat(s)
}

fn run_command(cmd: Command, io: &mut Io, out: &mut dyn Write) -> Result<Outcome, Error> {
    match cmd {
        Command::Generate { id, params, output } => {
            let file = generate(&id, &params.into_iter().collect::<BTreeMap<_, _>>())?;
            match output {
                Some(p) => format::save(&p, &file)?,
                None => out.write_all(format::to_string(&file).as_bytes()).map_err(|e| Error::Input(e.to_string()))?,
            }
            Ok(Table::new(&[]).into())
        }
        Command::Validate { instance } => {
            let f = io.instance(&instance)?;
            let size = match &f.payload {
                format::Payload::Bipartite(b) => format!("{}x{}", b.values.len(), b.sellers),
                format::Payload::ThreeSided(t) => {
                    format!("{}x{}x{}", t.values.len(), t.values.first().map_or(0, Vec::len), t.costs.len())
                }
                format::Payload::Bundling(b) => b.qualities.len().to_string(),
            };
            let mut t = Table::new(&["name", "kind", "size"]);
            t.push(vec![f.name().into(), f.kind().name().into(), size.into()]);
            Ok(t.into())
        }
        Command::Oracle { kind, instance, alpha } => {
            let kind = OracleKind::parse(&kind)?;
            let f = io.instance(&instance)?;
            let alpha = alpha.as_deref().map(alpha_of).transpose()?;
            Ok(oracle_table(oracle(kind, &f, &Limits::default(), alpha)?).into())
        }
        Command::Suite { config } => {
            let cfg = load_config(&config)?;
            let rows = run_suite(&cfg, config.parent().unwrap_or(Path::new(".")))?;
            let failed = rows.iter().any(|r| !r.pass);
            Ok(Outcome { table: rows_table(&rows), failed })
        }
        Command::Fees(f) => fees(f, io),
        Command::Disrupt(d) => disrupt(d, io),
        Command::Delivery(d) => delivery(d, io),
        Command::Bundle(b) => bundle(b, io),
    }
}

fn oracle_table(report: OracleReport) -> Table {
    match report {
        OracleReport::PlatformEquilibria { alpha, equilibria } => {
            let mut t = Table::new(&["alpha", "sellers", "revenue", "welfare", "optimal_welfare", "poa"]);
            for (p, r) in equilibria {
                t.push(vec![alpha.into(), sellers(&p).into(), r.revenue.into(), r.welfare.into(), r.optimal_welfare.into(), r.poa.into()]);
            }
            t
        }
        OracleReport::PlatformEdges(bf) => {
            let mut t = Table::new(&["revenue", "edges", "welfare", "examined"]);
            for o in &bf.optima {
                t.push(vec![bf.revenue.into(), pairs(&o.edges).into(), o.welfare.into(), bf.examined.into()]);
            }
            t
        }
        OracleReport::ThreeSided(reports) => {
            let mut t = Table::new(&["mode", "value", "allocation", "examined", "supported"]);
            for r in reports {
                let alloc = r.allocation.as_ref().map_or(Cell::Null, |x| triples(x).into());
                t.push(vec![r.mode.name().into(), r.value.into(), alloc, r.examined.into(), r.supported.into()]);
            }
            t
        }
        OracleReport::Bundle { members, profit, contiguous, window } => {
            let mut t = Table::new(&["members", "profit", "contiguous", "window_profit"]);
            t.push(vec![join(&members, |i| i.to_string()).into(), profit.into(), contiguous.into(), window.profit.into()]);
            t
        }
    }
}

fn fees(cmd: Fees, io: &mut Io) -> Result<Outcome, Error> {
    let cols = ["alpha", "sellers", "revenue", "welfare", "optimal_welfare", "poa", "bound"];
    let row = |mk, alpha: Rat, p: &SellerSet| -> Result<Vec<Cell>, Error> {
        let r = platform_revenue_and_poa(mk, alpha, p)?;
        Ok(vec![alpha.into(), sellers(p).into(), r.revenue.into(), r.welfare.into(), r.optimal_welfare.into(), r.poa.into(), poa_bound(alpha).into()])
    };
    match cmd {
        Fees::Eq { alpha, instance } => {
            let mk = io.instance(&instance)?.bipartite()?.market()?;
            let alpha = alpha_of(&alpha)?;
            let p = find_pure_equilibrium(&mk, alpha)?;
            let failed = !verify_platform_equilibrium(&mk, alpha, &p)?.is_empty();
            let mut t = Table::new(&cols);
            t.push(row(&mk, alpha, &p)?);
            Ok(Outcome { table: t, failed })
        }
        Fees::Sweep { instance } => {
            let mk = io.instance(&instance)?.bipartite()?.market()?;
            let mut t = Table::new(&cols);
            for (alpha, p) in sweep_alpha(&mk)? {
                t.push(row(&mk, alpha, &p)?);
            }
            Ok(t.into())
        }
        Fees::Audit { alpha, max_iters, instance } => {
            let mk = io.instance(&instance)?.bipartite()?.market()?;
            let mut t = Table::new(&["step", "sellers", "status"]);
            let (profiles, status) = match best_response_audit(&mk, alpha_of(&alpha)?, max_iters)? {
                Audit::Converged { profile, .. } => (vec![profile], "converged"),
                Audit::Cycle { profiles } => (profiles, "cycle"),
                Audit::Exhausted { trail } => (trail, "exhausted"),
            };
            for (k, p) in profiles.iter().enumerate() {
                t.push(vec![k.into(), sellers(p).into(), status.into()]);
            }
            Ok(t.into())
        }
        Fees::Poa { alpha, sellers: chosen, instance } => {
            let mk = io.instance(&instance)?.bipartite()?.market()?;
            let alpha = alpha_of(&alpha)?;
            let sets = match chosen {
                Some(s) => vec![parse_indices(&s)?],
                None => enumerate_pure_equilibria(&mk, alpha)?,
            };
            let mut t = Table::new(&cols);
            for p in &sets {
                t.push(row(&mk, alpha, p)?);
            }
            Ok(t.into())
        }
    }
}

fn edge_file(path: &Path) -> Result<EdgeSet, Error> {
    let list: Vec<(usize, usize)> = read_json(path)?;
    Ok(list.into_iter().collect())
}

fn disrupt(cmd: Disrupt, io: &mut Io) -> Result<Outcome, Error> {
    let plan_cols = ["revenue", "edges"];
    match cmd {
        Disrupt::Eval { edges, instance } => {
            let mk = io.instance(&instance)?.bipartite()?.market()?;
            let o = platform_revenue(&mk, &edge_file(&edges)?)?;
            let mut t = Table::new(&["revenue", "welfare", "transacting", "prices"]);
            t.push(vec![o.revenue.into(), o.welfare.into(), pairs(&o.transacting).into(), rats(&o.prices).into()]);
            Ok(t.into())
        }
        Disrupt::Greedy { edges, instance } => {
            let f = io.instance(&instance)?;
            let b = f.bipartite()?;
            let mk = b.market()?;
            let ep: EdgeSet = match (edges, &b.platform_edges) {
                (Some(p), _) => edge_file(&p)?,
                (None, Some(e)) => e.iter().copied().collect(),
                (None, None) => mk
                    .all_pairs()
                    .into_iter()
                    .filter(|&(i, j)| !mk.world_edges().contains(&(i, j)) && mk.value(i, j) > Rat::from_integer(0))
                    .collect(),
            };
            let g = greedy_welfare_to_revenue(&mk, &ep)?;
            let mut t = Table::new(&["revenue", "edges", "delta_welfare", "input_edges"]);
            t.push(vec![g.revenue.into(), pairs(&g.edges).into(), g.delta_welfare.into(), ep.len().into()]);
            Ok(t.into())
        }
        Disrupt::Swsh { instance } => {
            let p = swsh_optimal(&io.instance(&instance)?.bipartite()?.market()?)?;
            let mut t = Table::new(&plan_cols);
            t.push(vec![p.revenue.into(), pairs(&p.edges).into()]);
            Ok(t.into())
        }
        Disrupt::Shgb { instance } => {
            let p = shgb_optimal(&io.instance(&instance)?.bipartite()?.market()?)?;
            let mut t = Table::new(&plan_cols);
            t.push(vec![p.revenue.into(), pairs(&p.edges).into()]);
            Ok(t.into())
        }
        Disrupt::Extract { instance } => {
            let p = homogeneous_extract(&io.instance(&instance)?.bipartite()?.market()?)?;
            let mut t = Table::new(&["revenue", "edges", "welfare_gap"]);
            t.push(vec![p.revenue.into(), pairs(&p.edges).into(), p.welfare_gap.into()]);
            Ok(t.into())
        }
        Disrupt::Pair { buyer, seller, instance } => {
            let p = single_pair_max_revenue(&io.instance(&instance)?.bipartite()?.market()?, buyer, seller)?;
            let mut t = Table::new(&["price", "edges"]);
            t.push(vec![p.price.into(), pairs(&p.edges).into()]);
            Ok(t.into())
        }
        Disrupt::Brute { max_pairs, instance } => {
            let report = brute_force_subsets(&io.instance(&instance)?.bipartite()?.market()?, max_pairs)?;
            Ok(oracle_table(OracleReport::PlatformEdges(report)).into())
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EqFile {
    prices: Vec<Q>,
    compensation: Vec<Vec<Q>>,
    #[serde(default)]
    tips: Option<Vec<Vec<Q>>>,
    allocation: Vec<(usize, usize, usize)>,
}

fn unq(m: &[Vec<Q>]) -> Vec<Vec<Rat>> {
    m.iter().map(|r| r.iter().map(|q| q.0).collect()).collect()
}

fn delivery(cmd: Delivery, io: &mut Io) -> Result<Outcome, Error> {
    let three = |io: &mut Io, p: &Option<PathBuf>| -> Result<ThreeSidedMarket, Error> { io.instance(p)?.three_sided()?.market() };
    match cmd {
        Delivery::Opt { instance } => {
            let mk = three(io, &instance)?;
            let (x, cert) = efficient_with_tip_equilibrium(&mk)?;
            let mut t = Table::new(&["welfare", "allocation", "prices", "compensation", "tips"]);
            let st = &cert.state;
            t.push(vec![cert.welfare.into(), triples(&x).into(), rats(&st.prices).into(), matrix(&st.compensation).into(), matrix(&st.tips).into()]);
            Ok(t.into())
        }
        Delivery::CheckAlloc { alloc, instance } => {
            let mk = three(io, &instance)?;
            let list: Vec<(usize, usize, usize)> = read_json(&alloc)?;
            let x = Allocation3::new(&mk, list)?;
            let mut t = Table::new(&["supported", "welfare", "prices", "compensation", "tips"]);
            let cert = check_equilibrium_allocation(&mk, &x)?;
            match &cert {
                Some(c) => t.push(vec![
                    true.into(),
                    c.welfare.into(),
                    rats(&c.state.prices).into(),
                    matrix(&c.state.compensation).into(),
                    matrix(&c.state.tips).into(),
                ]),
                None => t.push(vec![false.into(), x.welfare(&mk).into(), Cell::Null, Cell::Null, Cell::Null]),
            }
            Ok(Outcome { table: t, failed: cert.is_none() })
        }
        Delivery::Verify { eq, with_tips, instance } => {
            let mk = three(io, &instance)?;
            let e: EqFile = read_json(&eq)?;
            let x = Allocation3::new(&mk, e.allocation)?;
            let prices: Vec<Rat> = e.prices.iter().map(|q| q.0).collect();
            let tips = match (with_tips, &e.tips) {
                (true, Some(t)) => Some(unq(t)),
                (true, None) => return Err(Error::Input("--with-tips needs a \"tips\" table".into())),
                (false, _) => None,
            };
            let v = verify_equilibrium(&mk, &prices, &unq(&e.compensation), &x, tips.as_deref())?;
            let mut t = Table::new(&["status", "condition", "agent", "detail"]);
            if v.is_empty() {
                t.push(vec!["ok".into(), Cell::Null, Cell::Null, Cell::Null]);
            }
            for viol in &v {
                t.push(vec!["violation".into(), viol.condition.name().into(), format!("{:?}", viol.agent).into(), viol.detail.as_str().into()]);
            }
            Ok(Outcome { table: t, failed: !v.is_empty() })
        }
        Delivery::Profit { instance } => {
            let plan = without_tip_profit_max(&three(io, &instance)?)?;
            let mut t = Table::new(&["profit", "allocation", "prices", "compensation", "epsilon"]);
            t.push(vec![
                plan.profit.into(),
                triples(&plan.allocation).into(),
                rats(&plan.state.prices).into(),
                matrix(&plan.state.compensation).into(),
                plan.epsilon.into(),
            ]);
            Ok(t.into())
        }
        Delivery::Brute { mode, instance } => {
            let mode = BruteMode::parse(&mode)?;
            let r = brute_force_3sided(&three(io, &instance)?, mode)?;
            Ok(oracle_table(OracleReport::ThreeSided(vec![r])).into())
        }
    }
}

fn seed() -> Result<u64, Error> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| Error::Input(format!("{SEED_VAR} must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(0),
    }
}

fn bundle(cmd: Bundle, io: &mut Io) -> Result<Outcome, Error> {
    match cmd {
        Bundle::Rev { mu, sigma } => {
            let r = monopoly_rev(mu, sigma)?;
            let mut t = Table::new(&["mu", "sigma", "rev", "price", "demand"]);
            t.push(vec![mu.into(), sigma.into(), r.rev.into(), r.price.into(), r.demand.into()]);
            Ok(t.into())
        }
        Bundle::Optimal { instance } => {
            let f = io.instance(&instance)?;
            let b = f.bundling()?;
            let c = complete_info_optimal_bundle(&b.qualities, b.sigma)?;
            let mut t = Table::new(&["members", "qualities", "profit"]);
            t.push(vec![
                join(&c.members, |i| i.to_string()).into(),
                join(&c.members, |&i| b.qualities[i].to_string()).into(),
                c.profit.into(),
            ]);
            Ok(t.into())
        }
        Bundle::Mechanism { prior, n, sigma, trials, curve } => {
            let (lo, hi) = prior.split_once(',').ok_or_else(|| Error::Input(format!("--prior expects lo,hi, got {prior:?}")))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Input(format!("not a number: {s:?}")));
            let prior = UniformPrior::new(num(lo)?, num(hi)?)?;
            if curve {
                let (q, c) = surrogate_curve(&prior, sigma, QUANTILE_GRID)?;
                let mut t = Table::new(&["quantile", "mu", "curve"]);
                for (q, c) in q.iter().zip(&c) {
                    t.push(vec![(*q).into(), prior.quantile(*q).into(), (*c).into()]);
                }
                return Ok(t.into());
            }
            let (mech, profit) = surrogate_threshold_mechanism(&prior, sigma, n, QUANTILE_GRID)?;
            let seed = seed()?;
            let est = if trials > 0 { Some(monte_carlo_profit(&mech, &prior, sigma, n, trials, seed)?) } else { None };
            let mut t = Table::new(&["threshold", "surrogate_profit", "mc_mean", "mc_stderr", "trials", "seed"]);
            t.push(vec![
                mech.threshold.map_or(Cell::Null, Cell::Float),
                profit.into(),
                est.map_or(Cell::Null, |e| e.mean.into()),
                est.map_or(Cell::Null, |e| e.stderr.into()),
                trials.into(),
                seed.into(),
            ]);
            Ok(t.into())
        }
        Bundle::Inhouse { nl, n, mul, muh, sigma, cap } => {
            let mix = QualityMix::new(n.unwrap_or(nl), nl, mul, muh, sigma)?;
            let best = two_quality_inhouse(&mix, cap);
            let mut t = Table::new(&["price", "produce", "quality", "profit", "best"]);
            for o in inhouse_options(&mix, cap) {
                let is_best = o == best;
                t.push(vec![o.price.name().into(), o.produce.into(), o.quality.name().into(), o.profit.into(), is_best.into()]);
            }
            Ok(t.into())
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) => 1,
        _ => 2,
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::JsonLines => Format::JsonLines,
    };
    let mut io = Io { stdin };
    match run_command(cli.command, &mut io, out) {
        Ok(o) => {
            if let Err(e) = o.table.write(format, out) {
                let _ = writeln!(err, "marketgraph: {e}");
                return 2;
            }
            i32::from(o.failed)
        }
        Err(e) => {
            let _ = writeln!(err, "marketgraph: {e}");
            exit_code(&e)
        }
    }
}
