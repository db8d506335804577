//! Minimum-cost flow by successive shortest paths.
//!
//! Shortest paths use Bellman-Ford on the residual graph, so arc costs may be
//! negative as long as the input has no negative cycle. Capacities are integral
//! and every augmentation is integral, which the welfare reductions rely on.

use num_traits::Zero;

use crate::rational::Rat;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cap: i64,
    pub cost: Rat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Network {
    pub nodes: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<Arc>,
}

impl Network {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        Network { nodes, source, sink, arcs: Vec::new() }
    }

    /// Adds an arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: Rat) -> usize {
        self.arcs.push(Arc { from, to, cap, cost });
        self.arcs.len() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowSolution {
    /// flow on each input arc
    pub flow: Vec<i64>,
    pub value: i64,
    pub cost: Rat,
}

struct Residual {
    head: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<Rat>,
    out: Vec<Vec<usize>>,
}

impl Residual {
    fn build(net: &Network) -> Self {
        let mut r = Residual { head: vec![], cap: vec![], cost: vec![], out: vec![vec![]; net.nodes] };
        for a in &net.arcs {
            r.out[a.from].push(r.head.len());
            r.head.push(a.to);
            r.cap.push(a.cap);
            r.cost.push(a.cost);
            r.out[a.to].push(r.head.len());
            r.head.push(a.from);
            r.cap.push(0);
            r.cost.push(-a.cost);
        }
        r
    }

    /// Cheapest residual path from `s` to `t` as a list of residual arc ids.
    fn shortest_path(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let n = self.out.len();
        let mut dist: Vec<Option<Rat>> = vec![None; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        dist[s] = Some(Rat::zero());
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                let Some(du) = dist[u] else { continue };
                for &e in &self.out[u] {
                    if self.cap[e] <= 0 {
                        continue;
                    }
                    let v = self.head[e];
                    let nd = du + self.cost[e];
                    if dist[v].is_none_or(|dv| nd < dv) {
                        dist[v] = Some(nd);
                        via[v] = Some(e);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist[t]?;
        let mut path = Vec::new();
        let mut v = t;
        while v != s {
            let e = via[v]?;
            path.push(e);
            v = self.head[e ^ 1];
            if path.len() > self.head.len() {
                return None;
            }
        }
        path.reverse();
        Some(path)
    }
}

fn check(net: &Network) -> Result<(), Error> {
    if net.source >= net.nodes || net.sink >= net.nodes {
        return Err(Error::Input("source or sink out of range".into()));
    }
    for (k, a) in net.arcs.iter().enumerate() {
        if a.from >= net.nodes || a.to >= net.nodes {
            return Err(Error::Input(format!("arc {k} has an endpoint out of range")));
        }
        if a.cap < 0 {
            return Err(Error::Input(format!("arc {k} has negative capacity")));
        }
    }
    Ok(())
}

/// Minimum-cost flows of every value 0, 1, ... up to `limit` or the maximum flow,
/// whichever is smaller. Entry `k` is an optimal flow of value `k`; each step
/// augments one unit along a cheapest residual path.
pub fn min_cost_flow_profile(net: &Network, limit: i64) -> Result<Vec<FlowSolution>, Error> {
    check(net)?;
    let mut r = Residual::build(net);
    let mut out = vec![FlowSolution { flow: vec![0; net.arcs.len()], value: 0, cost: Rat::zero() }];
    let mut cost = Rat::zero();
    let mut value = 0;
    while value < limit {
        let Some(path) = r.shortest_path(net.source, net.sink) else { break };
        for &e in &path {
            r.cap[e] -= 1;
            r.cap[e ^ 1] += 1;
            cost += r.cost[e];
        }
        value += 1;
        out.push(FlowSolution { flow: (0..net.arcs.len()).map(|k| r.cap[2 * k + 1]).collect(), value, cost });
    }
    Ok(out)
}

/// Minimum-cost flow of exactly `required` units from source to sink.
pub fn min_cost_flow(net: &Network, required: i64) -> Result<FlowSolution, Error> {
    if required < 0 {
        return Err(Error::Input("negative flow requirement".into()));
    }
    let mut profile = min_cost_flow_profile(net, required)?;
    let last = profile.pop().expect("profile starts at zero flow");
    if last.value < required {
        return Err(Error::Infeasible(format!("only {} of {required} units can be routed", last.value)));
    }
    Ok(last)
}
