//! Worked markets for the platform's edge-selection problem.

use marketgraph_core::{int, rat, BipartiteMarket, EdgeSet, GoodsClass, Rat};
use num_traits::{One, Zero};

/// No world edges; b_1 values s_1 at 1 and b_i values s_{i−1} and s_i at i.
pub fn chain(n: usize) -> BipartiteMarket {
    let mut v = vec![vec![Rat::zero(); n]; n];
    if n > 0 {
        v[0][0] = Rat::one();
    }
    for i in 1..n {
        v[i][i - 1] = int(i as i128 + 1);
        v[i][i] = int(i as i128 + 1);
    }
    BipartiteMarket::new(v, n, [], GoodsClass::General).expect("valid instance")
}

/// Every pair of the chain market with positive value.
pub fn chain_valued_pairs(n: usize) -> EdgeSet {
    let mut e: EdgeSet = (0..n).map(|i| (i, i)).collect();
    e.extend((1..n).map(|i| (i, i - 1)));
    e
}

/// The pairs (b_i, s_i).
pub fn chain_diagonal(n: usize) -> EdgeSet {
    (0..n).map(|i| (i, i)).collect()
}

/// Buyers b_1..b_k (indices 0..k) value the sellers s_1..s_k at 1/i; dummy
/// buyers (k..2k) value every seller at 1. All of them reach s_1..s_k through
/// world edges; dummy sellers (k..2k) have none.
pub fn conv_tight(k: usize) -> BipartiteMarket {
    let m = 2 * k;
    let mut v = Vec::with_capacity(2 * k);
    for i in 1..=k as i128 {
        v.push((0..m).map(|j| if j < k { rat(1, i) } else { Rat::zero() }).collect());
    }
    for _ in 0..k {
        v.push(vec![Rat::one(); m]);
    }
    let world: Vec<(usize, usize)> = (0..2 * k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    BipartiteMarket::new(v, m, world, GoodsClass::General).expect("valid instance")
}

/// The welfare-adding edges of [`conv_tight`]: dummy buyer i to dummy seller i.
pub fn conv_tight_edges(k: usize) -> EdgeSet {
    (0..k).map(|i| (k + i, k + i)).collect()
}

/// Single-world-seller market with values 10, 9, 3, 1: b_1–s_1, b_2–s_2,
/// b_3–s_2 and b_4–s_3 are world edges, s_4 has none.
pub fn swsh4() -> BipartiteMarket {
    let vals = [int(10), int(9), int(3), int(1)];
    BipartiteMarket::homogeneous(&vals, 4, [(0, 0), (1, 1), (2, 1), (3, 2)]).expect("valid instance")
}

/// Two buyers and two sellers: world edge b_2–s_1; b_1 values both sellers at 1,
/// b_2 values s_1 at 1 and s_2 at ε.
pub fn prm2(eps: Rat) -> BipartiteMarket {
    let v = vec![vec![Rat::one(), Rat::one()], vec![Rat::one(), eps]];
    BipartiteMarket::new(v, 2, [(1, 0)], GoodsClass::General).expect("valid instance")
}

/// One seller linked to a buyer of value 1; a second buyer of value 1 + ε has no link.
pub fn monopolization(eps: Rat) -> BipartiteMarket {
    BipartiteMarket::homogeneous(&[Rat::one(), Rat::one() + eps], 1, [(0, 0)]).expect("valid instance")
}
