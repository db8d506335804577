//! Worked markets from the platform-fee analysis.

use marketgraph_core::{int, rat, BipartiteMarket, GoodsClass, Rat};
use num_traits::{One, Zero};

/// Four buyers A–D, three sellers a–c; no pure equilibrium at α = 1/2.
/// World links A–a, B–b, C–c at value 1; off-world values B–a 3.05, B–c 1.15,
/// C–b 1.1, D–c 0.05.
pub fn no_pure() -> BipartiteMarket {
    let z = Rat::zero();
    let values = vec![
        vec![int(1), z, z],
        vec![rat(61, 20), int(1), rat(23, 20)],
        vec![z, rat(11, 10), int(1)],
        vec![z, z, rat(1, 20)],
    ];
    BipartiteMarket::new(values, 3, [(0, 0), (1, 1), (2, 2)], GoodsClass::General).expect("valid instance")
}

/// n buyers valuing every seller at n/i (the first at n + ε); n sellers; no world edges.
pub fn logn(n: usize, eps: Rat) -> BipartiteMarket {
    let vals: Vec<Rat> = (1..=n as i128)
        .map(|i| if i == 1 { int(n as i128) + eps } else { rat(n as i128, i) })
        .collect();
    BipartiteMarket::homogeneous(&vals, n, []).expect("valid instance")
}

/// Three world pairs of value 1 plus a rotated off-world perfect matching valued
/// (2 − α)/(1 − α) − ε; staying off the platform is an equilibrium at fee α.
pub fn tight_poa(alpha: Rat, eps: Rat) -> BipartiteMarket {
    let x = (int(2) - alpha) / (Rat::one() - alpha) - eps;
    let z = Rat::zero();
    let one = Rat::one();
    // buyers A, B, C; sellers a, b, c; B–a, A–c, C–b off-world
    let values = vec![vec![one, z, x], vec![x, one, z], vec![z, x, one]];
    BipartiteMarket::new(values, 3, [(0, 0), (1, 1), (2, 2)], GoodsClass::General).expect("valid instance")
}
