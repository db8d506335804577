//! Small markets with known equilibrium behaviour.

use marketgraph_core::{int, rat, Rat};

use crate::market::ThreeSidedMarket;

/// Two buyers, one store, two couriers. Buyer 0 values the store at 3 and is
/// cheap to reach; buyer 1 values it at 10 but costs 11 or 12 to serve. The
/// optimum (welfare 3) needs a tip of 12 to deter buyer 1, while without tips
/// buyer 1 is served at welfare −1.
pub fn tip_bad() -> ThreeSidedMarket {
    ThreeSidedMarket::store_split(
        vec![vec![int(3)], vec![int(10)]],
        &[vec![int(0)], vec![int(11)]],
        &[vec![Some(int(0))], vec![Some(int(1))]],
    )
    .expect("valid market")
}

/// Two buyers, two stores, two couriers, all values 1. Each courier is cheap on
/// one order of each buyer, so no with-tip equilibrium reaches the optimum 1
/// when `kappa` is large; the best one has welfare 2 − κ.
pub fn market_clearing(kappa: Rat) -> ThreeSidedMarket {
    let half = rat(1, 2);
    let costs = vec![
        vec![vec![int(0), kappa], vec![kappa, half]],
        vec![vec![kappa, rat(49, 100)], vec![half, kappa]],
    ];
    ThreeSidedMarket::general(vec![vec![int(1); 2]; 2], costs).expect("valid market")
}

/// Two buyers, two stores, one free courier. Both buyers want a different
/// store but only one order can be delivered, so no without-tip equilibrium
/// exists; tips restore one.
pub fn no_without_tip() -> ThreeSidedMarket {
    ThreeSidedMarket::general(vec![vec![int(4), int(2)], vec![int(1), int(3)]], vec![vec![vec![int(0); 2]; 2]])
        .expect("valid market")
}
