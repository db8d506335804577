#![allow(dead_code)]

use std::collections::BTreeSet;

use marketgraph_core::{int, BipartiteMarket, GoodsClass, Rat};
use proptest::prelude::*;

/// Integer values in `lo..=hi`, world edges with probability about 1/3.
pub fn general_market(max_n: usize, max_m: usize, max_pairs: usize, lo: i128, hi: i128) -> impl Strategy<Value = BipartiteMarket> {
    (1..=max_n, 1..=max_m)
        .prop_filter("pair budget", move |(n, m)| n * m <= max_pairs)
        .prop_flat_map(move |(n, m)| {
            (prop::collection::vec(lo..=hi, n * m), prop::collection::vec(0u8..3, n * m)).prop_map(move |(vals, mask)| {
                let values = (0..n).map(|i| (0..m).map(|j| int(vals[i * m + j])).collect()).collect();
                let world: Vec<(usize, usize)> = (0..n * m).filter(|k| mask[*k] == 0).map(|k| (k / m, k % m)).collect();
                BipartiteMarket::new(values, m, world, GoodsClass::General).unwrap()
            })
        })
}

pub fn homogeneous_market(max_n: usize, max_m: usize, lo: i128, hi: i128) -> impl Strategy<Value = BipartiteMarket> {
    (1..=max_n, 1..=max_m).prop_flat_map(move |(n, m)| {
        (prop::collection::vec(lo..=hi, n), prop::collection::vec(0u8..3, n * m)).prop_map(move |(vals, mask)| {
            let v: Vec<Rat> = vals.into_iter().map(int).collect();
            let world: Vec<(usize, usize)> = (0..n * m).filter(|k| mask[*k] == 0).map(|k| (k / m, k % m)).collect();
            BipartiteMarket::homogeneous(&v, m, world).unwrap()
        })
    })
}

/// Homogeneous values 1..=top with at most one world seller per buyer.
pub fn swsh_market(sizes: std::ops::RangeInclusive<usize>, square: bool, top: i128) -> impl Strategy<Value = BipartiteMarket> {
    (sizes.clone(), sizes)
        .prop_map(move |(n, m)| if square { (n, n) } else { (n, m) })
        .prop_flat_map(move |(n, m)| {
            (prop::collection::vec(1i128..=top, n), prop::collection::vec(prop::option::weighted(0.75, 0..m), n))
                .prop_map(move |(vals, links)| {
                    let v: Vec<Rat> = vals.into_iter().map(int).collect();
                    let world = links.iter().enumerate().filter_map(|(i, s)| s.map(|s| (i, s)));
                    BipartiteMarket::homogeneous(&v, m, world).unwrap()
                })
        })
}

/// One common value on every pair; each buyer sees at most two sellers and no
/// two sellers share two buyers.
pub fn shgb_market(max_n: usize, max_m: usize) -> impl Strategy<Value = BipartiteMarket> {
    (1..=max_n, 1..=max_m, 1i128..=3).prop_flat_map(|(n, m, c)| {
        prop::collection::vec((0..=2usize, 0..m, 0..m), n).prop_map(move |picks| {
            let mut pairs = BTreeSet::new();
            let mut world = Vec::new();
            for (i, (deg, a, b)) in picks.into_iter().enumerate() {
                let (a, b) = (a.min(b), a.max(b));
                if deg == 2 && a != b && pairs.insert((a, b)) {
                    world.extend([(i, a), (i, b)]);
                } else if deg >= 1 {
                    world.push((i, a));
                }
            }
            BipartiteMarket::homogeneous(&vec![int(c); n], m, world).unwrap()
        })
    })
}
