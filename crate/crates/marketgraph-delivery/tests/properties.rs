use marketgraph_core::{int, Rat};
use marketgraph_delivery::*;
use num_traits::Zero;
use proptest::prelude::*;

fn rats(v: Vec<Vec<u8>>) -> Vec<Vec<Rat>> {
    v.into_iter().map(|r| r.into_iter().map(|x| int(x as i128)).collect()).collect()
}

fn table(m: usize, n: usize, hi: u8) -> impl Strategy<Value = Vec<Vec<u8>>> {
    prop::collection::vec(prop::collection::vec(0..=hi, n), m)
}

fn general(max: usize, vmax: u8, cmax: u8) -> impl Strategy<Value = ThreeSidedMarket> {
    (1..=max, 1..=max, 1..=max).prop_flat_map(move |(m, n, l)| {
        (table(m, n, vmax), prop::collection::vec(table(m, n, cmax), l))
            .prop_map(|(v, c)| ThreeSidedMarket::general(rats(v), c.into_iter().map(rats).collect()).unwrap())
    })
}

fn courier_part(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<Option<Rat>>>> {
    prop::collection::vec(prop::collection::vec(prop::option::weighted(0.8, (0u8..=3).prop_map(|c| int(c as i128))), cols), rows)
}

fn structured(max: usize) -> impl Strategy<Value = ThreeSidedMarket> {
    (1..=max, 1..=max, 1..=max, any::<bool>()).prop_flat_map(|(m, n, l, by_store)| {
        let side = if by_store { n } else { m };
        (table(m, n, 8), table(m, n, 4), courier_part(l, side)).prop_map(move |(v, pair, cour)| {
            if by_store {
                ThreeSidedMarket::store_split(rats(v), &rats(pair), &cour).unwrap()
            } else {
                ThreeSidedMarket::buyer_split(rats(v), &rats(pair), &cour).unwrap()
            }
        })
    })
}

fn single_minded(max: usize) -> impl Strategy<Value = ThreeSidedMarket> {
    (1..=max, 1..=max, 1..=max).prop_flat_map(|(m, n, l)| {
        (prop::collection::vec((0..n, 0u8..=8), m), prop::collection::vec(table(m, n, 6), l)).prop_map(move |(want, c)| {
            let mut v = vec![vec![Rat::zero(); n]; m];
            for (b, &(s, x)) in want.iter().enumerate() {
                v[b][s] = int(x as i128);
            }
            let costs = c.into_iter().map(|t| rats(t).into_iter().map(|r| r.into_iter().map(Some).collect()).collect()).collect();
            ThreeSidedMarket::new(v, costs, CostStructure::SingleMindedBuyers).unwrap()
        })
    })
}

/// Single-store couriers with every store covered.
fn single_store(max_buyers: usize) -> impl Strategy<Value = ThreeSidedMarket> {
    (1..=max_buyers, 1..=2usize, 0..=1usize).prop_flat_map(|(m, n, extra)| {
        let l = n + extra;
        (table(m, n, 4), table(l, m, 3), prop::collection::vec(0..n, extra)).prop_map(move |(v, c, more)| {
            let home: Vec<usize> = (0..n).chain(more).collect();
            ThreeSidedMarket::single_store(rats(v), &home, &rats(c)).unwrap()
        })
    })
}

fn zeros(mk: &ThreeSidedMarket) -> Vec<Vec<Rat>> {
    vec![vec![Rat::zero(); mk.stores()]; mk.buyers()]
}

fn max_cost(mk: &ThreeSidedMarket) -> Rat {
    mk.costs().iter().flatten().flatten().flatten().copied().max().unwrap_or_else(Rat::zero)
}

/// Calls `f` with every integer vector whose entries lie in `0..=hi[i]`.
fn each_grid(hi: &[i128], f: &mut impl FnMut(&[Rat])) {
    fn go(hi: &[i128], cur: &mut Vec<Rat>, f: &mut impl FnMut(&[Rat])) {
        if cur.len() == hi.len() {
            f(cur);
            return;
        }
        for k in 0..=hi[cur.len()] {
            cur.push(int(k));
            go(hi, cur, f);
            cur.pop();
        }
    }
    go(hi, &mut Vec::new(), f);
}

/// Prices on sold stores and pay on served orders, zero elsewhere.
fn layout(mk: &ThreeSidedMarket, x: &Allocation3, g: &[Rat]) -> (Vec<Rat>, Vec<Vec<Rat>>) {
    let mut p = vec![Rat::zero(); mk.stores()];
    let mut w = zeros(mk);
    for (i, &(b, s, _)) in x.triples.iter().enumerate() {
        p[s] = g[2 * i];
        w[b][s] = g[2 * i + 1];
    }
    (p, w)
}

/// Least tip, found by scanning, that gives order (b,s) a courier for whom it is
/// a favourite order with nonnegative utility.
fn scanned_tip(mk: &ThreeSidedMarket, w: &[Vec<Rat>], tips: &[Vec<Rat>], b: usize, s: usize, bound: i128) -> Option<Rat> {
    (0..=bound).map(int).find(|&t| {
        (0..mk.couriers()).any(|d| {
            let Some(c) = mk.cost(d, b, s) else { return false };
            let mine = w[b][s] + t - c;
            mine >= Rat::zero()
                && mk.orders().filter(|&o| o != (b, s)).all(|(b2, s2)| {
                    let t2 = if b2 == b { Rat::zero() } else { tips[b2][s2] };
                    mk.cost(d, b2, s2).is_none_or(|c2| w[b2][s2] + t2 - c2 <= mine)
                })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn flow_matches_exhaustive_search(mk in structured(4)) {
        let brute = brute_force_3sided(&mk, BruteMode::OptWelfare).unwrap();
        let (x, w) = optimal_welfare_structured(&mk).unwrap();
        prop_assert_eq!(Some(w), brute.value);
        prop_assert_eq!(x.welfare(&mk), w);
    }

    #[test]
    fn single_minded_flow_matches_exhaustive_search(mk in single_minded(4)) {
        let brute = brute_force_3sided(&mk, BruteMode::OptWelfare).unwrap();
        prop_assert_eq!(Some(optimal_welfare_single_minded(&mk).unwrap().1), brute.value);
    }

    #[test]
    fn efficient_equilibrium_reaches_the_optimum(mk in prop_oneof![structured(3), single_minded(3)]) {
        let opt = brute_force_3sided(&mk, BruteMode::OptWelfare).unwrap().value.unwrap();
        let (x, cert) = efficient_with_tip_equilibrium(&mk).unwrap();
        prop_assert_eq!(cert.welfare, opt);
        let v = verify_equilibrium(&mk, &cert.state.prices, &cert.state.compensation, &x, Some(&cert.state.tips)).unwrap();
        prop_assert!(v.is_empty(), "{:?}", v);
    }

    #[test]
    fn equilibria_exist(mk in general(3, 6, 4)) {
        prop_assert!(brute_force_3sided(&mk, BruteMode::BestWithTip).unwrap().value.is_some());
        if mk.couriers() >= mk.buyers().min(mk.stores()) {
            prop_assert!(brute_force_3sided(&mk, BruteMode::BestWithoutTip).unwrap().value.is_some());
        }
    }

    #[test]
    fn without_tip_certificates_pass_with_zero_tips(mk in general(3, 6, 4)) {
        for x in all_allocations(&mk).unwrap() {
            for pay in [Pay::Highest, Pay::Lowest] {
                if let Some(st) = check_without_tip_allocation(&mk, &x, pay).unwrap() {
                    let v = verify_equilibrium(&mk, &st.prices, &st.compensation, &x, Some(&zeros(&mk))).unwrap();
                    prop_assert!(v.is_empty(), "{:?}", v);
                }
            }
        }
    }

    #[test]
    fn full_courier_utilities_exceed_values(mk in general(3, 6, 4), pick in any::<prop::sample::Index>()) {
        let l = mk.couriers();
        prop_assume!(l <= mk.buyers().min(mk.stores()));
        // one full-size order set: buyer i with a rotated store
        let shift = pick.index(mk.stores());
        let omega = (0..l).map(|i| (i, (i + shift) % mk.stores())).collect();
        let plan = courier_plan_max(&mk, &omega).unwrap();
        prop_assert!(plan.utilities.iter().all(|u| *u >= mk.max_value()));
    }

    #[test]
    fn min_tip_matches_scan(mk in general(3, 4, 4), w in table(3, 3, 5), t in table(3, 3, 3), b in 0..3usize, s in 0..3usize) {
        let (m, n) = (mk.buyers(), mk.stores());
        let w: Vec<Vec<Rat>> = rats(w).into_iter().take(m).map(|r| r.into_iter().take(n).collect()).collect();
        let t: Vec<Vec<Rat>> = rats(t).into_iter().take(m).map(|r| r.into_iter().take(n).collect()).collect();
        let (b, s) = (b % m, s % n);
        prop_assert_eq!(min_tip(&mk, &w, &t, b, s), scanned_tip(&mk, &w, &t, b, s, 40));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    /// With fewer orders than couriers, an allocation is supported exactly when
    /// some integer prices and compensations with zero tips verify.
    #[test]
    fn allocation_test_matches_grid_search(mk in general(2, 3, 2), extra in 1..=2usize) {
        let mk = {
            let mut costs = mk.costs().to_vec();
            let l = mk.buyers().min(mk.stores()) + extra - 1;
            while costs.len() <= l.min(3) {
                costs.push(costs[0].clone());
            }
            ThreeSidedMarket::new(mk.values().to_vec(), costs, CostStructure::General).unwrap()
        };
        let vmax = mk.max_value().to_integer();
        for x in all_allocations(&mk).unwrap().into_iter().filter(|x| x.len() < mk.couriers()) {
            let wmax = (max_cost(&mk) * int(x.len() as i128 + 1)).to_integer();
            let hi: Vec<i128> = x.triples.iter().flat_map(|_| [vmax, wmax]).collect();
            let mut found = false;
            each_grid(&hi, &mut |g| {
                if !found {
                    let (p, w) = layout(&mk, &x, g);
                    found = verify_equilibrium(&mk, &p, &w, &x, Some(&zeros(&mk))).unwrap().is_empty();
                }
            });
            prop_assert_eq!(check_equilibrium_allocation(&mk, &x).unwrap().is_some(), found, "{:?}", x);
        }
    }

    /// Folding tips into prices and pay keeps a with-tip equilibrium, and so does
    /// raising pay to the highest courier plan afterwards.
    #[test]
    fn folding_and_highest_pay(mk in general(2, 3, 2)) {
        let vmax = mk.max_value().to_integer();
        let cmax = max_cost(&mk).to_integer();
        for x in all_allocations(&mk).unwrap() {
            // price, pay and tip on every served order
            let hi: Vec<i128> = x.triples.iter().flat_map(|_| [vmax, cmax + 1, 2]).collect();
            let mut failure = None;
            each_grid(&hi, &mut |g| {
                if failure.is_some() {
                    return;
                }
                let (mut p, mut w, mut t) = (vec![Rat::zero(); mk.stores()], zeros(&mk), zeros(&mk));
                for (i, &(b, s, _)) in x.triples.iter().enumerate() {
                    p[s] = g[3 * i];
                    w[b][s] = g[3 * i + 1];
                    t[b][s] = g[3 * i + 2];
                }
                if !verify_equilibrium(&mk, &p, &w, &x, Some(&t)).unwrap().is_empty() {
                    return;
                }
                let folded = TipState { prices: p, compensation: w, tips: t }.fold_tips(&x);
                let v = verify_equilibrium(&mk, &folded.prices, &folded.compensation, &x, Some(&folded.tips)).unwrap();
                if !v.is_empty() {
                    failure = Some(format!("fold {g:?}: {v:?}"));
                    return;
                }
                let plan = courier_plan_for(&mk, &x).unwrap().expect("verified couriers form a cheapest cover");
                let v = verify_equilibrium(&mk, &folded.prices, &plan.compensation, &x, Some(&folded.tips)).unwrap();
                if !v.is_empty() {
                    failure = Some(format!("highest pay {g:?}: {v:?}"));
                }
            });
            prop_assert!(failure.is_none(), "{:?} {:?}", x, failure);
        }
    }

    /// Every without-tip equilibrium on an integer grid also verifies with zero tips.
    #[test]
    fn without_tip_grid_is_with_tip(mk in general(2, 3, 2)) {
        let vmax = mk.max_value().to_integer();
        let cmax = max_cost(&mk).to_integer();
        for x in all_allocations(&mk).unwrap() {
            let hi: Vec<i128> = x.triples.iter().flat_map(|_| [vmax, cmax + 1]).collect();
            let mut bad = None;
            each_grid(&hi, &mut |g| {
                let (p, w) = layout(&mk, &x, g);
                if bad.is_none()
                    && verify_equilibrium(&mk, &p, &w, &x, None).unwrap().is_empty()
                    && !verify_equilibrium(&mk, &p, &w, &x, Some(&zeros(&mk))).unwrap().is_empty()
                {
                    bad = Some(g.to_vec());
                }
            });
            prop_assert!(bad.is_none(), "{:?} {:?}", x, bad);
        }
    }

    /// The profit plan matches the best profit over a grid of without-tip
    /// equilibria and the exhaustive search.
    #[test]
    fn profit_matches_grid_search(mk in single_store(3)) {
        let plan = without_tip_profit_max(&mk).unwrap();
        let vmax = mk.max_value().to_integer();
        let cmax = max_cost(&mk).to_integer();
        let mut best: Option<Rat> = None;
        for x in all_allocations(&mk).unwrap() {
            let hi: Vec<i128> = x.triples.iter().flat_map(|_| [vmax, cmax]).collect();
            each_grid(&hi, &mut |g| {
                let (p, w) = layout(&mk, &x, g);
                if verify_equilibrium(&mk, &p, &w, &x, None).unwrap().is_empty() {
                    let profit = TipState::zero_tips(p, w).profit(&x);
                    best = Some(best.map_or(profit, |b| b.max(profit)));
                }
            });
        }
        prop_assert_eq!(Some(plan.profit), best);
        prop_assert_eq!(brute_force_3sided(&mk, BruteMode::MaxProfit).unwrap().value, best);
    }
}
