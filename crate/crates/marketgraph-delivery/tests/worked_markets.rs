use marketgraph_core::{int, Rat};
use marketgraph_delivery::*;
use num_traits::Zero;

fn zeros(m: usize, n: usize) -> Vec<Vec<Rat>> {
    vec![vec![Rat::zero(); n]; m]
}

#[test]
fn tip_market_welfare_gap() {
    let mk = instances::tip_bad();
    assert_eq!(brute_force_3sided(&mk, BruteMode::OptWelfare).unwrap().value, Some(int(3)));
    let without = brute_force_3sided(&mk, BruteMode::BestWithoutTip).unwrap();
    assert_eq!(without.value, Some(int(-1)));
    assert_eq!(without.allocation.unwrap().triples, [(1, 0, 0)].into());
    assert_eq!(brute_force_3sided(&mk, BruteMode::BestWithTip).unwrap().value, Some(int(3)));
}

#[test]
fn tip_market_efficient_equilibrium() {
    let mk = instances::tip_bad();
    let (x, cert) = efficient_with_tip_equilibrium(&mk).unwrap();
    assert_eq!(x.triples, [(0, 0, 0)].into());
    assert_eq!(cert.welfare, int(3));
    assert_eq!(cert.min_tips[1][0], Some(int(12)));
    assert_eq!(cert.state.compensation[0][0], int(1));
    // the buyer matching has slack, any price in [0, 3] keeps buyer 0
    let v = verify_equilibrium(&mk, &[int(1)], &cert.state.compensation, &x, Some(&zeros(2, 1))).unwrap();
    assert!(v.is_empty(), "{v:?}");
}

#[test]
fn market_clearing_loses_welfare() {
    let mk = instances::market_clearing(int(3));
    assert_eq!(brute_force_3sided(&mk, BruteMode::OptWelfare).unwrap().value, Some(int(1)));
    assert_eq!(brute_force_3sided(&mk, BruteMode::BestWithTip).unwrap().value, Some(int(-1)));
    let single = Allocation3::new(&mk, [(0, 0, 0)]).unwrap();
    assert!(check_equilibrium_allocation(&mk, &single).unwrap().is_none());
}

#[test]
fn full_courier_use_is_always_supported() {
    let mk = instances::market_clearing(int(3));
    let mut seen = 0;
    for x in all_allocations(&mk).unwrap().into_iter().filter(|x| x.len() == mk.couriers()) {
        // couriers only ever settle on a cheapest cover of the orders
        let cheapest = min_cover_cost(&mk, &x.orders()).unwrap() == x.delivery_cost(&mk);
        assert_eq!(check_equilibrium_allocation(&mk, &x).unwrap().is_some(), cheapest, "{x:?}");
        seen += usize::from(cheapest);
    }
    assert!(seen > 0);
}

#[test]
fn no_without_tip_equilibrium() {
    let mk = instances::no_without_tip();
    let without = brute_force_3sided(&mk, BruteMode::BestWithoutTip).unwrap();
    assert_eq!(without.value, None);
    assert_eq!(without.supported, 0);
    assert!(brute_force_3sided(&mk, BruteMode::BestWithTip).unwrap().value.is_some());

    let x = Allocation3::new(&mk, [(0, 0, 0)]).unwrap();
    let mut w = zeros(2, 2);
    w[0][0] = int(4);
    let v = verify_equilibrium(&mk, &[int(1), int(0)], &w, &x, Some(&zeros(2, 2))).unwrap();
    assert!(v.is_empty(), "{v:?}");
}

#[test]
fn profit_one_store() {
    let mk = ThreeSidedMarket::single_store(vec![vec![int(5)], vec![int(3)]], &[0], &[vec![int(2), int(2)]]).unwrap();
    let plan = without_tip_profit_max(&mk).unwrap();
    assert_eq!((plan.state.prices[0], plan.state.compensation[0][0], plan.profit), (int(5), int(2), int(3)));
    assert_eq!(brute_force_3sided(&mk, BruteMode::MaxProfit).unwrap().value, Some(int(3)));
}

#[test]
fn profit_prefers_cheap_stores() {
    let values = vec![vec![int(6); 3]; 2];
    let mk = ThreeSidedMarket::single_store(values, &[0, 1, 2], &[vec![int(4); 2], vec![int(1); 2], vec![int(2); 2]]).unwrap();
    let plan = without_tip_profit_max(&mk).unwrap();
    let stores: Vec<usize> = plan.allocation.triples.iter().map(|t| t.1).collect();
    assert!(!stores.contains(&0), "{stores:?}");
    assert_eq!(plan.profit, int(-3));
    assert_eq!(brute_force_3sided(&mk, BruteMode::MaxProfit).unwrap().value, Some(plan.profit));
}

#[test]
fn single_minded_cheaper_courier() {
    let costs = vec![vec![vec![Some(int(2))]], vec![vec![Some(int(5))]]];
    let mk = ThreeSidedMarket::new(vec![vec![int(10)]], costs, CostStructure::SingleMindedBuyers).unwrap();
    assert_eq!(optimal_welfare_single_minded(&mk).unwrap().1, int(8));
    let (_, cert) = efficient_with_tip_equilibrium(&mk).unwrap();
    assert_eq!(cert.welfare, int(8));
}

#[test]
fn store_costs_fold() {
    let v = fold_store_costs(&[vec![int(5), int(1)]], &[int(2), int(3)]).unwrap();
    assert_eq!(v, vec![vec![int(3), int(0)]]);
}
