use marketgraph_core::{int, rat, Rat};
use marketgraph_fees::instances::{logn, no_pure, tight_poa};
use marketgraph_fees::*;
use num_traits::{One, Zero};

fn half() -> Rat {
    rat(1, 2)
}

#[test]
fn no_pure_first_seller_prices() {
    let mk = no_pure();
    assert_eq!(on_off_prices(&mk, &SellerSet::new(), 0).unwrap(), (rat(41, 20), int(1)));
    // all three on: a's price drops to 1.95
    assert_eq!(on_off_prices(&mk, &[0, 1, 2].into(), 0).unwrap().0, rat(39, 20));
}

#[test]
fn no_pure_has_no_equilibrium_at_half() {
    let mk = no_pure();
    for mask in 0..8u32 {
        let p: SellerSet = (0..3).filter(|j| mask >> j & 1 == 1).collect();
        assert!(!verify_platform_equilibrium(&mk, half(), &p).unwrap().is_empty(), "{p:?}");
    }
    assert!(enumerate_pure_equilibria(&mk, half()).unwrap().is_empty());
}

#[test]
fn no_pure_best_responses_cycle() {
    let audit = best_response_audit(&no_pure(), half(), 50).unwrap();
    let expected: Vec<SellerSet> =
        vec![[].into(), [0].into(), [0, 1].into(), [0, 1, 2].into(), [1, 2].into(), [2].into()];
    assert_eq!(audit, Audit::Cycle { profiles: expected });
}

#[test]
fn tight_market_empty_platform_is_an_equilibrium() {
    for alpha in [rat(1, 10), rat(3, 10), half()] {
        let mk = tight_poa(alpha, rat(1, 1000));
        assert!(verify_platform_equilibrium(&mk, alpha, &SellerSet::new()).unwrap().is_empty());
        let r = platform_revenue_and_poa(&mk, alpha, &SellerSet::new()).unwrap();
        let bound = poa_bound(alpha).unwrap();
        assert_eq!(r.poa.unwrap(), bound - rat(1, 1000));
    }
}

#[test]
fn harmonic_market_at_full_fee() {
    let mk = logn(3, rat(1, 100));
    let all: SellerSet = [0, 1, 2].into();
    assert_eq!(find_pure_equilibrium(&mk, Rat::one()).unwrap(), all);
    assert!(verify_platform_equilibrium(&mk, Rat::one(), &all).unwrap().is_empty());
    assert_eq!(sweep_alpha(&mk).unwrap(), vec![(Rat::one(), all.clone())]);
    assert!(matches!(best_response_audit(&mk, Rat::one(), 20).unwrap(), Audit::Converged { .. }));
    // every subset is an equilibrium at α = 1 since no seller trades off-platform
    assert_eq!(enumerate_pure_equilibria(&mk, Rat::one()).unwrap().len(), 8);
}

#[test]
fn harmonic_market_revenue_and_poa() {
    let eps = rat(1, 100);
    let mk = logn(3, eps);
    let one = platform_revenue_and_poa(&mk, Rat::one(), &[0].into()).unwrap();
    assert_eq!(one.revenue, int(3) + eps);
    assert_eq!(one.poa.unwrap(), (int(3) + rat(3, 2) + int(1) + eps) / (int(3) + eps));
    let three = platform_revenue_and_poa(&mk, Rat::one(), &[0, 1, 2].into()).unwrap();
    assert_eq!(three.revenue, int(3));
    assert_eq!(three.poa.unwrap(), Rat::one());
}

#[test]
fn revenue_optimal_fee_picks_a_single_seller() {
    let eps = rat(1, 100);
    let mk = logn(4, eps);
    let grid: Vec<Rat> = (0..=10).map(|k| rat(k, 10)).collect();
    let best = best_fee(&mk, &grid).unwrap().unwrap();
    assert_eq!(best.alpha, Rat::one());
    assert_eq!(best.on_platform.len(), 1);
    assert_eq!(best.report.revenue, int(4) + eps);
    assert!(best.report.poa.unwrap() > Rat::one());
    assert!(best.report.welfare > Rat::zero());
}
