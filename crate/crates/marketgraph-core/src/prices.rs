//! Extreme Walrasian prices as marginal contributions to welfare.

use crate::market::{BipartiteMarket, EdgeSet};
use crate::rational::Rat;
use crate::welfare::{welfare, with_seller_copy, without_seller};

/// p̄_j = W(G) − W(G without seller j).
pub fn max_prices_table(t: &[Vec<Option<Rat>>], m: usize) -> Vec<Rat> {
    let w = welfare(t, m);
    (0..m).map(|j| w - welfare(&without_seller(t, j), m)).collect()
}

/// p̲_j = W(G with a second copy of j) − W(G).
pub fn min_prices_table(t: &[Vec<Option<Rat>>], m: usize) -> Vec<Rat> {
    let w = welfare(t, m);
    (0..m).map(|j| welfare(&with_seller_copy(t, j), m + 1) - w).collect()
}

pub fn max_walrasian_prices(market: &BipartiteMarket, edges: &EdgeSet) -> Vec<Rat> {
    max_prices_table(&market.table(edges), market.sellers())
}

pub fn min_walrasian_prices(market: &BipartiteMarket, edges: &EdgeSet) -> Vec<Rat> {
    min_prices_table(&market.table(edges), market.sellers())
}
