//! Two-quality markets where the platform posts one payment to sellers and may
//! also produce up to M items itself at a known quality.

use std::fmt;

use marketgraph_core::Error;

use crate::normal::rev_unchecked;

/// Posted payment: nothing, the low sellers' revenue, or the high sellers'.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PostedPrice {
    /// π_0 = 0, no seller joins
    Zero,
    /// π_L = Rev(μ_L, σ), only low-quality sellers join
    Low,
    /// π_H = Rev(μ_H, σ), every seller joins
    High,
}

impl PostedPrice {
    pub fn name(self) -> &'static str {
        match self {
            PostedPrice::Zero => "zero",
            PostedPrice::Low => "low",
            PostedPrice::High => "high",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Quality {
    Low,
    High,
}

impl Quality {
    pub fn name(self) -> &'static str {
        match self {
            Quality::Low => "low",
            Quality::High => "high",
        }
    }
}

/// Two-quality market: `n` sellers of which `n_low` have quality μ_L.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityMix {
    pub n: usize,
    pub n_low: usize,
    pub mu_low: f64,
    pub mu_high: f64,
    pub sigma: f64,
}

impl QualityMix {
    pub fn new(n: usize, n_low: usize, mu_low: f64, mu_high: f64, sigma: f64) -> Result<Self, Error> {
        if n_low > n {
            return Err(Error::Input(format!("{n_low} low-quality sellers out of {n}")));
        }
        if !(0.0 < mu_low && mu_low < mu_high && mu_high.is_finite()) {
            return Err(Error::Input(format!("need 0 < μ_L < μ_H, got {mu_low}, {mu_high}")));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Input(format!("dispersion must be nonnegative, got {sigma}")));
        }
        Ok(QualityMix { n, n_low, mu_low, mu_high, sigma })
    }

    fn mu(&self, q: Quality) -> f64 {
        match q {
            Quality::Low => self.mu_low,
            Quality::High => self.mu_high,
        }
    }

    pub fn price(&self, p: PostedPrice) -> f64 {
        match p {
            PostedPrice::Zero => 0.0,
            PostedPrice::Low => rev_unchecked(self.mu_low, self.sigma).rev,
            PostedPrice::High => rev_unchecked(self.mu_high, self.sigma).rev,
        }
    }

    /// Π(π, S_M) = Rev(bundle) − |S(π)|·π − m·Rev(μ_q, σ).
    pub fn profit(&self, price: PostedPrice, produce: usize, quality: Quality) -> f64 {
        let (joined, mean) = match price {
            PostedPrice::Zero => (0, 0.0),
            PostedPrice::Low => (self.n_low, self.n_low as f64 * self.mu_low),
            PostedPrice::High => {
                (self.n, self.n_low as f64 * self.mu_low + (self.n - self.n_low) as f64 * self.mu_high)
            }
        };
        let size = joined + produce;
        if size == 0 {
            return 0.0;
        }
        let mq = self.mu(quality);
        let rev = rev_unchecked(mean + produce as f64 * mq, (size as f64).sqrt() * self.sigma).rev;
        rev - joined as f64 * self.price(price) - produce as f64 * rev_unchecked(mq, self.sigma).rev
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InHousePlan {
    pub price: PostedPrice,
    pub produce: usize,
    pub quality: Quality,
    pub profit: f64,
}

impl fmt::Display for InHousePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "price {} produce {} {} profit {:.6}", self.price.name(), self.produce, self.quality.name(), self.profit)
    }
}

/// Every (price, count, quality) option with count in 1..=M, plus the three
/// options without production.
pub fn inhouse_options(mix: &QualityMix, capacity: usize) -> Vec<InHousePlan> {
    let mut out = Vec::new();
    for price in [PostedPrice::Zero, PostedPrice::Low, PostedPrice::High] {
        out.push(InHousePlan { price, produce: 0, quality: Quality::Low, profit: mix.profit(price, 0, Quality::Low) });
    }
    for produce in 1..=capacity {
        for price in [PostedPrice::Zero, PostedPrice::Low, PostedPrice::High] {
            for quality in [Quality::Low, Quality::High] {
                out.push(InHousePlan { price, produce, quality, profit: mix.profit(price, produce, quality) });
            }
        }
    }
    out
}

/// Most profitable option; ties go to fewer produced items, then the lower
/// price, then low quality.
pub fn two_quality_inhouse(mix: &QualityMix, capacity: usize) -> InHousePlan {
    let mut options = inhouse_options(mix, capacity);
    options.sort_by_key(|o| (o.produce, o.price, o.quality));
    let mut best = options[0];
    for o in options {
        if o.profit > best.profit {
            best = o;
        }
    }
    best
}

/// Large-market rule for the posted price: the low-seller share τ below which
/// posting π_H beats the alternative, and that alternative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LargeMarketRule {
    /// `None` when μ_H ≤ Rev(μ_H, σ) and π_0 is always best
    pub tau: Option<f64>,
    pub otherwise: PostedPrice,
}

pub fn large_market_rule(mu_low: f64, mu_high: f64, sigma: f64) -> LargeMarketRule {
    let (rl, rh) = (rev_unchecked(mu_low, sigma).rev, rev_unchecked(mu_high, sigma).rev);
    if mu_high <= rh {
        LargeMarketRule { tau: None, otherwise: PostedPrice::Zero }
    } else if mu_low > rl {
        LargeMarketRule { tau: Some((mu_high - rh) / (mu_high - rl)), otherwise: PostedPrice::Low }
    } else {
        LargeMarketRule { tau: Some((mu_high - rh) / (mu_high - mu_low)), otherwise: PostedPrice::Zero }
    }
}
