//! Monte-Carlo estimate of true platform profit for a threshold mechanism.

use marketgraph_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mechanism::ThresholdMechanism;
use crate::normal::rev_unchecked;
use crate::prior::UniformPrior;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// standard error of the mean
    pub stderr: f64,
}

/// Profit of one draw: the bundle of joining sellers is sold at its optimal
/// price and each member is paid the mechanism's payment.
pub fn realized_profit(mech: &ThresholdMechanism, qualities: &[f64], sigma: f64) -> f64 {
    let joined: Vec<f64> = qualities.iter().copied().filter(|&q| mech.allocation(q)).collect();
    if joined.is_empty() {
        return 0.0;
    }
    let rev = rev_unchecked(joined.iter().sum(), (joined.len() as f64).sqrt() * sigma).rev;
    rev - joined.iter().map(|&q| mech.payment(q)).sum::<f64>()
}

/// Mean profit over `trials` independent markets of `n` sellers. Trial k
/// uses its own stream of a generator seeded with `seed`, so results do not
/// depend on evaluation order.
pub fn monte_carlo_profit(
    mech: &ThresholdMechanism,
    prior: &UniformPrior,
    sigma: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Estimate, Error> {
    if trials == 0 {
        return Err(Error::Input("need at least one trial".into()));
    }
    let draws: Vec<f64> = (0..trials)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let qualities: Vec<f64> = (0..n).map(|_| prior.quantile(rng.random::<f64>())).collect();
            realized_profit(mech, &qualities, sigma)
        })
        .collect();
    let mean = draws.iter().sum::<f64>() / trials as f64;
    let stderr = if trials > 1 {
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(Estimate { mean, stderr })
}
