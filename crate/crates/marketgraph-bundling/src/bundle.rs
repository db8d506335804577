//! Complete-information bundling: the platform pays each chosen seller its
//! standalone revenue and sells the bundle, whose value is normal with mean
//! Σμ_i and dispersion √|S|·σ.

use marketgraph_core::Error;

use crate::normal::{monopoly_rev, rev_unchecked};

/// Largest seller count the subset enumeration accepts.
pub const BUNDLE_BRUTE_LIMIT: usize = 12;

/// Revenue from selling the sellers in `qualities` as one bundle.
pub fn bundle_rev(qualities: &[f64], sigma: f64) -> Result<f64, Error> {
    if qualities.is_empty() {
        return Err(Error::Input("bundle must contain at least one seller".into()));
    }
    for &q in qualities {
        monopoly_rev(q, sigma)?;
    }
    Ok(rev_unchecked(qualities.iter().sum(), (qualities.len() as f64).sqrt() * sigma).rev)
}

/// Bundle revenue minus the standalone revenue paid to every member.
pub fn bundle_profit(qualities: &[f64], sigma: f64) -> Result<f64, Error> {
    if qualities.is_empty() {
        return Ok(0.0);
    }
    let paid: f64 = qualities.iter().map(|&q| rev_unchecked(q, sigma).rev).sum();
    Ok(bundle_rev(qualities, sigma)? - paid)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BundleChoice {
    /// chosen sellers as indices into the input, in ascending quality
    pub members: Vec<usize>,
    /// first and last position of the bundle in quality order, `None` for the
    /// empty bundle
    pub window: Option<(usize, usize)>,
    pub profit: f64,
}

fn sorted_order(qualities: &[f64], sigma: f64) -> Result<Vec<usize>, Error> {
    for &q in qualities {
        monopoly_rev(q, sigma)?;
    }
    let mut order: Vec<usize> = (0..qualities.len()).collect();
    order.sort_by(|&a, &b| qualities[a].total_cmp(&qualities[b]));
    Ok(order)
}

/// Best bundle among all windows of consecutive sellers in quality order, or
/// the empty bundle when no window earns a positive profit. Ties keep the
/// first window found (shorter start index, then shorter window).
pub fn complete_info_optimal_bundle(qualities: &[f64], sigma: f64) -> Result<BundleChoice, Error> {
    let order = sorted_order(qualities, sigma)?;
    let sorted: Vec<f64> = order.iter().map(|&i| qualities[i]).collect();
    let paid: Vec<f64> = sorted.iter().map(|&q| rev_unchecked(q, sigma).rev).collect();
    let mut best = BundleChoice { members: Vec::new(), window: None, profit: 0.0 };
    for i in 0..sorted.len() {
        let (mut mean, mut cost) = (0.0, 0.0);
        for j in i..sorted.len() {
            mean += sorted[j];
            cost += paid[j];
            let k = (j - i + 1) as f64;
            let profit = rev_unchecked(mean, k.sqrt() * sigma).rev - cost;
            if profit > best.profit {
                best = BundleChoice { members: order[i..=j].to_vec(), window: Some((i, j)), profit };
            }
        }
    }
    Ok(best)
}

/// Best bundle over all 2^N subsets (N ≤ 12). Returns the members in
/// ascending quality and the profit; ties keep the subset enumerated first.
pub fn brute_force_bundle(qualities: &[f64], sigma: f64) -> Result<(Vec<usize>, f64), Error> {
    let n = qualities.len();
    if n > BUNDLE_BRUTE_LIMIT {
        return Err(Error::Limit(format!("{n} sellers exceeds the subset-enumeration limit {BUNDLE_BRUTE_LIMIT}")));
    }
    let order = sorted_order(qualities, sigma)?;
    let paid: Vec<f64> = qualities.iter().map(|&q| rev_unchecked(q, sigma).rev).collect();
    let (mut best_mask, mut best) = (0usize, 0.0);
    for mask in 1usize..(1 << n) {
        let (mut mean, mut cost) = (0.0, 0.0);
        for (i, q) in qualities.iter().enumerate() {
            if mask >> i & 1 == 1 {
                mean += q;
                cost += paid[i];
            }
        }
        let k = mask.count_ones() as f64;
        let profit = rev_unchecked(mean, k.sqrt() * sigma).rev - cost;
        if profit > best {
            (best_mask, best) = (mask, profit);
        }
    }
    let members = order.into_iter().filter(|&i| best_mask >> i & 1 == 1).collect();
    Ok((members, best))
}

/// Smallest integer t ≥ 2 with t / (√(t − 1) + 1) > μ_H/μ_L. Bundles of at
/// least t − 1 sellers with qualities in [μ_L, μ_H] take the highest ones.
pub fn t0_threshold(mu_low: f64, mu_high: f64) -> Result<u64, Error> {
    if !(mu_low > 0.0 && mu_high > mu_low && mu_high.is_finite()) {
        return Err(Error::Input(format!("need 0 < μ_L < μ_H, got {mu_low}, {mu_high}")));
    }
    let ratio = mu_high / mu_low;
    let mut t = 2u64;
    while (t as f64) / (((t - 1) as f64).sqrt() + 1.0) <= ratio {
        t += 1;
    }
    Ok(t)
}
