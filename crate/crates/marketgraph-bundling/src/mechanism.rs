//! Surrogate-optimal procurement under private seller quality: ironing the
//! virtual surplus in quantile space yields a posted-payment threshold rule.

use marketgraph_core::Error;

use crate::normal::rev_unchecked;
use crate::prior::{virtual_cost, UniformPrior};

/// Default number of quantile intervals.
pub const QUANTILE_GRID: usize = 4096;

/// Sellers with quality at most `threshold` join and are paid Rev(t, σ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdMechanism {
    /// `None` excludes every seller
    pub threshold: Option<f64>,
    pub sigma: f64,
}

impl ThresholdMechanism {
    pub fn allocation(&self, mu: f64) -> bool {
        self.threshold.is_some_and(|t| mu <= t)
    }

    pub fn payment(&self, mu: f64) -> f64 {
        match self.threshold {
            Some(t) if mu <= t => rev_unchecked(t, self.sigma).rev,
            _ => 0.0,
        }
    }
}

/// Upper concave envelope of the points (x_k, y_k), x increasing; returns the
/// indices of its vertices.
fn upper_hull(x: &[f64], y: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..x.len() {
        while hull.len() >= 2 {
            let (i, j) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop j when it lies on or below the chord from i to k
            let cross = (x[j] - x[i]) * (y[k] - y[i]) - (y[j] - y[i]) * (x[k] - x[i]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull
}

/// Surrogate profit curve ϖ′(q) = ∫_0^q (μ(s) − φ(μ(s))) ds on `grid` + 1
/// quantile nodes, by the trapezoid rule.
pub fn surrogate_curve(prior: &UniformPrior, sigma: f64, grid: usize) -> Result<(Vec<f64>, Vec<f64>), Error> {
    if prior.lo == prior.hi || grid == 0 {
        return Err(Error::Input("need a nondegenerate prior and a nonempty grid".into()));
    }
    let q: Vec<f64> = (0..=grid).map(|k| k as f64 / grid as f64).collect();
    let g: Vec<f64> = q
        .iter()
        .map(|&q| {
            let mu = prior.quantile(q);
            virtual_cost(mu, sigma, prior).map(|phi| mu - phi)
        })
        .collect::<Result<_, _>>()?;
    let mut curve = vec![0.0; q.len()];
    for k in 1..q.len() {
        curve[k] = curve[k - 1] + 0.5 * (g[k - 1] + g[k]) * (q[k] - q[k - 1]);
    }
    Ok((q, curve))
}

/// Surrogate-profit-maximizing mechanism for `n` sellers and its expected
/// surrogate profit n·E[x(μ)(μ − φ(μ))]. The ironed virtual surplus ρ is the
/// slope of the concave envelope of ϖ′; the threshold is the last quantile
/// where ρ > 0.
pub fn surrogate_threshold_mechanism(
    prior: &UniformPrior,
    sigma: f64,
    n: usize,
    grid: usize,
) -> Result<(ThresholdMechanism, f64), Error> {
    let (q, curve) = surrogate_curve(prior, sigma, grid)?;
    let hull = upper_hull(&q, &curve);
    // vertices where the envelope's slope is still positive
    let last = hull.windows(2).take_while(|w| curve[w[1]] > curve[w[0]]).last().map(|w| w[1]);
    let mech = match last {
        None => ThresholdMechanism { threshold: None, sigma },
        Some(k) => ThresholdMechanism { threshold: Some(prior.quantile(q[k])), sigma },
    };
    let profit = last.map_or(0.0, |k| n as f64 * curve[k]);
    Ok((mech, profit))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_of_a_dip() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [0.0, -1.0, 1.0, 0.5];
        assert_eq!(upper_hull(&x, &y), vec![0, 2, 3]);
    }

    #[test]
    fn zero_two_prior_earns_almost_nothing() {
        let p = UniformPrior::new(0.0, 2.0).unwrap();
        let (_, profit) = surrogate_threshold_mechanism(&p, 1.0, 1, QUANTILE_GRID).unwrap();
        assert!(profit.abs() <= 5e-3, "{profit}");
    }

    #[test]
    fn high_quality_prior_takes_everyone() {
        let p = UniformPrior::new(5.0, 6.0).unwrap();
        let (mech, profit) = surrogate_threshold_mechanism(&p, 1.0, 10, 512).unwrap();
        assert_eq!(mech.threshold, Some(6.0));
        assert!(profit > 0.0);
        assert_eq!(mech.payment(5.5), rev_unchecked(6.0, 1.0).rev);
    }

    #[test]
    fn low_quality_prior_takes_nobody() {
        // μ − φ(μ) < 0 throughout when quality is tiny relative to dispersion
        let p = UniformPrior::new(0.0, 0.2).unwrap();
        let (mech, profit) = surrogate_threshold_mechanism(&p, 1.0, 10, 512).unwrap();
        assert_eq!(mech.threshold, None);
        assert_eq!(profit, 0.0);
        assert!(!mech.allocation(0.1));
        assert_eq!(mech.payment(0.1), 0.0);
    }
}
