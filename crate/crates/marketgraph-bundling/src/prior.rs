//! Seller quality priors and the virtual cost of procuring a seller.

use marketgraph_core::Error;

use crate::normal::rev_unchecked;

/// Seller quality uniform on [lo, hi]; lo = hi is a point mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformPrior {
    pub lo: f64,
    pub hi: f64,
}

impl UniformPrior {
    pub fn new(lo: f64, hi: f64) -> Result<Self, Error> {
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
            return Err(Error::Input(format!("need 0 ≤ lo ≤ hi, got [{lo}, {hi}]")));
        }
        Ok(UniformPrior { lo, hi })
    }

    pub fn cdf(&self, mu: f64) -> f64 {
        if mu < self.lo {
            0.0
        } else if mu >= self.hi {
            1.0
        } else {
            (mu - self.lo) / (self.hi - self.lo)
        }
    }

    /// Density, zero outside the support and undefined for a point mass.
    pub fn density(&self, mu: f64) -> Option<f64> {
        if self.hi == self.lo {
            return None;
        }
        Some(if (self.lo..=self.hi).contains(&mu) { 1.0 / (self.hi - self.lo) } else { 0.0 })
    }

    /// Quality at quantile q ∈ [0, 1].
    pub fn quantile(&self, q: f64) -> f64 {
        self.lo + q.clamp(0.0, 1.0) * (self.hi - self.lo)
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

fn check_sigma(sigma: f64) -> Result<(), Error> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Input(format!("dispersion must be nonnegative, got {sigma}")));
    }
    Ok(())
}

/// Virtual cost φ(μ) = Rev(μ,σ)·(1 + Φ(μ)/(φ_prior(μ)·p*(μ))), written as
/// Rev + (Φ/φ_prior)·∂Rev/∂μ so that it stays finite at p* = 0.
pub fn virtual_cost(mu: f64, sigma: f64, prior: &UniformPrior) -> Result<f64, Error> {
    check_sigma(sigma)?;
    match prior.density(mu) {
        Some(d) if d > 0.0 => {
            let r = rev_unchecked(mu, sigma);
            Ok(r.rev + prior.cdf(mu) / d * r.demand)
        }
        _ => Err(Error::Domain(format!("prior density is zero at {mu}"))),
    }
}

/// Areas of μ − φ(μ) over the support: `a` is the negative area before the
/// curve first turns positive, `b` the positive area after it, up to where it
/// turns negative again. Trapezoid rule on `points` nodes.
pub fn virtual_surplus_regions(prior: &UniformPrior, sigma: f64, points: usize) -> Result<(f64, f64), Error> {
    if prior.hi == prior.lo || points < 2 {
        return Err(Error::Input("need a nondegenerate prior and at least two nodes".into()));
    }
    let h = (prior.hi - prior.lo) / (points - 1) as f64;
    let g: Vec<f64> = (0..points)
        .map(|k| {
            let mu = prior.lo + k as f64 * h;
            virtual_cost(mu, sigma, prior).map(|phi| mu - phi)
        })
        .collect::<Result<_, _>>()?;
    let (mut a, mut b) = (0.0, 0.0);
    let mut stage = 0;
    for w in g.windows(2) {
        let piece = 0.5 * (w[0] + w[1]) * h;
        match stage {
            0 if w[1] <= 0.0 => a -= piece,
            0 => {
                stage = 1;
                b += piece;
            }
            1 if w[1] >= 0.0 => b += piece,
            _ => stage = 2,
        }
    }
    Ok((a, b))
}
