//! Monopoly pricing against normally distributed buyer values v = μ + σZ.
//!
//! With α = μ/σ and normalized price z = p/σ, revenue is σ·z·F[z − α] where F
//! is the standard normal tail. The optimal z* solves F[z − α] = z·f(z − α),
//! i.e. R(z − α) = z for the Mills ratio R = F/f, which is strictly decreasing.

use marketgraph_core::Error;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

/// Optimal monopoly outcome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonopolyRev {
    pub rev: f64,
    /// optimal price p*
    pub price: f64,
    /// optimal demand F[(p* − μ)/σ], which is also ∂Rev/∂μ
    pub demand: f64,
}

/// Buyer value distribution μ + σZ with Z standard normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalDemand {
    pub mu: f64,
    pub sigma: f64,
}

impl NormalDemand {
    pub fn new(mu: f64, sigma: f64) -> Result<Self, Error> {
        check(mu, sigma)?;
        Ok(NormalDemand { mu, sigma })
    }

    pub fn monopoly(&self) -> MonopolyRev {
        rev_unchecked(self.mu, self.sigma)
    }
}

fn check(mu: f64, sigma: f64) -> Result<(), Error> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::Input(format!("quality must be positive, got {mu}")));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Input(format!("dispersion must be nonnegative, got {sigma}")));
    }
    Ok(())
}

fn std_normal() -> Normal {
    Normal::standard()
}

/// Standard normal tail F[η] = P[Z ≥ η].
pub fn tail(eta: f64) -> f64 {
    std_normal().sf(eta)
}

/// Standard normal density.
pub fn density(eta: f64) -> f64 {
    std_normal().pdf(eta)
}

/// Mills ratio F[η]/f(η).
pub fn mills(eta: f64) -> f64 {
    if eta > 30.0 {
        // asymptotic series; the density underflows further out
        let r = 1.0 / (eta * eta);
        return (1.0 - r + 3.0 * r * r - 15.0 * r * r * r) / eta;
    }
    tail(eta) / density(eta)
}

/// Optimal normalized price z*(α).
pub fn z_star(alpha: f64) -> f64 {
    let h = |z: f64| mills(z - alpha) - z;
    let (mut lo, mut hi) = ((alpha - 10.0).max(0.0), (alpha + 10.0).max(1.0));
    if !(h(lo) > 0.0 && h(hi) < 0.0) {
        return golden_max(|z| z * tail(z - alpha), 0.0, 2.0 * hi);
    }
    while hi - lo > 1e-8 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton on h, whose slope η·R(η) − 2 is below −1 everywhere
    let mut z = 0.5 * (lo + hi);
    for _ in 0..20 {
        let eta = z - alpha;
        let step = h(z) / (eta * mills(eta) - 2.0);
        let next = (z - step).clamp(lo, hi);
        let done = (next - z).abs() <= 1e-15 * z.abs().max(1.0);
        z = next;
        if done {
            break;
        }
    }
    z
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-12 * b.abs().max(1.0) {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) >= f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Optimal revenue and price for any real μ (σ > 0), or μ ≥ 0 when σ = 0.
pub(crate) fn rev_unchecked(mu: f64, sigma: f64) -> MonopolyRev {
    if sigma == 0.0 {
        let demand = if mu > 0.0 { 1.0 } else { 0.0 };
        return MonopolyRev { rev: mu.max(0.0), price: mu.max(0.0), demand };
    }
    let alpha = mu / sigma;
    let z = z_star(alpha);
    let demand = tail(z - alpha);
    MonopolyRev { rev: sigma * z * demand, price: sigma * z, demand }
}

/// Rev(μ, σ) and the optimal price. σ = 0 gives (μ, μ).
pub fn monopoly_rev(mu: f64, sigma: f64) -> Result<MonopolyRev, Error> {
    check(mu, sigma)?;
    Ok(rev_unchecked(mu, sigma))
}

/// Optimal normalized price relative to the mean, z*(α) − α.
pub fn optimal_markup(alpha: f64) -> f64 {
    z_star(alpha) - alpha
}

/// The α at which the optimal price crosses the mean: z*(α) − α is positive
/// below it and negative above.
pub fn alpha_zero() -> f64 {
    let (mut lo, mut hi) = (0.5, 3.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if optimal_markup(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
