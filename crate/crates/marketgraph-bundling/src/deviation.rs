//! How far the optimal revenue of C + σ·Σ a_i Z_i can drift from C when the Z_i
//! are subexponential.

use marketgraph_core::Error;

/// Z with E[e^{λZ}] ≤ e^{λ²γ²/2} for |λ| < 1/ξ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubexponentialParams {
    pub gamma: f64,
    pub xi: f64,
}

impl SubexponentialParams {
    pub fn new(gamma: f64, xi: f64) -> Result<Self, Error> {
        if !(gamma > 0.0 && xi > 0.0 && gamma.is_finite() && xi.is_finite()) {
            return Err(Error::Input(format!("γ and ξ must be positive, got {gamma}, {xi}")));
        }
        Ok(SubexponentialParams { gamma, xi })
    }
}

/// max{σγe^{−1/2}√A, 8σξ/(3e), √2·σ√A, 2σ^{2/3}(CA)^{1/3}} with A = Σa_i².
pub fn rev_deviation_bound(c: f64, sigma: f64, weights: &[f64], params: &SubexponentialParams) -> Result<f64, Error> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Input(format!("C must be positive, got {c}")));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Input(format!("dispersion must be nonnegative, got {sigma}")));
    }
    if let Some(a) = weights.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::Input(format!("weights must lie in [0, 1], got {a}")));
    }
    let a: f64 = weights.iter().map(|w| w * w).sum();
    let e = std::f64::consts::E;
    let terms = [
        sigma * params.gamma * (-0.5f64).exp() * a.sqrt(),
        8.0 * sigma * params.xi / (3.0 * e),
        2f64.sqrt() * sigma * a.sqrt(),
        2.0 * sigma.powf(2.0 / 3.0) * (c * a).cbrt(),
    ];
    Ok(terms.into_iter().fold(0.0, f64::max))
}
