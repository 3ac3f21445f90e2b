//! Closed-form predictions for the γ-quasi-clique number of `G(n, κ)`.
//!
//! With `D(γ, p)` the KL divergence between `Bern(γ)` and `Bern(p)` (natural
//! log), the typical quasi-clique number is `ω̃ = 2 ln n / D(γ, p_max)`, and
//! `ω_γ(G)` lands in `[(1 - ε) ω̃, (1 + ε) ω̃]` with probability tending to one.
//! The second-order estimate
//! `(2 / D)(ln n - ln ln n + ln(e D / 2)) + 1`
//! is far closer at small `n` and is what desk-scale experiments compare to.

use serde::Serialize;
use thiserror::Error;

use crate::solver::Gamma;

/// `D` below this is reported as near-degenerate (ω̃ blows up as `D → 0`).
pub const NEAR_DEGENERATE_KL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("probability {0} is not strictly inside (0, 1)")]
    InvalidProbability(f64),
    #[error("gamma = {gamma} must exceed p_max = {p_max}; the concentration result does not apply")]
    HypothesisViolation { gamma: Gamma, p_max: f64 },
    #[error("need n >= {min}, got {n}")]
    TooFewVertices { n: usize, min: usize },
    #[error("epsilon must lie in [0, 1), got {0}")]
    EpsilonOutOfRange(f64),
}

/// `D(γ, p)` in nats. `γ = 1` gives `ln(1/p)`; `γ = p` gives exactly 0.
pub fn kl_bernoulli(gamma: Gamma, p: f64) -> Result<f64, TheoryError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(TheoryError::InvalidProbability(p));
    }
    let g = gamma.as_f64();
    if g == p {
        return Ok(0.0);
    }
    if gamma.is_one() {
        return Ok(-p.ln());
    }
    // ln_1p keeps precision when γ is close to p.
    let pos = if g > 0.0 { -g * ((p - g) / g).ln_1p() } else { 0.0 };
    let neg = -(1.0 - g) * ((g - p) / (1.0 - g)).ln_1p();
    Ok((pos + neg).max(0.0))
}

fn check_hypothesis(gamma: Gamma, p_max: f64) -> Result<f64, TheoryError> {
    let kl = kl_bernoulli(gamma, p_max)?;
    if gamma.as_f64() <= p_max {
        return Err(TheoryError::HypothesisViolation { gamma, p_max });
    }
    Ok(kl)
}

/// `ω̃` with a flag raised when `D(γ, p_max)` is nearly zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Typical {
    pub value: f64,
    pub near_degenerate: bool,
}

/// `2 ln n / D(γ, p_max)`; requires `p_max < γ` and `n >= 2`.
pub fn typical_qcn(n: usize, gamma: Gamma, p_max: f64) -> Result<Typical, TheoryError> {
    let kl = check_hypothesis(gamma, p_max)?;
    if n < 2 {
        return Err(TheoryError::TooFewVertices { n, min: 2 });
    }
    Ok(Typical { value: 2.0 * (n as f64).ln() / kl, near_degenerate: kl < NEAR_DEGENERATE_KL })
}

/// `(2/D)(ln n − ln ln n + ln(e·D/2)) + 1`; requires `p < γ` and `n >= 3`.
pub fn refined_estimate(n: usize, gamma: Gamma, p: f64) -> Result<f64, TheoryError> {
    let kl = check_hypothesis(gamma, p)?;
    if n < 3 {
        return Err(TheoryError::TooFewVertices { n, min: 3 });
    }
    let ln_n = (n as f64).ln();
    Ok(2.0 / kl * (ln_n - ln_n.ln() + (std::f64::consts::E * kl / 2.0).ln()) + 1.0)
}

/// Theory quantities for one `(n, γ, p_max)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoryEstimates {
    pub gamma: Gamma,
    pub p_max: f64,
    pub n: usize,
    pub kl: f64,
    pub omega_tilde: f64,
    pub refined: f64,
    pub near_degenerate: bool,
}

impl TheoryEstimates {
    pub fn new(n: usize, gamma: Gamma, p_max: f64) -> Result<Self, TheoryError> {
        let typical = typical_qcn(n, gamma, p_max)?;
        Ok(TheoryEstimates {
            gamma,
            p_max,
            n,
            kl: kl_bernoulli(gamma, p_max)?,
            omega_tilde: typical.value,
            refined: refined_estimate(n, gamma, p_max)?,
            near_degenerate: typical.near_degenerate,
        })
    }

    /// `[(1 − ε) ω̃, (1 + ε) ω̃]`. `ε = 0` is accepted as the degenerate limit.
    pub fn window(&self, epsilon: f64) -> Result<(f64, f64), TheoryError> {
        window(self.omega_tilde, epsilon)
    }
}

/// `[(1 − ε) ω̃, (1 + ε) ω̃]` for `ε ∈ [0, 1)`.
pub fn window(omega_tilde: f64, epsilon: f64) -> Result<(f64, f64), TheoryError> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(TheoryError::EpsilonOutOfRange(epsilon));
    }
    Ok(((1.0 - epsilon) * omega_tilde, (1.0 + epsilon) * omega_tilde))
}
