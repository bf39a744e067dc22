//! Closed-form purification formulas for Werner-state inputs.

use crate::error::ConfigError;

/// A fidelity in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fidelity(f64);

impl Fidelity {
    pub fn new(f: f64) -> Result<Self, ConfigError> {
        if (0.0..=1.0).contains(&f) {
            Ok(Fidelity(f))
        } else {
            Err(ConfigError::Fidelity(f))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Approximate fidelity after two rounds of purification, `F² / (F² + (1 − F)²)`.
pub fn distilled_fidelity_two_rounds(f: Fidelity) -> f64 {
    let f = f.0;
    let g = 1.0 - f;
    f * f / (f * f + g * g)
}

/// Werner weights over (Φ⁺, Φ⁻, Ψ⁺, Ψ⁻).
pub fn werner_components(f: Fidelity) -> [f64; 4] {
    let e = (1.0 - f.0) / 3.0;
    [f.0, e, e, e]
}

/// Probability that the two outcomes of one round agree for two Werner inputs.
pub fn purification_success_probability(f: Fidelity) -> f64 {
    let f = f.0;
    let e = (1.0 - f) / 3.0;
    f * f + 2.0 * f * e + 5.0 * e * e
}
