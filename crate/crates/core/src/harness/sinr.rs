//! Output SINR against the exact desired and interference-plus-noise covariances.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::signal::{ideal_covariance, Scenario};

/// Precomputed `a(θ₀)`, `power₀` and `R_{i+n}` for repeated SINR evaluation.
#[derive(Debug, Clone)]
pub struct SinrMeter {
    steering: CVector,
    desired_power: f64,
    interference_plus_noise: CMatrix,
}

impl SinrMeter {
    pub fn new(scenario: &Scenario) -> Self {
        let cov = ideal_covariance(scenario);
        let m = scenario.geometry().num_elements();
        let (steering, desired_power) = match scenario.desired() {
            Some(src) => (scenario.desired_steering().expect("desired source"), src.power),
            None => (CVector::zeros(m), 0.0),
        };
        SinrMeter {
            steering,
            desired_power,
            interference_plus_noise: cov.interference_plus_noise,
        }
    }

    /// `10 log₁₀(wᴴ R_s w / wᴴ R_{i+n} w)`; `-inf` when `w ⟂ a(θ₀)`.
    pub fn sinr_db(&self, w: &CVector) -> Result<f64> {
        if w.norm_sqr() == 0.0 {
            return Err(Error::UndefinedSinr);
        }
        let gain = self.steering.inner(w).norm_sqr();
        // Cancellation residue below rounding counts as an exact null.
        if gain <= (f64::EPSILON * f64::EPSILON) * self.steering.norm_sqr() * w.norm_sqr() {
            return Ok(f64::NEG_INFINITY);
        }
        let signal = self.desired_power * gain;
        let rest = self.interference_plus_noise.quadratic_form(w, w)?.re;
        Ok(10.0 * (signal / rest).log10())
    }
}

pub fn output_sinr(w: &CVector, scenario: &Scenario) -> Result<f64> {
    SinrMeter::new(scenario).sinr_db(w)
}
