//! Set-membership bound on the array output magnitude.
//!
//! The time-varying bound tracks the full-rank weight norm:
//!
//! `δ(i) = β δ(i−1) + (1−β) √(α ‖w(i)‖² σ̂_n²(i))`
//!
//! The fixed mode holds a constant and ignores every input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMode {
    TimeVarying { alpha: f64, beta: f64 },
    Fixed { value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTracker {
    mode: BoundMode,
    noise_power_estimate: f64,
    delta: f64,
}

/// Build a tracker at `δ(0)`.
///
/// The time-varying mode starts at the recursion's fixed point for the
/// initial weights, `√(α ‖w(0)‖² σ̂_n²)`.
pub fn init_bound(mode: BoundMode, sigma_n_sq_est: f64, w0_norm_sq: f64) -> Result<BoundTracker> {
    match mode {
        BoundMode::TimeVarying { alpha, beta } => {
            if !(alpha > 1.0 && alpha.is_finite()) {
                return Err(Error::param("bound.alpha", format!("must exceed 1, got {alpha}")));
            }
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::param("bound.beta", format!("must lie in (0, 1), got {beta}")));
            }
            check_non_negative("noise_power_estimate", sigma_n_sq_est)?;
            check_non_negative("w0_norm_sq", w0_norm_sq)?;
            let delta = (alpha * w0_norm_sq * sigma_n_sq_est).sqrt();
            Ok(BoundTracker {
                mode,
                noise_power_estimate: sigma_n_sq_est,
                delta,
            })
        }
        BoundMode::Fixed { value } => {
            check_non_negative("bound.fixed_value", value)?;
            Ok(BoundTracker {
                mode,
                noise_power_estimate: sigma_n_sq_est,
                delta: value,
            })
        }
    }
}

fn check_non_negative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be a finite non-negative value, got {v}")))
    }
}

impl BoundTracker {
    /// Resume a tracker from an arbitrary state.
    ///
    /// Accepts the closed ranges `β ∈ [0, 1]`, `α ≥ 0` (the recursion is still
    /// well defined there), unlike [`init_bound`].
    pub fn from_state(mode: BoundMode, noise_power_estimate: f64, delta: f64) -> Result<Self> {
        if let BoundMode::TimeVarying { alpha, beta } = mode {
            check_non_negative("bound.alpha", alpha)?;
            if !(0.0..=1.0).contains(&beta) {
                return Err(Error::param("bound.beta", format!("must lie in [0, 1], got {beta}")));
            }
        }
        check_non_negative("noise_power_estimate", noise_power_estimate)?;
        check_non_negative("delta", delta)?;
        let delta = match mode {
            BoundMode::Fixed { value } => value,
            BoundMode::TimeVarying { .. } => delta,
        };
        Ok(BoundTracker {
            mode,
            noise_power_estimate,
            delta,
        })
    }

    pub fn mode(&self) -> BoundMode {
        self.mode
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn noise_power_estimate(&self) -> f64 {
        self.noise_power_estimate
    }

    pub fn set_noise_power_estimate(&mut self, sigma_n_sq: f64) -> Result<()> {
        check_non_negative("noise_power_estimate", sigma_n_sq)?;
        self.noise_power_estimate = sigma_n_sq;
        Ok(())
    }

    /// Advance one instant with `weight_norm_sq = ‖T_r w̄‖²` and return `δ(i)`.
    pub fn update(&mut self, weight_norm_sq: f64) -> Result<f64> {
        match self.mode {
            BoundMode::Fixed { value } => Ok(value),
            BoundMode::TimeVarying { alpha, beta } => {
                if weight_norm_sq.is_nan() || weight_norm_sq < 0.0 {
                    return Err(Error::param(
                        "weight_norm_sq",
                        format!("must be non-negative, got {weight_norm_sq}"),
                    ));
                }
                let target = (alpha * weight_norm_sq * self.noise_power_estimate).sqrt();
                self.delta = beta * self.delta + (1.0 - beta) * target;
                Ok(self.delta)
            }
        }
    }
}

/// Source of `σ̂_n²(i)` fed to the tracker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseEstimatorKind {
    /// The true per-element noise power.
    #[default]
    Oracle,
    /// Exponentially smoothed output-based estimate.
    Smoothed,
}

/// Per-element noise power estimate.
///
/// The smoothed estimator uses the imaginary output: with real BPSK symbols
/// and a real constraint value the desired contribution to `y` is real, so
/// `2·Im(y)²/‖w‖²` is an unbiased per-element sample once interference is
/// nulled.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseEstimator {
    Oracle { noise_power: f64 },
    Smoothed { window: f64, estimate: f64 },
}

impl NoiseEstimator {
    pub const DEFAULT_WINDOW: f64 = 0.99;

    pub fn new(kind: NoiseEstimatorKind, true_noise_power: f64) -> Self {
        match kind {
            NoiseEstimatorKind::Oracle => NoiseEstimator::Oracle {
                noise_power: true_noise_power,
            },
            NoiseEstimatorKind::Smoothed => NoiseEstimator::Smoothed {
                window: Self::DEFAULT_WINDOW,
                estimate: true_noise_power,
            },
        }
    }

    pub fn current(&self) -> f64 {
        match *self {
            NoiseEstimator::Oracle { noise_power } => noise_power,
            NoiseEstimator::Smoothed { estimate, .. } => estimate,
        }
    }

    /// Fold in the output `y(i)` produced by weights of squared norm `weight_norm_sq`.
    pub fn observe(&mut self, y: num_complex::Complex64, weight_norm_sq: f64) -> f64 {
        match self {
            NoiseEstimator::Oracle { noise_power } => *noise_power,
            NoiseEstimator::Smoothed { window, estimate } => {
                if weight_norm_sq > 0.0 {
                    let sample = 2.0 * y.im * y.im / weight_norm_sq;
                    *estimate = *window * *estimate + (1.0 - *window) * sample;
                }
                *estimate
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn tv(alpha: f64, beta: f64) -> BoundMode {
        BoundMode::TimeVarying { alpha, beta }
    }

    #[test]
    fn full_memory_keeps_delta() {
        let mut t = BoundTracker::from_state(tv(4.0, 1.0), 1.0, 0.37).unwrap();
        for w in [0.0, 1.0, 5.0, 100.0] {
            assert_eq!(t.update(w).unwrap(), 0.37);
        }
    }

    #[test]
    fn no_memory_is_instantaneous() {
        let mut t = BoundTracker::from_state(tv(4.0, 0.0), 1.0, 9.0).unwrap();
        assert_eq!(t.update(1.0).unwrap(), 2.0);
    }

    #[test]
    fn experiment_parameters_single_step() {
        let mut t = BoundTracker::from_state(tv(26.0, 0.992), 1.0, 1.0).unwrap();
        let d = t.update(0.04).unwrap();
        let expected = 0.992 + 0.008 * 1.04f64.sqrt();
        assert!((d - expected).abs() < 1e-15);
        assert!((d - 1.000159).abs() < 1e-6);
    }

    #[test]
    fn init_examples() {
        let t = init_bound(BoundMode::Fixed { value: 1.0 }, 1.0, 0.5).unwrap();
        assert_eq!(t.delta(), 1.0);
        let t = init_bound(tv(26.0, 0.992), 1.0, 1.0 / 64.0).unwrap();
        assert!((t.delta() - (26.0f64 / 64.0).sqrt()).abs() < 1e-15);
        assert!((t.delta() - 0.6374).abs() < 1e-4);
        let t = init_bound(tv(4.0, 0.5), 1.0, 1.0).unwrap();
        assert_eq!(t.delta(), 2.0);
    }

    #[test]
    fn init_rejects_out_of_range() {
        assert!(init_bound(tv(1.0, 0.5), 1.0, 1.0).is_err());
        assert!(init_bound(tv(0.5, 0.5), 1.0, 1.0).is_err());
        assert!(init_bound(tv(2.0, 0.0), 1.0, 1.0).is_err());
        assert!(init_bound(tv(2.0, 1.0), 1.0, 1.0).is_err());
        assert!(init_bound(BoundMode::Fixed { value: -1.0 }, 1.0, 1.0).is_err());
    }

    #[test]
    fn negative_norm_is_domain_error() {
        let mut t = init_bound(tv(26.0, 0.992), 1.0, 0.1).unwrap();
        assert!(matches!(t.update(-1e-3), Err(Error::Parameter { .. })));
    }

    #[test]
    fn fixed_ignores_inputs() {
        let mut t = init_bound(BoundMode::Fixed { value: 1.4 }, 0.1, 0.0).unwrap();
        t.set_noise_power_estimate(1e6).unwrap();
        for w in [0.0, 1.0, 1e9] {
            assert_eq!(t.update(w).unwrap(), 1.4);
        }
    }

    #[test]
    fn oracle_estimator_is_constant() {
        let mut e = NoiseEstimator::new(NoiseEstimatorKind::Oracle, 0.1);
        assert_eq!(e.observe(Complex64::new(3.0, 4.0), 0.5), 0.1);
    }

    #[test]
    fn smoothed_estimator_converges_to_sample_mean() {
        let mut e = NoiseEstimator::new(NoiseEstimatorKind::Smoothed, 10.0);
        // Constant sample 2·0.25/0.5 = 1.0.
        for _ in 0..5000 {
            e.observe(Complex64::new(1.0, 0.5), 0.5);
        }
        assert!((e.current() - 1.0).abs() < 1e-12);
    }
}
