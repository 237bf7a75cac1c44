//! Reference beamformers.
//!
//! The full-rank RLS variants reuse the constrained recursion of [`crate::jio`]
//! with the projection stage removed (`r = m`, `T_r ≡ I`), so every adaptive
//! method shares one gain / inverse-update / `λ₁` path.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jio::{
    constrained_solution, select_lambda1, validate_lambda1_rule, JioParams, JioSmRls,
    Lambda1Policy, Lambda1Rule, Selection, UpdateEvent,
};
use crate::linalg::{cholesky_solve, gain_vector, hermitian_regularize, inverse_update, CMatrix, CVector};
use crate::tol;

/// Default data weight of the always-update baselines.
pub const RLS_FORGETTING: f64 = 0.998;

/// Minimum-variance distortionless weight `γ R⁻¹ a / (aᴴ R⁻¹ a)`.
pub fn mvdr_weight(r: &CMatrix, a0: &CVector, gamma: f64) -> Result<CVector> {
    let z = cholesky_solve(r, a0)?;
    let denom = a0.inner(&z);
    if denom.norm() < tol::SINGULAR {
        return Err(Error::SingularConstraint {
            what: "aᴴ R⁻¹ a",
            snapshot: None,
            magnitude: denom.norm(),
        });
    }
    Ok(z.scale(denom.inv() * gamma))
}

/// Full-rank constrained RLS, optionally set-membership gated.
#[derive(Debug, Clone, PartialEq)]
pub struct FullRankRls {
    steering: CVector,
    gamma: f64,
    p: CMatrix,
    weight: CVector,
    lambda1: Lambda1Rule,
    selection: Selection,
    last_lambda1: f64,
    update_count: usize,
    snapshot_count: usize,
}

impl FullRankRls {
    pub fn new(
        a0: CVector,
        gamma: f64,
        rho: f64,
        lambda1: Lambda1Rule,
        selection: Selection,
    ) -> Result<Self> {
        if rho.is_nan() || rho <= 0.0 {
            return Err(Error::param("rho", "must be positive"));
        }
        if !(gamma != 0.0 && gamma.is_finite()) {
            return Err(Error::param("gamma", "must be finite and nonzero"));
        }
        validate_lambda1_rule(&lambda1)?;
        let p = CMatrix::scaled_identity(a0.dim(), rho);
        let weight = constrained_solution(&p, &a0, gamma, "aᴴ P a")?;
        let last_lambda1 = match lambda1 {
            Lambda1Rule::Adaptive(policy) => policy.max,
            Lambda1Rule::Fixed(v) => v,
        };
        Ok(FullRankRls {
            steering: a0,
            gamma,
            p,
            weight,
            lambda1,
            selection,
            last_lambda1,
            update_count: 0,
            snapshot_count: 0,
        })
    }

    /// FR-RLS: every snapshot, constant data weight.
    pub fn rls(a0: CVector, gamma: f64, rho: f64, forgetting: f64) -> Result<Self> {
        Self::new(a0, gamma, rho, Lambda1Rule::Fixed(forgetting), Selection::Always)
    }

    /// FR-SM-RLS: bound-gated, adaptive `λ₁`.
    pub fn sm_rls(a0: CVector, gamma: f64, rho: f64, policy: Lambda1Policy) -> Result<Self> {
        Self::new(a0, gamma, rho, Lambda1Rule::Adaptive(policy), Selection::SetMembership)
    }

    pub fn weight(&self) -> &CVector {
        &self.weight
    }

    pub fn inverse_correlation(&self) -> &CMatrix {
        &self.p
    }

    pub fn update_count(&self) -> usize {
        self.update_count
    }

    pub fn snapshot_count(&self) -> usize {
        self.snapshot_count
    }

    pub fn output(&self, x: &CVector) -> Complex64 {
        self.weight.inner(x)
    }

    /// One snapshot; `delta` is ignored when every snapshot updates.
    pub fn update(&mut self, x: &CVector, delta: f64) -> Result<UpdateEvent> {
        if x.dim() != self.steering.dim() {
            return Err(Error::Dimension {
                op: "FullRankRls::update",
                expected: self.steering.dim(),
                got: x.dim(),
            });
        }
        let y = self.output(x);
        self.snapshot_count += 1;
        let index = self.snapshot_count;
        let y_mag_sq = y.norm_sqr();
        let delta_sq = delta * delta;
        let fire = match self.selection {
            Selection::Always => true,
            Selection::SetMembership => y_mag_sq >= delta_sq,
        };
        let mut event = UpdateEvent {
            snapshot_index: index,
            updated: false,
            y_mag_sq,
            delta_sq,
            lambda1: 0.0,
            degenerate: false,
        };
        if !fire {
            return Ok(event);
        }
        let step = || -> Result<_> {
            let lambda1 = select_lambda1(
                &self.lambda1,
                &self.p,
                x,
                &self.steering,
                self.gamma,
                delta,
                self.last_lambda1,
            )?;
            let k = gain_vector(&self.p, x, lambda1.value)?;
            let p = hermitian_regularize(&inverse_update(&self.p, &k, x, lambda1.value)?);
            let weight = constrained_solution(&p, &self.steering, self.gamma, "aᴴ P a")?;
            Ok((lambda1, p, weight))
        };
        let (lambda1, p, weight) = step().map_err(|e| e.at_snapshot(index))?;
        self.p = p;
        self.weight = weight;
        self.last_lambda1 = lambda1.value;
        self.update_count += 1;
        event.updated = true;
        event.lambda1 = lambda1.value;
        event.degenerate = lambda1.degenerate;
        Ok(event)
    }
}

/// JIO-RLS: the reduced-rank recursion updating on every snapshot with a
/// constant data weight.
pub fn jio_rls(a0: CVector, rank: usize, gamma: f64, rho: f64, varrho: f64) -> Result<JioSmRls> {
    let params = JioParams {
        gamma,
        rho,
        varrho,
        ..JioParams::always_update(rank, RLS_FORGETTING)
    };
    JioSmRls::new(params, a0)
}
