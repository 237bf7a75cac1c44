//! Joint iterative optimisation of a projection matrix `T_r` (m×r) and a
//! reduced-rank filter `w̄` (r) under an LCMV constraint, with set-membership
//! data-selective updates.
//!
//! Per snapshot `x(i)`:
//!
//! 1. `x̄ = T_rᴴ x`, `y = w̄ᴴ x̄`.
//! 2. If `|y|² < δ²(i)` nothing changes.
//! 3. Otherwise, in this order:
//!    - `λ₁(i)` from the output-magnitude constraint (clamped);
//!    - full-rank gain `k(i)` and inverse correlation `P(i)`;
//!    - `T_r(i) = γ P a / (aᴴ P a) · w̄ᴴ(i−1) / ‖w̄(i−1)‖²`;
//!    - `ā = T_rᴴ(i) a`, `x̄ = T_rᴴ(i) x` with the new projection;
//!    - reduced-rank gain `k̄(i)` and `P̄(i)`;
//!    - `w̄(i) = γ P̄ ā / (āᴴ P̄ ā)`.
//!
//! The multiplier of the steering constraint is eliminated in closed form and
//! never materialises.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gain_vector, hermitian_regularize, inverse_update, CMatrix, CVector};
use crate::tol;

/// Which gain feeds the `λ₁` expression, which itself appears inside the gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainPolicy {
    /// Provisional gain evaluated with `λ₁ = 1`.
    #[default]
    Unit,
    /// Provisional gain evaluated with the previous update's `λ₁`.
    Previous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda1Policy {
    pub min: f64,
    pub max: f64,
    pub gain_policy: GainPolicy,
    /// Use `δ²` instead of `δ` in the numerator term `δ a − γ² x`.
    pub delta_squared: bool,
}

impl Default for Lambda1Policy {
    fn default() -> Self {
        Lambda1Policy {
            min: 0.1,
            max: 0.998,
            gain_policy: GainPolicy::Unit,
            delta_squared: false,
        }
    }
}

impl Lambda1Policy {
    pub fn validate(&self) -> Result<()> {
        if !(self.min > 0.0 && self.min <= self.max && self.max.is_finite()) {
            return Err(Error::param(
                "lambda1",
                format!("need 0 < min ≤ max, got [{}, {}]", self.min, self.max),
            ));
        }
        Ok(())
    }

    pub fn clamp(&self, raw: f64) -> f64 {
        if raw.is_nan() {
            self.max
        } else {
            raw.clamp(self.min, self.max)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lambda1Rule {
    /// Solve the output-magnitude constraint each update.
    Adaptive(Lambda1Policy),
    /// Constant data weight (plain constrained RLS).
    Fixed(f64),
}

/// Whether the membership test gates updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    SetMembership,
    Always,
}

/// Outcome of one snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateEvent {
    /// 1-based snapshot index.
    pub snapshot_index: usize,
    pub updated: bool,
    pub y_mag_sq: f64,
    pub delta_sq: f64,
    /// Zero when not updated.
    pub lambda1: f64,
    /// The `λ₁` denominator vanished and `λ_max` was substituted.
    pub degenerate: bool,
}

/// `λ₁(i)` before and after clamping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda1 {
    /// Unclamped complex ratio; `None` when the denominator vanished.
    pub raw: Option<Complex64>,
    pub value: f64,
    pub degenerate: bool,
}

/// Solve the output-magnitude constraint for `λ₁`:
///
/// `λ₁ = aᴴ P [δ a − γ² x] / (aᴴ k · xᴴ P [δ a − γ² x])`
///
/// with `k` the provisional gain. The real part is clamped to the policy
/// range; a vanishing denominator yields `λ_max`.
pub fn compute_lambda1(
    p: &CMatrix,
    x: &CVector,
    a0: &CVector,
    gamma: f64,
    delta: f64,
    k_prev: &CVector,
    policy: &Lambda1Policy,
) -> Result<Lambda1> {
    let d = if policy.delta_squared { delta * delta } else { delta };
    let v = a0.scale_real(d).sub(&x.scale_real(gamma * gamma));
    let pv = p.mul_vec(&v)?;
    let num = a0.inner(&pv);
    let den = a0.inner(k_prev) * x.inner(&pv);
    if den.norm() < tol::SINGULAR {
        return Ok(Lambda1 {
            raw: None,
            value: policy.max,
            degenerate: true,
        });
    }
    let raw = num / den;
    Ok(Lambda1 {
        raw: Some(raw),
        value: policy.clamp(raw.re),
        degenerate: raw.re.is_nan(),
    })
}

/// Choose `λ₁` for a full-rank inverse correlation `p` under `rule`.
pub(crate) fn select_lambda1(
    rule: &Lambda1Rule,
    p: &CMatrix,
    x: &CVector,
    a0: &CVector,
    gamma: f64,
    delta: f64,
    previous: f64,
) -> Result<Lambda1> {
    match rule {
        Lambda1Rule::Fixed(v) => Ok(Lambda1 {
            raw: None,
            value: *v,
            degenerate: false,
        }),
        Lambda1Rule::Adaptive(policy) => {
            let provisional = match policy.gain_policy {
                GainPolicy::Unit => 1.0,
                GainPolicy::Previous => previous,
            };
            let k = gain_vector(p, x, provisional)?;
            compute_lambda1(p, x, a0, gamma, delta, &k, policy)
        }
    }
}

/// `γ P a / (aᴴ P a)`.
pub(crate) fn constrained_solution(
    p: &CMatrix,
    a: &CVector,
    gamma: f64,
    what: &'static str,
) -> Result<CVector> {
    let pa = p.mul_vec(a)?;
    let apa = a.inner(&pa);
    if apa.norm() < tol::SINGULAR {
        return Err(Error::SingularConstraint {
            what,
            snapshot: None,
            magnitude: apa.norm(),
        });
    }
    Ok(pa.scale(apa.inv() * gamma))
}

pub(crate) fn validate_lambda1_rule(rule: &Lambda1Rule) -> Result<()> {
    match rule {
        Lambda1Rule::Adaptive(policy) => policy.validate(),
        Lambda1Rule::Fixed(v) if *v >= 0.0 && v.is_finite() => Ok(()),
        Lambda1Rule::Fixed(v) => Err(Error::param("lambda1", format!("fixed value {v} must be ≥ 0"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JioParams {
    pub rank: usize,
    pub gamma: f64,
    /// `P(0) = ρ I`.
    pub rho: f64,
    /// `P̄(0) = ϱ I`.
    pub varrho: f64,
    pub lambda1: Lambda1Rule,
    pub selection: Selection,
}

impl JioParams {
    /// Set-membership configuration used for the 64-element experiments.
    pub fn set_membership(rank: usize) -> Self {
        JioParams {
            rank,
            gamma: 1.0,
            rho: 1.3e-3,
            varrho: 1.0e-4,
            lambda1: Lambda1Rule::Adaptive(Lambda1Policy::default()),
            selection: Selection::SetMembership,
        }
    }

    /// Always-update variant with a constant data weight.
    pub fn always_update(rank: usize, lambda1: f64) -> Self {
        JioParams {
            lambda1: Lambda1Rule::Fixed(lambda1),
            selection: Selection::Always,
            ..Self::set_membership(rank)
        }
    }
}

/// Entire mutable state of the reduced-rank set-membership beamformer.
#[derive(Debug, Clone, PartialEq)]
pub struct JioSmRls {
    params: JioParams,
    steering: CVector,
    projection: CMatrix,
    reduced_weight: CVector,
    p: CMatrix,
    p_bar: CMatrix,
    last_lambda1: f64,
    update_count: usize,
    snapshot_count: usize,
}

impl JioSmRls {
    /// Initial state: `T_r(0) = [I_r 0]ᵀ`, `w̄(0) = γ T_rᴴ a / ‖T_rᴴ a‖²`,
    /// `P(0) = ρ I_m`, `P̄(0) = ϱ I_r`.
    pub fn new(params: JioParams, a0: CVector) -> Result<Self> {
        let m = a0.dim();
        let r = params.rank;
        if r == 0 || r > m {
            return Err(Error::param("rank", format!("need 1 ≤ r ≤ m = {m}, got {r}")));
        }
        if params.rho.is_nan() || params.rho <= 0.0 {
            return Err(Error::param("rho", "must be positive"));
        }
        if params.varrho.is_nan() || params.varrho <= 0.0 {
            return Err(Error::param("varrho", "must be positive"));
        }
        if !(params.gamma != 0.0 && params.gamma.is_finite()) {
            return Err(Error::param("gamma", "must be finite and nonzero"));
        }
        validate_lambda1_rule(&params.lambda1)?;

        let mut projection = CMatrix::zeros(m, r);
        for j in 0..r {
            projection[(j, j)] = Complex64::new(1.0, 0.0);
        }
        let a_bar = projection.adjoint_mul_vec(&a0)?;
        let norm_sq = a_bar.norm_sqr();
        if norm_sq < tol::SINGULAR {
            return Err(Error::Initialization(
                "truncated steering vector T_rᴴ(0) a(θ₀) is zero".into(),
            ));
        }
        let reduced_weight = a_bar.scale_real(params.gamma / norm_sq);
        let last_lambda1 = match params.lambda1 {
            Lambda1Rule::Adaptive(p) => p.max,
            Lambda1Rule::Fixed(v) => v,
        };
        Ok(JioSmRls {
            p: CMatrix::scaled_identity(m, params.rho),
            p_bar: CMatrix::scaled_identity(r, params.varrho),
            params,
            steering: a0,
            projection,
            reduced_weight,
            last_lambda1,
            update_count: 0,
            snapshot_count: 0,
        })
    }

    pub fn params(&self) -> &JioParams {
        &self.params
    }

    pub fn steering(&self) -> &CVector {
        &self.steering
    }

    pub fn projection(&self) -> &CMatrix {
        &self.projection
    }

    pub fn reduced_weight(&self) -> &CVector {
        &self.reduced_weight
    }

    pub fn inverse_correlation(&self) -> &CMatrix {
        &self.p
    }

    pub fn reduced_inverse_correlation(&self) -> &CMatrix {
        &self.p_bar
    }

    pub fn update_count(&self) -> usize {
        self.update_count
    }

    pub fn snapshot_count(&self) -> usize {
        self.snapshot_count
    }

    /// `ā(θ₀) = T_rᴴ a(θ₀)`.
    pub fn reduced_steering(&self) -> CVector {
        self.projection
            .adjoint_mul_vec(&self.steering)
            .expect("projection rows match steering dimension")
    }

    /// `w = T_r w̄`.
    pub fn full_weight(&self) -> CVector {
        self.projection
            .mul_vec(&self.reduced_weight)
            .expect("projection columns match rank")
    }

    /// `(y, x̄)` with `x̄ = T_rᴴ x` and `y = w̄ᴴ x̄`.
    pub fn filter_output(&self, x: &CVector) -> Result<(Complex64, CVector)> {
        let x_bar = self.projection.adjoint_mul_vec(x)?;
        let y = self.reduced_weight.inner(&x_bar);
        Ok((y, x_bar))
    }

    /// True when `|y|² ≤ δ²`, i.e. the current pair already meets the bound.
    pub fn check_membership(&self, x: &CVector, delta: f64) -> Result<bool> {
        let (y, _) = self.filter_output(x)?;
        Ok(y.norm_sqr() <= delta * delta)
    }

    /// Process one snapshot with bound `δ(i)`.
    pub fn update(&mut self, x: &CVector, delta: f64) -> Result<UpdateEvent> {
        let (y, _) = self.filter_output(x)?;
        self.snapshot_count += 1;
        let index = self.snapshot_count;
        let y_mag_sq = y.norm_sqr();
        let delta_sq = delta * delta;
        let fire = match self.params.selection {
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
        let next = self.propose(x, delta).map_err(|e| e.at_snapshot(index))?;
        event.updated = true;
        event.lambda1 = next.lambda1.value;
        event.degenerate = next.lambda1.degenerate;
        self.p = next.p;
        self.projection = next.projection;
        self.p_bar = next.p_bar;
        self.reduced_weight = next.reduced_weight;
        self.last_lambda1 = next.lambda1.value;
        self.update_count += 1;
        Ok(event)
    }

    /// Compute the full update chain without touching `self`, so a failing
    /// step leaves the state intact.
    fn propose(&self, x: &CVector, delta: f64) -> Result<Proposal> {
        let gamma = self.params.gamma;
        let a = &self.steering;
        let lambda1 = select_lambda1(
            &self.params.lambda1,
            &self.p,
            x,
            a,
            gamma,
            delta,
            self.last_lambda1,
        )?;
        let lam = lambda1.value;

        let k = gain_vector(&self.p, x, lam)?;
        let p = hermitian_regularize(&inverse_update(&self.p, &k, x, lam)?);

        let f = constrained_solution(&p, a, gamma, "aᴴ P a")?;
        let w_prev_norm = self.reduced_weight.norm_sqr();
        if w_prev_norm < tol::SINGULAR {
            return Err(Error::SingularConstraint {
                what: "‖w̄‖²",
                snapshot: None,
                magnitude: w_prev_norm,
            });
        }
        let projection = CMatrix::outer(&f, &self.reduced_weight).scale((1.0 / w_prev_norm).into());

        let a_bar = projection.adjoint_mul_vec(a)?;
        let x_bar = projection.adjoint_mul_vec(x)?;
        let k_bar = gain_vector(&self.p_bar, &x_bar, lam)?;
        let p_bar = hermitian_regularize(&inverse_update(&self.p_bar, &k_bar, &x_bar, lam)?);
        let reduced_weight = constrained_solution(&p_bar, &a_bar, gamma, "āᴴ P̄ ā")?;

        Ok(Proposal {
            lambda1,
            p,
            projection,
            p_bar,
            reduced_weight,
        })
    }
}

struct Proposal {
    lambda1: Lambda1,
    p: CMatrix,
    projection: CMatrix,
    p_bar: CMatrix,
    reduced_weight: CVector,
}
