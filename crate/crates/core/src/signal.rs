//! Narrowband far-field sources impinging on a uniform linear array.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Uniform linear array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_elements: usize,
    /// Inter-element spacing over carrier wavelength, `d / λ_c`.
    spacing_ratio: f64,
}

impl ArrayGeometry {
    pub fn new(num_elements: usize, spacing_ratio: f64) -> Result<Self> {
        if num_elements == 0 {
            return Err(Error::param("num_elements", "must be at least 1"));
        }
        if !(spacing_ratio > 0.0 && spacing_ratio.is_finite()) {
            return Err(Error::param("spacing_ratio", "must be positive"));
        }
        Ok(ArrayGeometry {
            num_elements,
            spacing_ratio,
        })
    }

    /// Half-wavelength ULA.
    pub fn half_wavelength(num_elements: usize) -> Result<Self> {
        Self::new(num_elements, 0.5)
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing_ratio(&self) -> f64 {
        self.spacing_ratio
    }
}

/// Array response to a plane wave from `theta` (radians):
/// element `n` is `exp(-2πj n (d/λ_c) cos θ)`.
pub fn steering_vector(geometry: &ArrayGeometry, theta: f64) -> CVector {
    let phase_step = -2.0 * PI * geometry.spacing_ratio * theta.cos();
    (0..geometry.num_elements)
        .map(|n| {
            if n == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, phase_step * n as f64)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulation {
    #[default]
    Bpsk,
}

/// One far-field source. Power is `E[|s_k(i)|²]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub doa: f64,
    pub power: f64,
}

/// Full description of the received-snapshot statistics.
///
/// Source 0 is the desired user; the rest are interferers.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    geometry: ArrayGeometry,
    sources: Vec<Source>,
    noise_power: f64,
    num_snapshots: usize,
    modulation: Modulation,
}

impl Scenario {
    pub fn new(
        geometry: ArrayGeometry,
        sources: Vec<Source>,
        noise_power: f64,
        num_snapshots: usize,
    ) -> Result<Self> {
        if sources.len() > geometry.num_elements() {
            return Err(Error::param(
                "sources",
                format!(
                    "{} sources exceed {} array elements",
                    sources.len(),
                    geometry.num_elements()
                ),
            ));
        }
        if !(noise_power >= 0.0 && noise_power.is_finite()) {
            return Err(Error::param("noise_power", "must be non-negative"));
        }
        for (k, s) in sources.iter().enumerate() {
            if !(s.power > 0.0 && s.power.is_finite()) {
                return Err(Error::param("source power", format!("source {k} power must be > 0")));
            }
            if !s.doa.is_finite() {
                return Err(Error::param("doa", format!("source {k} direction is not finite")));
            }
        }
        for i in 0..sources.len() {
            for j in (i + 1)..sources.len() {
                if (sources[i].doa - sources[j].doa).abs() < 1e-12 {
                    return Err(Error::param(
                        "doa",
                        format!("sources {i} and {j} share a direction"),
                    ));
                }
            }
        }
        Ok(Scenario {
            geometry,
            sources,
            noise_power,
            num_snapshots,
            modulation: Modulation::Bpsk,
        })
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn desired(&self) -> Option<&Source> {
        self.sources.first()
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn num_snapshots(&self) -> usize {
        self.num_snapshots
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    /// Steering vector of the desired user.
    pub fn desired_steering(&self) -> Option<CVector> {
        self.desired().map(|s| steering_vector(&self.geometry, s.doa))
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear source and noise powers derived from SNR/INR levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Powers {
    pub desired: f64,
    pub interferer: f64,
    pub noise: f64,
}

impl Powers {
    /// Noise power fixed; `desired = SNR·σ²`, `interferer = INR·σ²`.
    pub fn noise_referenced(snr_db: f64, inr_db: f64, noise_power: f64) -> Self {
        Powers {
            desired: db_to_linear(snr_db) * noise_power,
            interferer: db_to_linear(inr_db) * noise_power,
            noise: noise_power,
        }
    }

    /// Desired power fixed (unit-amplitude BPSK for 1.0); noise follows from the SNR.
    pub fn signal_referenced(snr_db: f64, inr_db: f64, desired_power: f64) -> Self {
        let noise = desired_power / db_to_linear(snr_db);
        Powers {
            desired: desired_power,
            interferer: db_to_linear(inr_db) * noise,
            noise,
        }
    }
}

/// Draw `count` interferer directions uniformly in (0, π), rejecting any
/// within `guard` radians of the desired direction.
pub fn draw_interferer_doas<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    desired: f64,
    guard: f64,
) -> Vec<f64> {
    let mut doas = Vec::with_capacity(count);
    while doas.len() < count {
        let theta: f64 = rng.random::<f64>() * PI;
        if theta <= 0.0 || (theta - desired).abs() < guard {
            continue;
        }
        if doas.iter().any(|&d: &f64| (d - theta).abs() < 1e-12) {
            continue;
        }
        doas.push(theta);
    }
    doas
}

/// Exact covariance and its desired / interference-plus-noise split.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    /// `R = R_s + R_{i+n}`.
    pub total: CMatrix,
    /// `power₀ a(θ₀) a(θ₀)ᴴ` (zero if there are no sources).
    pub desired: CMatrix,
    /// `Σ_{k≥1} power_k a(θ_k) a(θ_k)ᴴ + σ_n² I`.
    pub interference_plus_noise: CMatrix,
}

pub fn ideal_covariance(scenario: &Scenario) -> Covariance {
    let m = scenario.geometry.num_elements();
    let mut desired = CMatrix::zeros(m, m);
    let mut rin = CMatrix::scaled_identity(m, scenario.noise_power);
    for (k, src) in scenario.sources.iter().enumerate() {
        let a = steering_vector(&scenario.geometry, src.doa);
        let target = if k == 0 { &mut desired } else { &mut rin };
        for i in 0..m {
            for j in 0..m {
                target[(i, j)] += a[i] * a[j].conj() * src.power;
            }
        }
    }
    let total = desired.add(&rin).expect("same shape");
    Covariance {
        total,
        desired,
        interference_plus_noise: rin,
    }
}

/// One received snapshot `x(i)` with the desired-user symbol `s₀(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub x: CVector,
    pub desired_symbol: Complex64,
}

/// Seeded generator of `x(i) = A(θ) s(i) + n(i)`, `i = 1..N`.
///
/// BPSK symbols are `±√power_k` with equal probability; noise is circular
/// complex Gaussian with per-element variance `σ_n²`.
#[derive(Debug, Clone)]
pub struct SnapshotStream {
    steering: Vec<CVector>,
    amplitudes: Vec<f64>,
    noise_std: f64,
    dim: usize,
    rng: ChaCha8Rng,
    emitted: usize,
    total: usize,
}

impl SnapshotStream {
    pub fn new(scenario: &Scenario, seed: u64) -> Self {
        let steering = scenario
            .sources
            .iter()
            .map(|s| steering_vector(&scenario.geometry, s.doa))
            .collect();
        let amplitudes = scenario.sources.iter().map(|s| s.power.sqrt()).collect();
        SnapshotStream {
            steering,
            amplitudes,
            noise_std: (scenario.noise_power / 2.0).sqrt(),
            dim: scenario.geometry.num_elements(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            emitted: 0,
            total: scenario.num_snapshots,
        }
    }

    /// Snapshots emitted so far.
    pub fn position(&self) -> usize {
        self.emitted
    }

    /// Next `(x(i), s₀(i))`, or `None` once `N` snapshots have been emitted.
    pub fn next_snapshot(&mut self) -> Option<Snapshot> {
        if self.emitted >= self.total {
            return None;
        }
        self.emitted += 1;
        let mut x = vec![Complex64::new(0.0, 0.0); self.dim];
        let mut desired_symbol = Complex64::new(0.0, 0.0);
        for (k, (a, amp)) in self.steering.iter().zip(&self.amplitudes).enumerate() {
            let s = if self.rng.random::<bool>() { *amp } else { -amp };
            if k == 0 {
                desired_symbol = Complex64::new(s, 0.0);
            }
            for (xi, ai) in x.iter_mut().zip(a.iter()) {
                *xi += ai * s;
            }
        }
        if self.noise_std > 0.0 {
            for xi in x.iter_mut() {
                let re: f64 = self.rng.sample(StandardNormal);
                let im: f64 = self.rng.sample(StandardNormal);
                *xi += Complex64::new(re, im) * self.noise_std;
            }
        }
        Some(Snapshot {
            x: CVector::new(x),
            desired_symbol,
        })
    }
}

impl Iterator for SnapshotStream {
    type Item = Snapshot;

    fn next(&mut self) -> Option<Snapshot> {
        self.next_snapshot()
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.total - self.emitted;
        (left, Some(left))
    }
}
