//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use beamsm_core::jio::{JioSmRls, Lambda1Policy, Lambda1Rule, Selection, JioParams};
use beamsm_core::linalg::{CMatrix, CVector};
use beamsm_core::signal::{ArrayGeometry, Scenario, SnapshotStream, Source};
use beamsm_core::Complex64;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub fn to_na(m: &CMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_na(m: &DMatrix<Complex64>) -> CMatrix {
    let rows = (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect::<Vec<Vec<Complex64>>>();
    CMatrix::from_rows(&rows).unwrap()
}

pub fn vec_to_na(v: &CVector) -> DVector<Complex64> {
    DVector::from_column_slice(v.as_slice())
}

pub fn inverse(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    m.clone().try_inverse().expect("oracle matrix is invertible")
}

/// `max|a − b| / max|b|`.
pub fn rel_err(a: &CMatrix, b: &DMatrix<Complex64>) -> f64 {
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = to_na(a) - b;
    diff.iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
}

pub fn random_cvector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Random Hermitian positive-definite matrix `B Bᴴ + n I`.
pub fn random_hpd<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let cols: Vec<CVector> = (0..n).map(|_| random_cvector(rng, n)).collect();
    let mut acc = CMatrix::scaled_identity(n, n as f64);
    for c in &cols {
        acc = acc.add(&CMatrix::outer(c, c)).unwrap();
    }
    acc
}

/// Random half-wavelength scenario with `q ≤ m` users and well-separated DOAs.
pub fn random_scenario<R: Rng>(rng: &mut R, m: usize, snapshots: usize) -> Scenario {
    let q = rng.random_range(1..=m.min(4));
    let geometry = ArrayGeometry::half_wavelength(m).unwrap();
    let mut doas: Vec<f64> = Vec::new();
    while doas.len() < q {
        let d = rng.random_range(0.05..PI - 0.05);
        if doas.iter().all(|e: &f64| (e - d).abs() > 0.05) {
            doas.push(d);
        }
    }
    let sources = doas
        .into_iter()
        .enumerate()
        .map(|(i, doa)| Source {
            doa,
            power: if i == 0 { 1.0 } else { 10f64.powf(rng.random_range(0.0..2.0)) },
        })
        .collect();
    let noise = 10f64.powf(rng.random_range(-2.0..0.0));
    Scenario::new(geometry, sources, noise, snapshots).unwrap()
}

pub fn snapshots(scenario: &Scenario, seed: u64) -> Vec<CVector> {
    SnapshotStream::new(scenario, seed).map(|s| s.x).collect()
}

/// Adaptive-`λ₁` filter that updates on every snapshot.
pub fn always_adaptive(a0: CVector, rank: usize, gamma: f64) -> JioSmRls {
    let params = JioParams {
        rank,
        gamma,
        rho: 1.0,
        varrho: 1.0,
        lambda1: Lambda1Rule::Adaptive(Lambda1Policy::default()),
        selection: Selection::Always,
    };
    JioSmRls::new(params, a0).unwrap()
}

/// Largest 2×2 minor of `t`, relative to `max|t|²`; zero iff rank ≤ 1.
pub fn rank_one_defect(t: &CMatrix) -> f64 {
    let scale = t.max_abs().powi(2);
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for a in 0..t.rows() {
        for b in a + 1..t.rows() {
            for j in 0..t.cols() {
                for k in j + 1..t.cols() {
                    let minor = t[(a, j)] * t[(b, k)] - t[(a, k)] * t[(b, j)];
                    worst = worst.max(minor.norm());
                }
            }
        }
    }
    worst / scale
}

/// `|w̄ᴴ T_rᴴ a − γ|`.
pub fn constraint_residual(f: &JioSmRls) -> f64 {
    (f.reduced_weight().inner(&f.reduced_steering()) - f.params().gamma).norm()
}
