//! Monte-Carlo driver.
//!
//! Each run draws its interferer directions and snapshot sequence from the
//! run seed; every configured algorithm then processes the same snapshots.
//! Runs execute in parallel and are merged in run-index order.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{AlgorithmConfig, AlgorithmKind, Averaging, ExperimentConfig};
use super::sinr::SinrMeter;
use crate::baselines::{mvdr_weight, FullRankRls};
use crate::bound::{init_bound, BoundTracker, NoiseEstimator};
use crate::error::{Error, Result};
use crate::jio::{JioParams, JioSmRls, Lambda1Rule, Selection, UpdateEvent};
use crate::linalg::CVector;
use crate::signal::{
    draw_interferer_doas, ideal_covariance, steering_vector, Scenario, SnapshotStream, Source,
};

/// Fraction of failed runs above which an experiment is reported as failing.
pub const FAILURE_THRESHOLD: f64 = 0.01;

/// One algorithm over one Monte-Carlo realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Output SINR (dB) after each snapshot.
    pub sinr_db: Vec<f64>,
    pub events: Vec<UpdateEvent>,
    /// Bound in force at each snapshot (0 for methods without a bound).
    pub deltas: Vec<f64>,
    pub final_weight: CVector,
}

impl RunResult {
    pub fn update_count(&self) -> usize {
        self.events.iter().filter(|e| e.updated).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub run: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct AlgorithmResults {
    pub label: String,
    pub kind: AlgorithmKind,
    /// `(run index, result)` for successful runs in run order.
    pub runs: Vec<(usize, RunResult)>,
    pub failures: Vec<RunFailure>,
    pub mean_sinr_db: Vec<f64>,
    /// `Σ updates / (K_ok · N)`.
    pub mean_update_rate: f64,
}

impl AlgorithmResults {
    pub fn failure_rate(&self) -> f64 {
        let total = self.runs.len() + self.failures.len();
        if total == 0 {
            0.0
        } else {
            self.failures.len() as f64 / total as f64
        }
    }

    pub fn final_sinr_db(&self) -> f64 {
        self.mean_sinr_db.last().copied().unwrap_or(f64::NAN)
    }

    /// Mean SINR after snapshot `i` (1-based).
    pub fn sinr_at(&self, i: usize) -> f64 {
        self.mean_sinr_db[i - 1]
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResults {
    pub runs: usize,
    pub num_snapshots: usize,
    pub algorithms: Vec<AlgorithmResults>,
}

impl ExperimentResults {
    pub fn get(&self, label: &str) -> Option<&AlgorithmResults> {
        self.algorithms.iter().find(|a| a.label == label)
    }

    /// True when any algorithm lost more than 1% of its runs.
    pub fn exceeds_failure_threshold(&self) -> bool {
        self.algorithms
            .iter()
            .any(|a| a.failure_rate() > FAILURE_THRESHOLD)
    }
}

/// Realise run `run`'s scenario: fixed desired user plus interferers.
pub fn build_scenario(config: &ExperimentConfig, run: usize) -> Result<Scenario> {
    let sc = &config.scenario;
    let geometry = sc.geometry()?;
    let powers = sc.powers();
    let desired = sc.desired_doa_deg.to_radians();
    let interferers = match &sc.interferer_doas_deg {
        Some(deg) => deg.iter().map(|d| d.to_radians()).collect(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(run_seed(config, run));
            rng.set_stream(1);
            draw_interferer_doas(&mut rng, sc.num_users - 1, desired, sc.guard_deg.to_radians())
        }
    };
    let mut sources = vec![Source {
        doa: desired,
        power: powers.desired,
    }];
    sources.extend(interferers.into_iter().map(|doa| Source {
        doa: doa.rem_euclid(2.0 * PI),
        power: powers.interferer,
    }));
    Scenario::new(geometry, sources, powers.noise, sc.num_snapshots)
}

pub fn run_seed(config: &ExperimentConfig, run: usize) -> u64 {
    config.base_seed.wrapping_add(run as u64)
}

enum Filter {
    Jio(JioSmRls),
    Full(FullRankRls),
}

impl Filter {
    fn weight(&self) -> CVector {
        match self {
            Filter::Jio(f) => f.full_weight(),
            Filter::Full(f) => f.weight().clone(),
        }
    }

    fn output(&self, x: &CVector) -> Result<num_complex::Complex64> {
        match self {
            Filter::Jio(f) => Ok(f.filter_output(x)?.0),
            Filter::Full(f) => Ok(f.output(x)),
        }
    }

    fn update(&mut self, x: &CVector, delta: f64) -> Result<UpdateEvent> {
        match self {
            Filter::Jio(f) => f.update(x, delta),
            Filter::Full(f) => f.update(x, delta),
        }
    }
}

fn build_filter(alg: &AlgorithmConfig, a0: &CVector) -> Result<Filter> {
    let policy = alg.lambda1.policy();
    Ok(match alg.algorithm {
        AlgorithmKind::Mvdr => unreachable!("MVDR has no recursion"),
        AlgorithmKind::FrRls => Filter::Full(FullRankRls::rls(a0.clone(), alg.gamma, alg.rho, alg.forgetting)?),
        AlgorithmKind::FrSmRls => Filter::Full(FullRankRls::sm_rls(a0.clone(), alg.gamma, alg.rho, policy)?),
        AlgorithmKind::JioRls | AlgorithmKind::JioSmRls => {
            let (lambda1, selection) = if alg.algorithm == AlgorithmKind::JioRls {
                (Lambda1Rule::Fixed(alg.forgetting), Selection::Always)
            } else {
                (Lambda1Rule::Adaptive(policy), Selection::SetMembership)
            };
            let params = JioParams {
                rank: alg.rank,
                gamma: alg.gamma,
                rho: alg.rho,
                varrho: alg.varrho,
                lambda1,
                selection,
            };
            Filter::Jio(JioSmRls::new(params, a0.clone())?)
        }
    })
}

/// Run one algorithm over a recorded snapshot sequence.
pub fn run_algorithm(
    alg: &AlgorithmConfig,
    scenario: &Scenario,
    snapshots: &[CVector],
    meter: &SinrMeter,
) -> Result<RunResult> {
    let a0 = scenario
        .desired_steering()
        .ok_or_else(|| Error::Config("scenario has no desired user".into()))?;
    let n = snapshots.len();

    if alg.algorithm == AlgorithmKind::Mvdr {
        let r = ideal_covariance(scenario).total;
        let w = mvdr_weight(&r, &a0, alg.gamma)?;
        let s = meter.sinr_db(&w)?;
        let events = snapshots
            .iter()
            .enumerate()
            .map(|(i, x)| UpdateEvent {
                snapshot_index: i + 1,
                updated: false,
                y_mag_sq: w.inner(x).norm_sqr(),
                delta_sq: 0.0,
                lambda1: 0.0,
                degenerate: false,
            })
            .collect();
        return Ok(RunResult {
            sinr_db: vec![s; n],
            events,
            deltas: vec![0.0; n],
            final_weight: w,
        });
    }

    let mut filter = build_filter(alg, &a0)?;
    let mut bound: Option<(BoundTracker, NoiseEstimator)> = if alg.algorithm.uses_bound() {
        let estimator = NoiseEstimator::new(alg.bound.noise_estimator, scenario.noise_power());
        let tracker = init_bound(alg.bound_mode(), estimator.current(), filter.weight().norm_sqr())?;
        Some((tracker, estimator))
    } else {
        None
    };

    let mut sinr_db = Vec::with_capacity(n);
    let mut events = Vec::with_capacity(n);
    let mut deltas = Vec::with_capacity(n);
    let mut weight = filter.weight();
    let mut current = meter.sinr_db(&weight)?;
    for x in snapshots {
        let delta = match bound.as_mut() {
            Some((tracker, estimator)) => {
                let norm = weight.norm_sqr();
                let y = filter.output(x)?;
                tracker.set_noise_power_estimate(estimator.observe(y, norm))?;
                tracker.update(norm)?
            }
            None => 0.0,
        };
        let event = filter.update(x, delta)?;
        if event.updated {
            weight = filter.weight();
            current = meter.sinr_db(&weight)?;
        }
        sinr_db.push(current);
        events.push(event);
        deltas.push(delta);
    }
    Ok(RunResult {
        sinr_db,
        events,
        deltas,
        final_weight: weight,
    })
}

/// All algorithms on run `run`; one entry per configured algorithm.
pub fn run_single(config: &ExperimentConfig, run: usize) -> Result<Vec<Result<RunResult>>> {
    let scenario = build_scenario(config, run)?;
    let snapshots: Vec<CVector> = SnapshotStream::new(&scenario, run_seed(config, run))
        .map(|s| s.x)
        .collect();
    let meter = SinrMeter::new(&scenario);
    Ok(config
        .algorithms
        .iter()
        .map(|alg| run_algorithm(alg, &scenario, &snapshots, &meter))
        .collect())
}

/// Run `config.runs` realisations and aggregate per algorithm.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResults> {
    config.validate()?;
    let per_run: Vec<Vec<Result<RunResult>>> = (0..config.runs)
        .into_par_iter()
        .map(|run| run_single(config, run))
        .collect::<Result<_>>()?;

    let n = config.scenario.num_snapshots;
    let mut algorithms: Vec<AlgorithmResults> = config
        .algorithms
        .iter()
        .map(|alg| AlgorithmResults {
            label: alg.label().to_string(),
            kind: alg.algorithm,
            runs: Vec::new(),
            failures: Vec::new(),
            mean_sinr_db: Vec::new(),
            mean_update_rate: 0.0,
        })
        .collect();
    for (run, outcomes) in per_run.into_iter().enumerate() {
        for (slot, outcome) in algorithms.iter_mut().zip(outcomes) {
            match outcome {
                Ok(result) => slot.runs.push((run, result)),
                Err(e) => slot.failures.push(RunFailure {
                    run,
                    message: e.to_string(),
                }),
            }
        }
    }
    for slot in &mut algorithms {
        slot.mean_sinr_db = mean_trace(slot.runs.iter().map(|(_, r)| r.sinr_db.as_slice()), n, config.averaging);
        let updates: usize = slot.runs.iter().map(|(_, r)| r.update_count()).sum();
        let denom = slot.runs.len() * n;
        slot.mean_update_rate = if denom == 0 {
            f64::NAN
        } else {
            updates as f64 / denom as f64
        };
    }
    Ok(ExperimentResults {
        runs: config.runs,
        num_snapshots: n,
        algorithms,
    })
}

fn mean_trace<'a>(traces: impl Iterator<Item = &'a [f64]>, n: usize, averaging: Averaging) -> Vec<f64> {
    let mut acc = vec![0.0; n];
    let mut count = 0usize;
    for t in traces {
        count += 1;
        for (a, &v) in acc.iter_mut().zip(t) {
            *a += match averaging {
                Averaging::Db => v,
                Averaging::Linear => 10f64.powf(v / 10.0),
            };
        }
    }
    if count == 0 {
        return vec![f64::NAN; n];
    }
    acc.into_iter()
        .map(|s| {
            let mean = s / count as f64;
            match averaging {
                Averaging::Db => mean,
                Averaging::Linear => 10.0 * mean.log10(),
            }
        })
        .collect()
}

/// Steering vector of the configured desired direction.
pub fn desired_steering(config: &ExperimentConfig) -> Result<CVector> {
    let g = config.scenario.geometry()?;
    Ok(steering_vector(&g, config.scenario.desired_doa_deg.to_radians()))
}
