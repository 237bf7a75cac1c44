//! JSON experiment configuration.
//!
//! Every key has a default matching the 64-element, 25-user experiment, so
//! `{"scenario": {}, "algorithms": [{"algorithm": "jio_sm_rls"}]}` is a
//! complete config. Unknown keys are rejected.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bound::{init_bound, BoundMode, NoiseEstimatorKind};
use crate::error::{Error, Result};
use crate::jio::{GainPolicy, Lambda1Policy};
use crate::signal::{ArrayGeometry, Powers};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub scenario: ScenarioConfig,
    pub algorithms: Vec<AlgorithmConfig>,
    /// Monte-Carlo realisations K.
    #[serde(default = "defaults::runs")]
    pub runs: usize,
    /// Run `j` uses seed `base_seed + j`.
    #[serde(default = "defaults::base_seed")]
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub averaging: Averaging,
}

/// How per-run SINR curves are combined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Arithmetic mean of dB values.
    #[default]
    Db,
    /// Mean of linear ratios, reported in dB.
    Linear,
}

/// Which power is held fixed when converting SNR/INR levels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Desired power = `reference_power`; unit-amplitude BPSK by default.
    #[default]
    Signal,
    /// Noise power = `reference_power`.
    Noise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub num_elements: usize,
    pub spacing_ratio: f64,
    /// Users q including the desired one.
    pub num_users: usize,
    pub desired_doa_deg: f64,
    /// Explicit interferer directions; drawn per run when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interferer_doas_deg: Option<Vec<f64>>,
    /// Exclusion half-width around the desired direction for drawn interferers.
    pub guard_deg: f64,
    pub snr_db: f64,
    pub inr_db: f64,
    pub normalization: Normalization,
    pub reference_power: f64,
    pub num_snapshots: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            num_elements: 64,
            spacing_ratio: 0.5,
            num_users: 25,
            desired_doa_deg: 90.0,
            interferer_doas_deg: None,
            guard_deg: 5.0,
            snr_db: 10.0,
            inr_db: 30.0,
            normalization: Normalization::Signal,
            reference_power: 1.0,
            num_snapshots: 1000,
        }
    }
}

impl ScenarioConfig {
    pub fn powers(&self) -> Powers {
        match self.normalization {
            Normalization::Signal => Powers::signal_referenced(self.snr_db, self.inr_db, self.reference_power),
            Normalization::Noise => Powers::noise_referenced(self.snr_db, self.inr_db, self.reference_power),
        }
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.num_elements, self.spacing_ratio)
    }

    fn validate(&self) -> Result<()> {
        self.geometry().map_err(config_err)?;
        if self.num_users == 0 || self.num_users > self.num_elements {
            return Err(Error::Config(format!(
                "scenario.num_users must lie in [1, num_elements = {}], got {}",
                self.num_elements, self.num_users
            )));
        }
        if self.num_snapshots == 0 {
            return Err(Error::Config("scenario.num_snapshots must be at least 1".into()));
        }
        for (name, v) in [
            ("snr_db", self.snr_db),
            ("inr_db", self.inr_db),
            ("desired_doa_deg", self.desired_doa_deg),
            ("guard_deg", self.guard_deg),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("scenario.{name} must be finite")));
            }
        }
        if !(self.reference_power > 0.0 && self.reference_power.is_finite()) {
            return Err(Error::Config("scenario.reference_power must be positive".into()));
        }
        if !(0.0..90.0).contains(&self.guard_deg) {
            return Err(Error::Config("scenario.guard_deg must lie in [0, 90)".into()));
        }
        if let Some(doas) = &self.interferer_doas_deg {
            if doas.len() != self.num_users - 1 {
                return Err(Error::Config(format!(
                    "scenario.interferer_doas_deg has {} entries, num_users - 1 = {}",
                    doas.len(),
                    self.num_users - 1
                )));
            }
            let mut all = doas.clone();
            all.push(self.desired_doa_deg);
            all.sort_by(f64::total_cmp);
            if all.windows(2).any(|w| w[1] - w[0] < 1e-9) || all.iter().any(|d| !d.is_finite()) {
                return Err(Error::Config("scenario directions must be finite and distinct".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    #[serde(alias = "mvdr_oracle")]
    Mvdr,
    FrRls,
    FrSmRls,
    JioRls,
    JioSmRls,
}

impl AlgorithmKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Mvdr => "mvdr",
            AlgorithmKind::FrRls => "fr_rls",
            AlgorithmKind::FrSmRls => "fr_sm_rls",
            AlgorithmKind::JioRls => "jio_rls",
            AlgorithmKind::JioSmRls => "jio_sm_rls",
        }
    }

    pub fn uses_bound(self) -> bool {
        matches!(self, AlgorithmKind::FrSmRls | AlgorithmKind::JioSmRls)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub algorithm: AlgorithmKind,
    /// Name in the CSV `algorithm` column; defaults to the kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default = "defaults::gamma")]
    pub gamma: f64,
    #[serde(default = "defaults::rank")]
    pub rank: usize,
    #[serde(default = "defaults::rho")]
    pub rho: f64,
    #[serde(default = "defaults::varrho")]
    pub varrho: f64,
    /// Constant data weight of the always-update RLS variants.
    #[serde(default = "defaults::forgetting")]
    pub forgetting: f64,
    #[serde(default)]
    pub lambda1: Lambda1Config,
    #[serde(default)]
    pub bound: BoundConfig,
}

impl AlgorithmConfig {
    pub fn new(algorithm: AlgorithmKind) -> Self {
        AlgorithmConfig {
            algorithm,
            label: None,
            gamma: defaults::gamma(),
            rank: defaults::rank(),
            rho: defaults::rho(),
            varrho: defaults::varrho(),
            forgetting: defaults::forgetting(),
            lambda1: Lambda1Config::default(),
            bound: BoundConfig::default(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_fixed_bound(mut self, value: f64) -> Self {
        self.bound.mode = BoundModeKind::Fixed;
        self.bound.fixed_value = value;
        self
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.algorithm.name())
    }

    pub fn bound_mode(&self) -> BoundMode {
        match self.bound.mode {
            BoundModeKind::TimeVarying => BoundMode::TimeVarying {
                alpha: self.bound.alpha,
                beta: self.bound.beta,
            },
            BoundModeKind::Fixed => BoundMode::Fixed {
                value: self.bound.fixed_value,
            },
        }
    }

    fn validate(&self, num_elements: usize) -> Result<()> {
        let label = self.label();
        let bad = |what: String| Error::Config(format!("algorithm {label}: {what}"));
        if !(self.gamma.is_finite() && self.gamma != 0.0) {
            return Err(bad("gamma must be finite and nonzero".into()));
        }
        if matches!(self.algorithm, AlgorithmKind::JioRls | AlgorithmKind::JioSmRls)
            && (self.rank == 0 || self.rank > num_elements)
        {
            return Err(bad(format!("rank must lie in [1, {num_elements}], got {}", self.rank)));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(bad("rho must be positive".into()));
        }
        if !(self.varrho > 0.0 && self.varrho.is_finite()) {
            return Err(bad("varrho must be positive".into()));
        }
        if !(self.forgetting > 0.0 && self.forgetting <= 1.0) {
            return Err(bad("forgetting must lie in (0, 1]".into()));
        }
        self.lambda1.policy().validate().map_err(|e| bad(e.to_string()))?;
        if self.algorithm.uses_bound() {
            init_bound(self.bound_mode(), 1.0, 1.0).map_err(|e| bad(e.to_string()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lambda1Config {
    pub min: f64,
    pub max: f64,
    pub gain_policy: GainPolicy,
    pub delta_squared: bool,
}

impl Default for Lambda1Config {
    fn default() -> Self {
        let p = Lambda1Policy::default();
        Lambda1Config {
            min: p.min,
            max: p.max,
            gain_policy: p.gain_policy,
            delta_squared: p.delta_squared,
        }
    }
}

impl Lambda1Config {
    pub fn policy(&self) -> Lambda1Policy {
        Lambda1Policy {
            min: self.min,
            max: self.max,
            gain_policy: self.gain_policy,
            delta_squared: self.delta_squared,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundModeKind {
    #[default]
    TimeVarying,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundConfig {
    pub mode: BoundModeKind,
    pub alpha: f64,
    pub beta: f64,
    pub fixed_value: f64,
    pub noise_estimator: NoiseEstimatorKind,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            mode: BoundModeKind::TimeVarying,
            alpha: 26.0,
            beta: 0.992,
            fixed_value: 1.0,
            noise_estimator: NoiseEstimatorKind::Oracle,
        }
    }
}

mod defaults {
    pub fn runs() -> usize {
        20
    }
    pub fn base_seed() -> u64 {
        1
    }
    pub fn gamma() -> f64 {
        1.0
    }
    pub fn rank() -> usize {
        5
    }
    pub fn rho() -> f64 {
        1.3e-3
    }
    pub fn varrho() -> f64 {
        1.0e-4
    }
    pub fn forgetting() -> f64 {
        crate::baselines::RLS_FORGETTING
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Default scenario with the given algorithms.
    pub fn with_algorithms(algorithms: Vec<AlgorithmConfig>) -> Self {
        ExperimentConfig {
            scenario: ScenarioConfig::default(),
            algorithms,
            runs: defaults::runs(),
            base_seed: defaults::base_seed(),
            output: None,
            averaging: Averaging::Db,
        }
    }

    /// The 25-user comparison: MVDR, FR-RLS, FR-SM-RLS, JIO-RLS, JIO-SM-RLS.
    pub fn user_comparison() -> Self {
        Self::with_algorithms(vec![
            AlgorithmConfig::new(AlgorithmKind::Mvdr),
            AlgorithmConfig::new(AlgorithmKind::FrRls),
            AlgorithmConfig::new(AlgorithmKind::FrSmRls),
            AlgorithmConfig::new(AlgorithmKind::JioRls),
            AlgorithmConfig::new(AlgorithmKind::JioSmRls),
        ])
    }

    /// Time-varying against fixed bounds 0.8 / 1.0 / 1.4 for `kind`.
    pub fn bound_comparison(kind: AlgorithmKind) -> Self {
        let base = AlgorithmConfig::new(kind);
        let name = kind.name();
        Self::with_algorithms(vec![
            base.clone().with_label(format!("{name}_tv")),
            base.clone().with_fixed_bound(1.0).with_label(format!("{name}_fixed_1.0")),
            base.clone().with_fixed_bound(1.4).with_label(format!("{name}_fixed_1.4")),
            base.with_fixed_bound(0.8).with_label(format!("{name}_fixed_0.8")),
        ])
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("algorithms must not be empty".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        self.scenario.validate()?;
        let mut seen = HashSet::new();
        for alg in &self.algorithms {
            if !seen.insert(alg.label()) {
                return Err(Error::Config(format!("duplicate algorithm label {}", alg.label())));
            }
            alg.validate(self.scenario.num_elements)?;
        }
        Ok(())
    }

    /// Copy with one parameter overridden, for sensitivity sweeps.
    ///
    /// `scenario.<key>` and top-level `runs`/`base_seed` are set once; any
    /// other (possibly dotted) key is set on every algorithm. Short names
    /// `alpha`, `beta`, `r`, `delta` map to `bound.alpha`, `bound.beta`,
    /// `rank` and `bound.fixed_value`.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let path = match name {
            "alpha" => "bound.alpha",
            "beta" => "bound.beta",
            "r" => "rank",
            "delta" => "bound.fixed_value",
            other => other,
        };
        let number = if value.fract() == 0.0 && (0.0..9.0e15).contains(&value) {
            Value::from(value as u64)
        } else {
            serde_json::Number::from_f64(value)
                .map(Value::Number)
                .ok_or_else(|| Error::Config(format!("sweep value {value} is not finite")))?
        };
        let mut doc = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        let keys: Vec<&str> = path.split('.').collect();
        match keys[0] {
            "scenario" | "runs" | "base_seed" => set_path(&mut doc, &keys, number)?,
            _ => {
                let algs = doc["algorithms"].as_array_mut().expect("algorithms serialise as array");
                for alg in algs {
                    set_path(alg, &keys, number.clone())?;
                }
            }
        }
        let cfg: ExperimentConfig = serde_json::from_value(doc)
            .map_err(|e| Error::Config(format!("sweep parameter {name}: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn set_path(doc: &mut Value, keys: &[&str], value: Value) -> Result<()> {
    let mut node = doc;
    for key in &keys[..keys.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("cannot descend into {key}")))?;
        node = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    let obj = node
        .as_object_mut()
        .ok_or_else(|| Error::Config("parameter path does not name an object field".into()))?;
    obj.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}
