//! Engine configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::DEFAULT_SEED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    Euler,
    RungeKutta4,
}

/// Numerical settings for path tracking and solution post-processing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    pub predictor: Predictor,
    /// Final Newton polish stops once the step is below this (scaled by `max(1, |x|)`).
    pub corrector_tol: f64,
    /// Relative Newton tolerance while tracking, before `endgame_start`.
    pub tracking_tol: f64,
    /// Relative Newton tolerance while tracking, after `endgame_start`.
    pub endgame_tol: f64,
    pub endgame_start: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
    /// Accepted steps allowed past `endgame_start`. A path that uses them up is classified
    /// like a step underflow.
    pub endgame_max_steps: usize,
    /// Affine solution norm beyond which a path counts as diverging.
    pub divergence_norm: f64,
    /// Relative distance below which two endpoints are the same solution.
    pub dedup_tol: f64,
    /// Imaginary parts below this (relative to the solution norm) count as real.
    pub real_tol: f64,
    /// Relative residual tolerance for the surplus equations.
    pub surplus_tol: f64,
    /// Accepted solutions need `sigma_min > singular_tol * sigma_max`.
    pub singular_tol: f64,
    /// Fraction of failed paths above which a run is repeated with a fresh `gamma`.
    pub max_failure_fraction: f64,
    pub gamma_retries: usize,
    /// Track one path per orbit of the coordinate sign-flip group and generate the other
    /// endpoints by reflection. The homotopy is equivariant under these flips, so this
    /// divides the work by `2^d`; sign closure then holds by construction.
    pub orbit_reduction: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            predictor: Predictor::RungeKutta4,
            corrector_tol: 1e-12,
            tracking_tol: 1e-8,
            endgame_tol: 1e-10,
            endgame_start: 0.99,
            initial_step: 0.02,
            max_step: 0.1,
            min_step: 1e-14,
            max_steps: 20_000,
            endgame_max_steps: 500,
            divergence_norm: 1e8,
            dedup_tol: 1e-8,
            real_tol: 1e-7,
            surplus_tol: 1e-8,
            singular_tol: 1e-8,
            max_failure_fraction: 0.01,
            gamma_retries: 1,
            orbit_reduction: false,
        }
    }
}

/// Everything a counting run depends on. Identical configs give identical results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub seed: u64,
    /// Largest `k` for which the `2^k` paths of the total-degree homotopy are tracked.
    pub path_cap: usize,
    /// Independent generic edge-length samples that must agree on `c_d`.
    pub lambda_samples: usize,
    /// Resampling rounds after a disagreement or an unreliable round.
    pub retries: usize,
    /// Integer coordinates are drawn from `[-bound, bound]` and divided by `bound`.
    pub sample_bound: i64,
    /// Worker threads for path tracking; `None` uses the rayon default.
    pub threads: Option<usize>,
    pub tracker: TrackerConfig,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            seed: DEFAULT_SEED,
            path_cap: 22,
            lambda_samples: 2,
            retries: 2,
            sample_bound: 1 << 10,
            threads: None,
            tracker: TrackerConfig::default(),
        }
    }
}

impl EngineConfig {
    pub fn with_seed(seed: u64) -> Self {
        EngineConfig { seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tracker;
        let positive = [
            ("corrector_tol", t.corrector_tol),
            ("tracking_tol", t.tracking_tol),
            ("endgame_tol", t.endgame_tol),
            ("initial_step", t.initial_step),
            ("max_step", t.max_step),
            ("min_step", t.min_step),
            ("divergence_norm", t.divergence_norm),
            ("dedup_tol", t.dedup_tol),
            ("real_tol", t.real_tol),
            ("surplus_tol", t.surplus_tol),
            ("singular_tol", t.singular_tol),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidOperation(format!("tolerance {name} must be positive")));
        }
        if self.path_cap == 0 || self.path_cap > 30 {
            return Err(Error::InvalidOperation("path_cap must be in 1..=30".into()));
        }
        if self.lambda_samples == 0 {
            return Err(Error::InvalidOperation("lambda_samples must be positive".into()));
        }
        if self.sample_bound < 1 {
            return Err(Error::InvalidOperation("sample_bound must be positive".into()));
        }
        if !(0.0..1.0).contains(&t.endgame_start) {
            return Err(Error::InvalidOperation("endgame_start must lie in [0, 1)".into()));
        }
        Ok(())
    }
}
