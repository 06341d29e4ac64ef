//! Complex realisation numbers and sampled real counts.

use serde::{Deserialize, Serialize};

use super::fiber::{track_fiber, PathStats};
use super::system::build_pinned_system;
use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::graph::{Dimension, Graph};
use crate::rigidity::{is_d_rigid, ScalarKind};
use crate::rng::{derive, streams};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSummary {
    pub tracked: u64,
    pub converged: u64,
    pub diverged: u64,
    pub failed: u64,
}

impl From<&PathStats> for PathSummary {
    fn from(s: &PathStats) -> Self {
        PathSummary { tracked: s.tracked, converged: s.converged, diverged: s.diverged, failed: s.failed }
    }
}

impl PathSummary {
    fn add(&mut self, o: PathSummary) {
        self.tracked += o.tracked;
        self.converged += o.converged;
        self.diverged += o.diverged;
        self.failed += o.failed;
    }
}

/// One solved pinned system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub seed: u64,
    pub scalar: ScalarKind,
    /// `|fiber| / 2^d`, absent if the fiber size is not divisible by `2^d`.
    pub complex: Option<u64>,
    /// Real solutions divided by `2^d`.
    pub real: Option<u64>,
    pub fiber_size: usize,
    pub real_fiber_size: usize,
    /// Every sign-flip image of a fiber point is in the fiber.
    pub sign_closed: bool,
    pub reliable: bool,
    pub paths: PathSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountResult {
    pub c: u64,
    /// Largest real count over the real samples; 0 when none were taken.
    pub r_lower: u64,
    pub d: usize,
    pub paths: PathSummary,
    /// Real counts per real sample, in sample order.
    pub samples: Vec<u64>,
    pub reliable: bool,
    pub seed: u64,
    /// Every solved system, complex samples first.
    pub records: Vec<SampleRecord>,
    /// Set when `c` came from the complete-graph rule rather than from tracking.
    pub shortcut: bool,
}

fn complete_small(g: &Graph, d: Dimension) -> bool {
    g.n() <= d.get() + 1 && g.is_complete()
}

fn shortcut(d: Dimension, seed: u64) -> CountResult {
    CountResult {
        c: 1,
        r_lower: 1,
        d: d.get(),
        paths: PathSummary::default(),
        samples: Vec::new(),
        reliable: true,
        seed,
        records: Vec::new(),
        shortcut: true,
    }
}

fn solve_sample(g: &Graph, d: Dimension, seed: u64, kind: ScalarKind, config: &EngineConfig) -> Result<SampleRecord> {
    let system = build_pinned_system(g, d, seed, kind, config)?;
    let fiber = track_fiber(&system, config)?;
    Ok(SampleRecord {
        seed,
        scalar: kind,
        complex: fiber.realisation_count(),
        real: fiber.real_realisation_count(),
        fiber_size: fiber.len(),
        real_fiber_size: fiber.real_count(),
        sign_closed: fiber.sign_closed,
        reliable: fiber.reliable,
        paths: PathSummary::from(&fiber.stats),
    })
}

/// `c_d(G)` from `lambda_samples` independent complex samples that must agree. Rounds with
/// disagreeing or unreliable samples are repeated up to `retries` times; persistent
/// disagreement is an error, persistent unreliability is reported in the result.
pub fn count_complex(g: &Graph, d: Dimension, config: &EngineConfig) -> Result<CountResult> {
    config.validate()?;
    if complete_small(g, d) {
        return Ok(shortcut(d, config.seed));
    }
    if !is_d_rigid(g, d, config.seed).rigid {
        return Err(Error::NotRigid { d: d.get() });
    }
    let mut all = Vec::new();
    let mut paths = PathSummary::default();
    let mut last_counts = Vec::new();
    let mut fallback: Option<u64> = None;
    for round in 0..=config.retries as u64 {
        let mut records = Vec::with_capacity(config.lambda_samples);
        for s in 0..config.lambda_samples as u64 {
            let seed = derive(config.seed, &[streams::REALISATION, round, s]);
            let rec = solve_sample(g, d, seed, ScalarKind::Complex, config)?;
            paths.add(rec.paths);
            records.push(rec);
        }
        let counts: Vec<Option<u64>> = records.iter().map(|r| r.complex).collect();
        let agree = counts.iter().all(|c| c.is_some() && *c == counts[0]);
        let reliable = records.iter().all(|r| r.reliable);
        all.extend(records);
        if agree && reliable {
            return Ok(CountResult {
                c: counts[0].expect("agreeing counts are present"),
                r_lower: 0,
                d: d.get(),
                paths,
                samples: Vec::new(),
                reliable: true,
                seed: config.seed,
                records: all,
                shortcut: false,
            });
        }
        if agree {
            fallback = counts[0];
        }
        last_counts = counts.into_iter().map(|c| c.unwrap_or(0)).collect();
    }
    match fallback {
        Some(c) => Ok(CountResult {
            c,
            r_lower: 0,
            d: d.get(),
            paths,
            samples: Vec::new(),
            reliable: false,
            seed: config.seed,
            records: all,
            shortcut: false,
        }),
        None => Err(Error::Disagreement { counts: last_counts }),
    }
}

/// Real counts at `samples` real integer realisations. `c` is taken from the same fibers and
/// `reliable` requires that they all agree on it; `r_lower` is only ever a lower bound.
pub fn count_real_samples(g: &Graph, d: Dimension, samples: usize, config: &EngineConfig) -> Result<CountResult> {
    config.validate()?;
    if complete_small(g, d) {
        let mut r = shortcut(d, config.seed);
        r.samples = vec![1; samples];
        return Ok(r);
    }
    if !is_d_rigid(g, d, config.seed).rigid {
        return Err(Error::NotRigid { d: d.get() });
    }
    let mut records = Vec::with_capacity(samples);
    let mut paths = PathSummary::default();
    for i in 0..samples as u64 {
        let seed = derive(config.seed, &[streams::REAL_SAMPLES, i]);
        let rec = solve_sample(g, d, seed, ScalarKind::Real, config)?;
        paths.add(rec.paths);
        records.push(rec);
    }
    let real: Vec<u64> = records.iter().map(|r| r.real.unwrap_or(0)).collect();
    let complex: Vec<Option<u64>> = records.iter().map(|r| r.complex).collect();
    let agree = complex.iter().all(|c| c.is_some() && *c == complex[0]);
    let reliable = agree && records.iter().all(|r| r.reliable && r.real.is_some());
    Ok(CountResult {
        c: complex.iter().flatten().copied().max().unwrap_or(0),
        r_lower: real.iter().copied().max().unwrap_or(0),
        d: d.get(),
        paths,
        samples: real,
        reliable,
        seed: config.seed,
        records,
        shortcut: false,
    })
}

/// Complex count followed by real sampling, merged into one report.
pub fn count_with_real_samples(g: &Graph, d: Dimension, samples: usize, config: &EngineConfig) -> Result<CountResult> {
    let mut complex = count_complex(g, d, config)?;
    if samples == 0 {
        return Ok(complex);
    }
    let real = count_real_samples(g, d, samples, config)?;
    complex.r_lower = real.r_lower;
    complex.samples = real.samples;
    complex.paths.add(real.paths);
    complex.reliable &= real.reliable && real.c == complex.c;
    complex.records.extend(real.records);
    Ok(complex)
}
