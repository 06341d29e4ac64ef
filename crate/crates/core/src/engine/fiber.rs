//! Tracking every path of the homotopy and turning the endpoints into a fiber.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg::norm;
use super::system::PinnedSystem;
use super::tracker::{polish, track_path, Homotopy, PathResult, PathStatus, Workspace};
use crate::config::EngineConfig;
use crate::error::{Error, Result};

/// One point of the pinned fiber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub x: Vec<Complex64>,
    /// Largest relative defect over all edge equations, square and surplus.
    pub residual: f64,
    pub real: bool,
    /// Polished Newton converged and the pinned Jacobian is well conditioned here.
    pub newton_certified: bool,
    /// Added as the sign-flip image of another solution rather than reached by a path.
    pub recovered: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStats {
    pub tracked: u64,
    pub converged: u64,
    pub diverged: u64,
    pub failed: u64,
    /// Converged endpoints that coincided with an earlier endpoint of the same run.
    pub duplicates: u64,
    /// Endpoints rejected because the Jacobian is numerically singular.
    pub singular: u64,
    /// Endpoints rejected by the surplus equations.
    pub off_surplus: u64,
    pub recovered: u64,
    pub runs: u64,
}

impl PathStats {
    pub fn add(&mut self, o: &PathStats) {
        self.tracked += o.tracked;
        self.converged += o.converged;
        self.diverged += o.diverged;
        self.failed += o.failed;
        self.duplicates += o.duplicates;
        self.singular += o.singular;
        self.off_surplus += o.off_surplus;
        self.recovered += o.recovered;
        self.runs += o.runs;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub solutions: Vec<Solution>,
    pub stats: PathStats,
    /// `2^d`, the order of the sign-flip group acting on the fiber.
    pub group_order: u64,
    /// The pinned point the targets were sampled from lies in the fiber.
    pub seed_point_found: bool,
    /// Every sign-flip image of a solution is a solution.
    pub sign_closed: bool,
    /// Some run had few enough failures and no coinciding endpoints, the seed point was
    /// found and the fiber size is divisible by `2^d`.
    pub reliable: bool,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn real_count(&self) -> usize {
        self.solutions.iter().filter(|s| s.real).count()
    }

    /// `|fiber| / 2^d` when divisible.
    pub fn realisation_count(&self) -> Option<u64> {
        let n = self.len() as u64;
        (n % self.group_order == 0).then_some(n / self.group_order)
    }

    pub fn real_realisation_count(&self) -> Option<u64> {
        let n = self.real_count() as u64;
        (n % self.group_order == 0).then_some(n / self.group_order)
    }

    pub fn require_reliable(self) -> Result<Self> {
        if self.reliable {
            Ok(self)
        } else {
            Err(Error::ExcessiveFailures { failed: self.stats.failed, tracked: self.stats.tracked })
        }
    }
}

fn same_point(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    let scale = norm(a).max(norm(b)).max(1.0);
    let mut d = 0.0;
    for (x, y) in a.iter().zip(b) {
        d += (x - y).norm_sqr();
    }
    d.sqrt() <= tol * scale
}

fn find(points: &[Solution], x: &[Complex64], tol: f64) -> Option<usize> {
    points.iter().position(|s| same_point(&s.x, x, tol))
}

fn well_conditioned(system: &PinnedSystem, x: &[Complex64], tol: f64) -> bool {
    let k = system.unknowns();
    let mut jac = vec![Complex64::new(0.0, 0.0); k * k];
    system.jacobian_square(x, &mut jac);
    let m = DMatrix::from_row_slice(k, k, &jac);
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    max > 0.0 && min > tol * max
}

fn is_real(x: &[Complex64], tol: f64) -> bool {
    let scale = norm(x).max(1.0);
    x.iter().all(|c| c.im.abs() <= tol * scale)
}

/// Start indices to track: all of them, or one per sign-flip orbit (the first unknown of
/// every coordinate class keeps its `+` sign).
fn path_indices(system: &PinnedSystem, orbit_reduction: bool) -> Vec<u64> {
    let k = system.unknowns();
    let mut fixed = 0u64;
    if orbit_reduction {
        let classes = system.coordinate_classes();
        for j in 0..system.d.get() {
            if let Some(i) = classes.iter().position(|&c| c == j) {
                fixed |= 1 << i;
            }
        }
    }
    (0..1u64 << k).filter(|i| i & fixed == 0).collect()
}

fn run_paths(system: &PinnedSystem, config: &EngineConfig, attempt: u64, indices: &[u64]) -> Vec<PathResult> {
    let hom = Homotopy::new(system, system.seed, attempt);
    let m = hom.dim();
    let cfg = &config.tracker;
    indices
        .par_iter()
        .map_init(|| Workspace::new(m), |ws, &i| track_path(&hom, i, cfg, ws))
        .collect()
}

/// Tracks all `2^k` paths (`k` = number of unknowns) and post-processes the endpoints:
/// deduplication, Jacobian and surplus filters, sign-flip closure and real flags. A run with
/// coinciding endpoints or too many failed paths is repeated with a fresh `γ` and chart, and
/// the endpoints of all runs are merged.
pub fn track_fiber(system: &PinnedSystem, config: &EngineConfig) -> Result<SolutionSet> {
    let k = system.unknowns();
    if k > config.path_cap {
        return Err(Error::PathBudgetExceeded { needed: k, cap: config.path_cap });
    }
    let pool = match config.threads {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidOperation(format!("thread pool: {e}")))?,
        ),
        None => None,
    };
    let cfg = &config.tracker;
    let group_order = system.d.sign_group_order();
    let indices = path_indices(system, cfg.orbit_reduction);

    let mut stats = PathStats::default();
    let mut accepted: Vec<Solution> = Vec::new();
    let mut clean_run = false;
    for attempt in 0..=cfg.gamma_retries as u64 {
        let results = match &pool {
            Some(p) => p.install(|| run_paths(system, config, attempt, &indices)),
            None => run_paths(system, config, attempt, &indices),
        };
        let mut run = PathStats { tracked: indices.len() as u64, runs: 1, ..Default::default() };
        let mut this_run: Vec<Vec<Complex64>> = Vec::new();
        for r in results {
            match r.status {
                PathStatus::Diverged => run.diverged += 1,
                PathStatus::Failed => run.failed += 1,
                PathStatus::Converged => {
                    run.converged += 1;
                    let x = r.endpoint.expect("converged path has an endpoint");
                    if this_run.iter().any(|y| same_point(y, &x, cfg.dedup_tol)) {
                        run.duplicates += 1;
                        continue;
                    }
                    let images: Vec<Vec<Complex64>> = if cfg.orbit_reduction {
                        (0..group_order as u32).map(|mask| system.flip(&x, mask)).collect()
                    } else {
                        vec![x]
                    };
                    for x in images {
                        if this_run.iter().any(|y| same_point(y, &x, cfg.dedup_tol)) {
                            continue;
                        }
                        this_run.push(x.clone());
                        if find(&accepted, &x, cfg.dedup_tol).is_some() {
                            continue;
                        }
                        if !well_conditioned(system, &x, cfg.singular_tol) {
                            run.singular += 1;
                            continue;
                        }
                        if system.max_surplus_residual(&x) >= cfg.surplus_tol {
                            run.off_surplus += 1;
                            continue;
                        }
                        let residual = system.max_relative_residual(&x).max(system.max_surplus_residual(&x));
                        accepted.push(Solution {
                            real: is_real(&x, cfg.real_tol),
                            x,
                            residual,
                            newton_certified: true,
                            recovered: false,
                        });
                    }
                }
            }
        }
        stats.add(&run);
        let failure_ok = run.failed as f64 <= cfg.max_failure_fraction * run.tracked as f64;
        if failure_ok && run.duplicates == 0 {
            clean_run = true;
            break;
        }
    }

    // sign-flip closure
    let mut i = 0;
    while i < accepted.len() {
        for mask in 1..group_order as u32 {
            let y = system.flip(&accepted[i].x, mask);
            if find(&accepted, &y, cfg.dedup_tol).is_some() {
                continue;
            }
            if let Some(y) = polish(system, &y, cfg) {
                if find(&accepted, &y, cfg.dedup_tol).is_none()
                    && system.max_surplus_residual(&y) < cfg.surplus_tol
                {
                    let residual = system.max_relative_residual(&y).max(system.max_surplus_residual(&y));
                    let certified = well_conditioned(system, &y, cfg.singular_tol);
                    accepted.push(Solution { real: is_real(&y, cfg.real_tol), x: y, residual, newton_certified: certified, recovered: true });
                    stats.recovered += 1;
                }
            }
        }
        i += 1;
    }
    let sign_closed = accepted.iter().all(|s| {
        (1..group_order as u32).all(|mask| find(&accepted, &system.flip(&s.x, mask), cfg.dedup_tol).is_some())
    });
    let seed_point_found = find(&accepted, &system.sample, cfg.dedup_tol).is_some();
    let divisible = accepted.len() as u64 % group_order == 0;
    Ok(SolutionSet {
        solutions: accepted,
        stats,
        group_order,
        seed_point_found,
        sign_closed,
        reliable: clean_run && seed_point_found && divisible && sign_closed,
    })
}
