//! Total-degree homotopy `H(z, t) = (1 − t) γ G(z) + t F(z)` tracked in projective
//! coordinates `z = (z0, x)` on a random affine chart `a · z = 1`.
//!
//! `F` is the homogenised pinned system and `G_i = x_i² − z0²`, so the start solutions are
//! the `2^k` sign vectors. Paths heading to solutions at infinity stay bounded on the chart,
//! and are recognised by their affine norm `‖x‖ / |z0|`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::linalg::{norm, Lu};
use super::system::PinnedSystem;
use crate::config::{Predictor, TrackerConfig};
use crate::rng::{stream_rng, streams};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStatus {
    Converged,
    Diverged,
    Failed,
}

#[derive(Debug, Clone)]
pub struct PathResult {
    pub index: u64,
    pub status: PathStatus,
    /// Affine endpoint (polished) for converged paths.
    pub endpoint: Option<Vec<Complex64>>,
    pub t: f64,
    pub steps: usize,
}

/// The homotopy with its random constants.
#[derive(Debug, Clone)]
pub struct Homotopy<'a> {
    system: &'a PinnedSystem,
    gamma: Complex64,
    patch: Vec<Complex64>,
}

impl<'a> Homotopy<'a> {
    /// Draws `γ` on the unit circle and a unit-modulus chart from the run seed.
    pub fn new(system: &'a PinnedSystem, seed: u64, attempt: u64) -> Self {
        let mut rng = stream_rng(seed, &[streams::GAMMA, attempt]);
        let gamma = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let mut rng = stream_rng(seed, &[streams::PATCH, attempt]);
        let patch = (0..=system.unknowns())
            .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        Homotopy { system, gamma, patch }
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn system(&self) -> &PinnedSystem {
        self.system
    }

    /// Projective size of the system (`k + 1`).
    pub fn dim(&self) -> usize {
        self.system.unknowns() + 1
    }

    /// Start point for path `index`: bit `i` of the index picks the sign of `x_i`.
    pub fn start_point(&self, index: u64) -> Vec<Complex64> {
        let m = self.dim();
        let mut z = vec![ONE; m];
        for (i, zi) in z.iter_mut().enumerate().skip(1) {
            if index >> (i - 1) & 1 == 1 {
                *zi = -ONE;
            }
        }
        let s: Complex64 = self.patch.iter().zip(&z).map(|(a, b)| a * b).sum();
        let inv = s.inv();
        z.iter_mut().for_each(|c| *c *= inv);
        z
    }

    /// Fills `h = H(z, t)`, the Jacobian `∂H/∂z` and optionally `∂H/∂t`.
    fn eval(&self, z: &[Complex64], t: f64, h: &mut [Complex64], jac: &mut [Complex64], mut ht: Option<&mut [Complex64]>) {
        let m = self.dim();
        let k = m - 1;
        let z0 = z[0];
        let x = &z[1..];
        let s = (1.0 - t) * self.gamma;
        let tc = Complex64::new(t, 0.0);
        jac.fill(ZERO);
        for (i, eq) in self.system.square.iter().enumerate() {
            let f = eq.half_square(x) - eq.target * z0 * z0;
            let g = x[i] * x[i] - z0 * z0;
            h[i] = s * g + tc * f;
            let row = &mut jac[i * m..(i + 1) * m];
            eq.add_gradient(x, tc, row, 1);
            row[1 + i] += s * 2.0 * x[i];
            row[0] = -2.0 * z0 * (tc * eq.target + s);
            if let Some(ht) = ht.as_deref_mut() {
                ht[i] = f - self.gamma * g;
            }
        }
        h[k] = self.patch.iter().zip(z).map(|(a, b)| a * b).sum::<Complex64>() - ONE;
        jac[k * m..].copy_from_slice(&self.patch);
        if let Some(ht) = ht {
            ht[k] = ZERO;
        }
    }
}

/// Scratch buffers for one path, reused across paths on the same worker.
pub struct Workspace {
    lu: Lu,
    h: Vec<Complex64>,
    ht: Vec<Complex64>,
    tmp: Vec<Complex64>,
    k: [Vec<Complex64>; 4],
    y: Vec<Complex64>,
    pred: Vec<Complex64>,
}

impl Workspace {
    pub fn new(m: usize) -> Self {
        let v = || vec![ZERO; m];
        Workspace { lu: Lu::new(m), h: v(), ht: v(), tmp: v(), k: [v(), v(), v(), v()], y: v(), pred: v() }
    }
}

/// Tangent `dz/dt = −H_z⁻¹ H_t` into `out`.
fn tangent(hom: &Homotopy, z: &[Complex64], t: f64, ws: &mut Workspace, slot: usize) -> bool {
    let Workspace { lu, h, ht, tmp, k, .. } = ws;
    hom.eval(z, t, h, lu.matrix_mut(), Some(ht));
    if !lu.factor() {
        return false;
    }
    let out = &mut k[slot];
    for (o, v) in out.iter_mut().zip(ht.iter()) {
        *o = -v;
    }
    lu.solve(out, tmp);
    out.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

fn predict(hom: &Homotopy, z: &[Complex64], t: f64, dt: f64, predictor: Predictor, ws: &mut Workspace) -> bool {
    let m = z.len();
    if !tangent(hom, z, t, ws, 0) {
        return false;
    }
    match predictor {
        Predictor::Euler => {
            for i in 0..m {
                ws.pred[i] = z[i] + ws.k[0][i] * dt;
            }
        }
        Predictor::RungeKutta4 => {
            let stages = [(0usize, 0.5), (1, 0.5), (2, 1.0)];
            for (slot, (prev, frac)) in stages.into_iter().enumerate() {
                for i in 0..m {
                    ws.y[i] = z[i] + ws.k[prev][i] * (dt * frac);
                }
                let y = std::mem::take(&mut ws.y);
                let ok = tangent(hom, &y, t + dt * frac, ws, slot + 1);
                ws.y = y;
                if !ok {
                    return false;
                }
            }
            for i in 0..m {
                ws.pred[i] = z[i] + (ws.k[0][i] + 2.0 * ws.k[1][i] + 2.0 * ws.k[2][i] + ws.k[3][i]) * (dt / 6.0);
            }
        }
    }
    true
}

/// Newton on `H(·, t)` starting from `z`; succeeds when a step falls below `tol · ‖z‖`
/// within `iters` iterations while contracting.
fn correct(hom: &Homotopy, z: &mut [Complex64], t: f64, tol: f64, iters: usize, ws: &mut Workspace) -> bool {
    let mut last = f64::INFINITY;
    for _ in 0..iters {
        let Workspace { lu, h, tmp, .. } = ws;
        hom.eval(z, t, h, lu.matrix_mut(), None);
        if !lu.factor() {
            return false;
        }
        lu.solve(h, tmp);
        let step = norm(h);
        if !step.is_finite() || step > 0.5 * last {
            return false;
        }
        for (zi, d) in z.iter_mut().zip(h.iter()) {
            *zi -= d;
        }
        if step <= tol * norm(z).max(f64::MIN_POSITIVE) {
            return true;
        }
        last = step;
    }
    false
}

fn affine_norm(z: &[Complex64]) -> f64 {
    let z0 = z[0].norm();
    if z0 == 0.0 {
        return f64::INFINITY;
    }
    norm(&z[1..]) / z0
}

/// Tracks path `index` from `t = 0` to `t = 1`.
pub fn track_path(hom: &Homotopy, index: u64, cfg: &TrackerConfig, ws: &mut Workspace) -> PathResult {
    let mut z = hom.start_point(index);
    let mut t = 0.0_f64;
    let mut h = cfg.initial_step;
    let mut streak = 0;
    let mut steps = 0;
    let mut late_norm: Option<f64> = None;
    let mut endgame_steps = 0;

    let stalled = |z: &[Complex64], t: f64, late_norm: Option<f64>, steps: usize| {
        let growing = late_norm.is_some_and(|n0| affine_norm(z) > n0);
        let status = if t > 0.9 && growing { PathStatus::Diverged } else { PathStatus::Failed };
        PathResult { index, status, endpoint: None, t, steps }
    };

    while t < 1.0 {
        if steps >= cfg.max_steps {
            return stalled(&z, t, late_norm, steps);
        }
        steps += 1;
        let last = h >= 1.0 - t;
        let dt = if last { 1.0 - t } else { h };
        let t1 = if last { 1.0 } else { t + dt };
        let tol = if t1 > cfg.endgame_start { cfg.endgame_tol } else { cfg.tracking_tol };
        let mut ok = predict(hom, &z, t, dt, cfg.predictor, ws);
        if ok {
            let mut cand = std::mem::take(&mut ws.pred);
            ok = correct(hom, &mut cand, t1, tol, 3, ws);
            if ok {
                z.copy_from_slice(&cand);
            }
            ws.pred = cand;
        }
        if ok {
            t = t1;
            streak += 1;
            if streak >= 3 {
                h = (2.0 * h).min(cfg.max_step);
                streak = 0;
            }
            let an = affine_norm(&z);
            if an > cfg.divergence_norm {
                return PathResult { index, status: PathStatus::Diverged, endpoint: None, t, steps };
            }
            if t >= 0.9 && late_norm.is_none() {
                late_norm = Some(an);
            }
            if t > cfg.endgame_start && t < 1.0 {
                endgame_steps += 1;
                if endgame_steps > cfg.endgame_max_steps {
                    return stalled(&z, t, late_norm, steps);
                }
            }
        } else {
            h *= 0.5;
            streak = 0;
            if h < cfg.min_step {
                return stalled(&z, t, late_norm, steps);
            }
        }
    }

    // sharpen on the chart, then move to affine coordinates and polish there
    correct(hom, &mut z, 1.0, cfg.corrector_tol, 6, ws);
    if affine_norm(&z) > cfg.divergence_norm {
        return PathResult { index, status: PathStatus::Diverged, endpoint: None, t, steps };
    }
    let inv = z[0].inv();
    let x: Vec<Complex64> = z[1..].iter().map(|c| c * inv).collect();
    match polish(hom.system(), &x, cfg) {
        Some(x) => PathResult { index, status: PathStatus::Converged, endpoint: Some(x), t, steps },
        None => stalled(&z, t, late_norm, steps),
    }
}

/// Affine Newton on the square system until a step falls below
/// `corrector_tol · max(1, ‖x‖)`; `None` if that does not happen within 20 iterations.
pub fn polish(system: &PinnedSystem, x: &[Complex64], cfg: &TrackerConfig) -> Option<Vec<Complex64>> {
    let k = system.unknowns();
    let mut x = x.to_vec();
    let mut lu = Lu::new(k);
    let mut f = vec![ZERO; k];
    let mut tmp = vec![ZERO; k];
    for _ in 0..20 {
        system.jacobian_square(&x, lu.matrix_mut());
        if !lu.factor() {
            return None;
        }
        system.eval_square(&x, &mut f);
        lu.solve(&mut f, &mut tmp);
        let step = norm(&f);
        if !step.is_finite() {
            return None;
        }
        for (xi, d) in x.iter_mut().zip(&f) {
            *xi -= d;
        }
        if step <= cfg.corrector_tol * norm(&x).max(1.0) {
            return Some(x);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EngineConfig;
    use crate::engine::system::build_pinned_system;
    use crate::graph::{named, Dimension};
    use crate::rigidity::ScalarKind;

    #[test]
    fn start_points_solve_start_system() {
        let cfg = EngineConfig::default();
        let s = build_pinned_system(&named::k4_minus_edge(), Dimension::new(2).unwrap(), 3, ScalarKind::Complex, &cfg)
            .unwrap();
        let hom = Homotopy::new(&s, 3, 0);
        let m = hom.dim();
        let mut h = vec![ZERO; m];
        let mut jac = vec![ZERO; m * m];
        for idx in 0..(1u64 << s.unknowns()) {
            let z = hom.start_point(idx);
            hom.eval(&z, 0.0, &mut h, &mut jac, None);
            assert!(norm(&h) < 1e-12);
        }
    }

    #[test]
    fn homotopy_jacobian_matches_finite_differences() {
        let cfg = EngineConfig::default();
        let s = build_pinned_system(&named::prism_g3(), Dimension::new(2).unwrap(), 5, ScalarKind::Complex, &cfg)
            .unwrap();
        let hom = Homotopy::new(&s, 5, 0);
        let m = hom.dim();
        let mut rng = stream_rng(11, &[]);
        let z: Vec<Complex64> =
            (0..m).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let t = 0.37;
        let (mut h, mut jac, mut ht) = (vec![ZERO; m], vec![ZERO; m * m], vec![ZERO; m]);
        hom.eval(&z, t, &mut h, &mut jac, Some(&mut ht));
        let eps = 1e-6;
        let mut scratch = vec![ZERO; m * m];
        for c in 0..m {
            let (mut zp, mut zm) = (z.clone(), z.clone());
            zp[c] += eps;
            zm[c] -= eps;
            let (mut hp, mut hm) = (vec![ZERO; m], vec![ZERO; m]);
            hom.eval(&zp, t, &mut hp, &mut scratch, None);
            hom.eval(&zm, t, &mut hm, &mut scratch, None);
            for r in 0..m {
                let fd = (hp[r] - hm[r]) / (2.0 * eps);
                assert!((fd - jac[r * m + c]).norm() <= 1e-6 * jac[r * m + c].norm().max(1.0));
            }
        }
        let (mut hp, mut hm) = (vec![ZERO; m], vec![ZERO; m]);
        hom.eval(&z, t + eps, &mut hp, &mut scratch, None);
        hom.eval(&z, t - eps, &mut hm, &mut scratch, None);
        for r in 0..m {
            let fd = (hp[r] - hm[r]) / (2.0 * eps);
            assert!((fd - ht[r]).norm() <= 1e-6 * ht[r].norm().max(1.0));
        }
    }
}
