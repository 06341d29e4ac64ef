//! The pinned edge-length system `½‖x(u) − x(v)‖² = λ_uv` on the pinned space.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::graph::{Dimension, Edge, Graph, Vertex};
use crate::rigidity::{canonical_pin, is_d_rigid, spanning_minimally_rigid_subgraph, Framework, PinLayout, ScalarKind};
use crate::rng::{derive, stream_rng, streams};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One quadratic equation; `terms[j]` holds the unknown indices of coordinate `j` of the two
/// endpoints (`None` where the coordinate is pinned to zero).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeEquation {
    pub edge: Edge,
    pub terms: Vec<(Option<usize>, Option<usize>)>,
    pub target: Complex64,
}

impl EdgeEquation {
    fn new(edge: Edge, layout: &PinLayout, target: Complex64) -> Self {
        let terms = (0..layout.d()).map(|j| (layout.var(edge.u(), j), layout.var(edge.v(), j))).collect();
        EdgeEquation { edge, terms, target }
    }

    #[inline]
    fn diff(&self, j: usize, x: &[Complex64]) -> Complex64 {
        let (a, b) = self.terms[j];
        a.map_or(ZERO, |i| x[i]) - b.map_or(ZERO, |i| x[i])
    }

    /// `½‖x(u) − x(v)‖²` without the target.
    #[inline]
    pub fn half_square(&self, x: &[Complex64]) -> Complex64 {
        let mut s = ZERO;
        for j in 0..self.terms.len() {
            let d = self.diff(j, x);
            s += d * d;
        }
        s * 0.5
    }

    #[inline]
    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.half_square(x) - self.target
    }

    /// Residual relative to the size of the terms it balances.
    pub fn relative_residual(&self, x: &[Complex64]) -> f64 {
        let mut mag = 0.0;
        for j in 0..self.terms.len() {
            mag += self.diff(j, x).norm_sqr();
        }
        let scale = (0.5 * mag).max(self.target.norm()).max(f64::MIN_POSITIVE);
        self.eval(x).norm() / scale
    }

    /// Adds `coef * ∇(½‖x(u) − x(v)‖²)` into `row` (indexed by unknown, offset by `shift`).
    #[inline]
    pub fn add_gradient(&self, x: &[Complex64], coef: Complex64, row: &mut [Complex64], shift: usize) {
        for j in 0..self.terms.len() {
            let d = self.diff(j, x) * coef;
            let (a, b) = self.terms[j];
            if let Some(i) = a {
                row[i + shift] += d;
            }
            if let Some(i) = b {
                row[i + shift] -= d;
            }
        }
    }
}

/// A square pinned system plus surplus equations from a rigid graph.
#[derive(Debug, Clone)]
pub struct PinnedSystem {
    pub graph: Graph,
    pub d: Dimension,
    pub layout: PinLayout,
    pub square: Vec<EdgeEquation>,
    pub surplus: Vec<EdgeEquation>,
    pub kind: ScalarKind,
    /// Pinned realisation the targets were computed from; a point of the fiber.
    pub sample: Vec<Complex64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub pins: Vec<Vertex>,
    pub unknowns: usize,
    pub square_edges: Vec<Edge>,
    pub surplus_edges: Vec<Edge>,
    pub kind: ScalarKind,
    pub seed: u64,
}

impl PinnedSystem {
    pub fn unknowns(&self) -> usize {
        self.layout.unknowns()
    }

    pub fn pins(&self) -> &[Vertex] {
        self.layout.pins()
    }

    pub fn summary(&self) -> SystemSummary {
        SystemSummary {
            pins: self.pins().to_vec(),
            unknowns: self.unknowns(),
            square_edges: self.square.iter().map(|e| e.edge).collect(),
            surplus_edges: self.surplus.iter().map(|e| e.edge).collect(),
            kind: self.kind,
            seed: self.seed,
        }
    }

    pub fn eval_square(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (o, eq) in out.iter_mut().zip(&self.square) {
            *o = eq.eval(x);
        }
    }

    /// Row-major `k x k` Jacobian of the square equations.
    pub fn jacobian_square(&self, x: &[Complex64], jac: &mut [Complex64]) {
        let k = self.unknowns();
        jac.fill(ZERO);
        for (i, eq) in self.square.iter().enumerate() {
            eq.add_gradient(x, Complex64::new(1.0, 0.0), &mut jac[i * k..(i + 1) * k], 0);
        }
    }

    pub fn max_relative_residual(&self, x: &[Complex64]) -> f64 {
        self.square.iter().map(|e| e.relative_residual(x)).fold(0.0, f64::max)
    }

    pub fn max_surplus_residual(&self, x: &[Complex64]) -> f64 {
        self.surplus.iter().map(|e| e.relative_residual(x)).fold(0.0, f64::max)
    }

    /// Index sets of unknowns per coordinate, for the diagonal sign-flip group.
    pub fn coordinate_classes(&self) -> Vec<usize> {
        self.layout.coordinate_of_unknowns()
    }

    /// Applies the sign flip selected by the bits of `mask` (bit `j` flips coordinate `j`).
    pub fn flip(&self, x: &[Complex64], mask: u32) -> Vec<Complex64> {
        self.coordinate_classes()
            .iter()
            .zip(x)
            .map(|(&j, &c)| if mask >> j & 1 == 1 { -c } else { c })
            .collect()
    }
}

fn sample_points(n: usize, d: usize, kind: ScalarKind, bound: i64, rng: &mut impl Rng) -> Vec<Vec<Complex64>> {
    let scale = 1.0 / bound as f64;
    (0..n)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let re = rng.random_range(-bound..=bound) as f64 * scale;
                    let im = match kind {
                        ScalarKind::Real => 0.0,
                        ScalarKind::Complex => rng.random_range(-bound..=bound) as f64 * scale,
                    };
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect()
}

/// Deterministic sequence of candidate pin lists: `0..d` first, then the remaining
/// `d`-subsets in lexicographic order.
fn pin_candidates(n: usize, d: usize) -> impl Iterator<Item = Vec<Vertex>> {
    let mut current: Option<Vec<usize>> = Some((0..d).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        // next combination
        let mut c = out.clone();
        let mut i = d;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if c[i] < n - d + i {
                c[i] += 1;
                for k in i + 1..d {
                    c[k] = c[k - 1] + 1;
                }
                current = Some(c);
                break;
            }
        }
        Some(out)
    })
}

/// Samples a realisation (integer or Gaussian-integer coordinates scaled by
/// `1/sample_bound`), pins it canonically and sets targets to its edge lengths. Square
/// equations come from a greedy spanning minimally rigid subgraph; the remaining edges are
/// surplus equations used to filter the square fiber.
pub fn build_pinned_system(
    g: &Graph,
    d: Dimension,
    seed: u64,
    kind: ScalarKind,
    config: &EngineConfig,
) -> Result<PinnedSystem> {
    if g.n() < d.get() + 1 {
        return Err(Error::InvalidOperation(format!(
            "pinned system needs at least d+1 = {} vertices",
            d.get() + 1
        )));
    }
    if !is_d_rigid(g, d, seed).rigid {
        return Err(Error::NotRigid { d: d.get() });
    }
    let spanning = spanning_minimally_rigid_subgraph(g, d, derive(seed, &[streams::SPANNING]))?;

    for attempt in 0..8u64 {
        let mut rng = stream_rng(seed, &[streams::REALISATION, attempt]);
        let pts = sample_points(g.n(), d.get(), kind, config.sample_bound, &mut rng);
        let framework = Framework::new(g.clone(), d, pts, kind)?;
        let lengths = framework.edge_lengths();
        for pins in pin_candidates(g.n(), d.get()).take(64) {
            let pinned = match canonical_pin(&framework, &pins) {
                Ok(p) => p,
                Err(Error::DegeneratePins) => continue,
                Err(e) => return Err(e),
            };
            let layout = PinLayout::new(g.n(), d, &pins)?;
            let mut square = Vec::with_capacity(layout.unknowns());
            let mut surplus = Vec::new();
            for (e, &len) in g.edges().zip(&lengths) {
                let eq = EdgeEquation::new(e, &layout, len);
                if spanning.has_edge(e.u(), e.v()) {
                    square.push(eq);
                } else {
                    surplus.push(eq);
                }
            }
            debug_assert_eq!(square.len(), layout.unknowns());
            let sample = layout.flatten(pinned.points());
            let system = PinnedSystem { graph: g.clone(), d, layout, square, surplus, kind, sample, seed };
            let res = system.max_relative_residual(&system.sample).max(system.max_surplus_residual(&system.sample));
            if res > 1e-10 {
                return Err(Error::InvalidOperation(format!(
                    "pinned sample violates its own equations (relative residual {res:.2e})"
                )));
            }
            return Ok(system);
        }
    }
    Err(Error::DegeneratePins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn system_shapes() {
        let cfg = EngineConfig::default();
        let s = build_pinned_system(&named::k4_minus_edge(), dim(2), 1, ScalarKind::Complex, &cfg).unwrap();
        assert_eq!((s.square.len(), s.unknowns(), s.surplus.len()), (5, 5, 0));
        let s = build_pinned_system(&Graph::complete(4), dim(2), 1, ScalarKind::Real, &cfg).unwrap();
        assert_eq!((s.square.len(), s.surplus.len()), (5, 1));
        let s = build_pinned_system(&named::prism_g1(), dim(2), 1, ScalarKind::Complex, &cfg).unwrap();
        assert_eq!((s.square.len(), s.surplus.len()), (13, 1));
        assert!(matches!(
            build_pinned_system(&Graph::cycle(4), dim(2), 1, ScalarKind::Real, &cfg),
            Err(Error::NotRigid { .. })
        ));
    }

    #[test]
    fn pin_candidates_enumerate_subsets() {
        let all: Vec<_> = pin_candidates(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
    }

    // analytic Jacobian against central differences (holomorphic: real step suffices)
    #[test]
    fn jacobian_matches_finite_differences() {
        let cfg = EngineConfig::default();
        for (g, d) in [(named::k33_cone(), 3), (named::prism_g2(), 2), (named::octahedron(), 3)] {
            let s = build_pinned_system(&g, dim(d), 4, ScalarKind::Complex, &cfg).unwrap();
            let k = s.unknowns();
            let mut rng = stream_rng(9, &[k as u64]);
            let x: Vec<Complex64> =
                (0..k).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let mut jac = vec![ZERO; k * k];
            s.jacobian_square(&x, &mut jac);
            let h = 1e-6;
            for c in 0..k {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[c] += h;
                xm[c] -= h;
                let (mut fp, mut fm) = (vec![ZERO; k], vec![ZERO; k]);
                s.eval_square(&xp, &mut fp);
                s.eval_square(&xm, &mut fm);
                for r in 0..k {
                    let fd = (fp[r] - fm[r]) / (2.0 * h);
                    let an = jac[r * k + c];
                    assert!((fd - an).norm() <= 1e-6 * an.norm().max(1.0), "{fd} vs {an}");
                }
            }
        }
    }
}
