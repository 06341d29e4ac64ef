//! Canonical pinning: moving a framework by an isometry of `(F^d, Σ x_i²)` into the
//! linear space where `p_j(v_k) = 0` for all `k <= j` (0-based) for an ordered list of
//! `d` pinned vertices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{Dimension, Vertex};

use super::Framework;

/// Relative threshold below which a Gram pivot counts as vanishing.
pub const DEGENERATE_PIVOT: f64 = 1e-12;

/// Which coordinates of a realisation are free after pinning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinLayout {
    pins: Vec<Vertex>,
    d: usize,
    // var[v * d + j] = index of unknown for coordinate j of v, or None if pinned to zero
    var: Vec<Option<usize>>,
    unknowns: usize,
}

impl PinLayout {
    pub fn new(n: usize, d: Dimension, pins: &[Vertex]) -> Result<Self> {
        let d = d.get();
        if pins.len() != d {
            return Err(Error::InvalidGraph(format!("need {d} pinned vertices, got {}", pins.len())));
        }
        for (i, &p) in pins.iter().enumerate() {
            if p >= n {
                return Err(Error::VertexOutOfRange { vertex: p, n });
            }
            if pins[..i].contains(&p) {
                return Err(Error::InvalidGraph(format!("pinned vertex {p} repeated")));
            }
        }
        let mut var = vec![None; n * d];
        let mut unknowns = 0;
        for v in 0..n {
            let zero_from = pins.iter().position(|&p| p == v);
            for j in 0..d {
                if zero_from.is_some_and(|k| j >= k) {
                    continue;
                }
                var[v * d + j] = Some(unknowns);
                unknowns += 1;
            }
        }
        Ok(PinLayout { pins: pins.to_vec(), d, var, unknowns })
    }

    pub fn pins(&self) -> &[Vertex] {
        &self.pins
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.var.len() / self.d
    }

    /// `d n - d(d+1)/2`.
    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn var(&self, v: Vertex, j: usize) -> Option<usize> {
        self.var[v * self.d + j]
    }

    /// Coordinate index `j` of every unknown, in unknown order.
    pub fn coordinate_of_unknowns(&self) -> Vec<usize> {
        let mut out = vec![0; self.unknowns];
        for (slot, v) in self.var.iter().enumerate() {
            if let Some(i) = v {
                out[*i] = slot % self.d;
            }
        }
        out
    }

    /// Unknown vector of a realisation already lying in the pinned space.
    pub fn flatten(&self, points: &[Vec<Complex64>]) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); self.unknowns];
        for (v, p) in points.iter().enumerate() {
            for (j, c) in p.iter().enumerate() {
                if let Some(i) = self.var(v, j) {
                    x[i] = *c;
                }
            }
        }
        x
    }

    pub fn unflatten(&self, x: &[Complex64]) -> Vec<Vec<Complex64>> {
        let n = self.n();
        (0..n)
            .map(|v| {
                (0..self.d)
                    .map(|j| self.var(v, j).map_or(Complex64::new(0.0, 0.0), |i| x[i]))
                    .collect()
            })
            .collect()
    }

    /// True if the realisation satisfies the pinning equations exactly.
    pub fn contains(&self, points: &[Vec<Complex64>]) -> bool {
        points.iter().enumerate().all(|(v, p)| {
            p.iter().enumerate().all(|(j, c)| self.var(v, j).is_some() || *c == Complex64::new(0.0, 0.0))
        })
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal (for the bilinear form) frame whose first `pins.len() - 1` vectors span the
/// pinned difference vectors in order. Fails if a leading principal minor of the Gram
/// matrix of the differences vanishes.
fn pinning_frame(points: &[Vec<Complex64>], pins: &[Vertex], d: usize) -> Result<Vec<Vec<Complex64>>> {
    let origin = &points[pins[0]];
    let diffs: Vec<Vec<Complex64>> = pins[1..]
        .iter()
        .map(|&v| points[v].iter().zip(origin).map(|(a, b)| a - b).collect())
        .collect();
    let scale = diffs
        .iter()
        .map(|b| b.iter().map(|c| c.norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut frame: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    let orthogonalize = |frame: &[Vec<Complex64>], b: &[Complex64]| -> Vec<Complex64> {
        let mut r = b.to_vec();
        for e in frame {
            let c = dot(&r, e);
            for (x, y) in r.iter_mut().zip(e) {
                *x -= c * y;
            }
        }
        r
    };
    for b in &diffs {
        let r = orthogonalize(&frame, b);
        let q = dot(&r, &r);
        if q.norm() <= DEGENERATE_PIVOT * scale {
            return Err(Error::DegeneratePins);
        }
        let s = q.sqrt();
        frame.push(r.iter().map(|x| x / s).collect());
    }
    // complete with the best-conditioned standard basis directions
    while frame.len() < d {
        let mut best: Option<(f64, Vec<Complex64>)> = None;
        for j in 0..d {
            let mut unit = vec![Complex64::new(0.0, 0.0); d];
            unit[j] = Complex64::new(1.0, 0.0);
            let r = orthogonalize(&frame, &unit);
            let q = dot(&r, &r).norm();
            if best.as_ref().is_none_or(|(bq, _)| q > *bq) {
                best = Some((q, r));
            }
        }
        let (q, r) = best.expect("d >= 1");
        if q <= DEGENERATE_PIVOT {
            return Err(Error::DegeneratePins);
        }
        let s = dot(&r, &r).sqrt();
        frame.push(r.iter().map(|x| x / s).collect());
    }
    Ok(frame)
}

/// Returns a congruent framework lying in the pinned space for `pins`.
pub fn canonical_pin(f: &Framework, pins: &[Vertex]) -> Result<Framework> {
    let d = f.dimension().get();
    let n = f.graph().n();
    let layout = PinLayout::new(n, f.dimension(), pins)?;
    let frame = pinning_frame(f.points(), pins, d)?;
    let origin = f.points()[pins[0]].clone();
    let mut points: Vec<Vec<Complex64>> = f
        .points()
        .iter()
        .map(|p| {
            let shifted: Vec<Complex64> = p.iter().zip(&origin).map(|(a, b)| a - b).collect();
            frame.iter().map(|e| dot(e, &shifted)).collect()
        })
        .collect();
    for (v, p) in points.iter_mut().enumerate() {
        for (j, c) in p.iter_mut().enumerate() {
            if layout.var(v, j).is_none() {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
    if f.kind() == super::ScalarKind::Real {
        for p in points.iter_mut() {
            for c in p.iter_mut() {
                c.im = 0.0;
            }
        }
    }
    Framework::new(f.graph().clone(), f.dimension(), points, f.kind())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named, Graph};
    use crate::rigidity::ScalarKind;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * a.norm().max(b.norm()).max(1e-300)
    }

    #[test]
    fn layout_counts_unknowns() {
        for d in 1..=4 {
            let dim = Dimension::new(d).unwrap();
            let pins: Vec<usize> = (0..d).collect();
            let l = PinLayout::new(7, dim, &pins).unwrap();
            assert_eq!(l.unknowns(), d * 7 - dim.isometry_dim());
        }
    }

    #[test]
    fn triangle_pins_to_axis() {
        let g = Graph::complete(3);
        let f = Framework::real(g, Dimension::new(2).unwrap(), vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let p = canonical_pin(&f, &[0, 1]).unwrap();
        assert_eq!(p.points()[0], vec![Complex64::new(0.0, 0.0); 2]);
        assert_eq!(p.points()[1][1], Complex64::new(0.0, 0.0));
        for (a, b) in f.pair_lengths().iter().zip(p.pair_lengths()) {
            assert!(rel_close(*a, b, 1e-12));
        }
        // idempotent on an already pinned framework
        let again = canonical_pin(&p, &[0, 1]).unwrap();
        for (a, b) in p.points().iter().flatten().zip(again.points().iter().flatten()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn complex_k4_minus_edge_preserves_lengths() {
        let mut rng = stream_rng(17, &[1]);
        let g = named::k4_minus_edge();
        for _ in 0..50 {
            let pts: Vec<Vec<Complex64>> = (0..4)
                .map(|_| (0..2).map(|_| Complex64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0))).collect())
                .collect();
            let f = Framework::new(g.clone(), Dimension::new(2).unwrap(), pts, ScalarKind::Complex).unwrap();
            let p = canonical_pin(&f, &[0, 1]).unwrap();
            // direct recomputation of the edge-length map on both frameworks
            for e in g.edges() {
                let len = |pts: &[Vec<Complex64>]| -> Complex64 {
                    pts[e.u()].iter().zip(&pts[e.v()]).map(|(a, b)| (a - b) * (a - b)).sum::<Complex64>() * 0.5
                };
                assert!(rel_close(len(f.points()), len(p.points()), 1e-10));
            }
            assert!(PinLayout::new(4, Dimension::new(2).unwrap(), &[0, 1]).unwrap().contains(p.points()));
        }
    }

    #[test]
    fn coincident_pins_are_degenerate() {
        let g = Graph::complete(4);
        let pts = vec![vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 0.0], vec![5.0, 1.0, 2.0]];
        let f = Framework::real(g, Dimension::new(3).unwrap(), pts).unwrap();
        assert!(matches!(canonical_pin(&f, &[0, 1, 2]), Err(Error::DegeneratePins)));
        // isotropic difference vector (1, i) has zero square norm
        let g = Graph::complete(3);
        let pts = vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        let f = Framework::new(g, Dimension::new(2).unwrap(), pts, ScalarKind::Complex).unwrap();
        assert!(matches!(canonical_pin(&f, &[0, 1]), Err(Error::DegeneratePins)));
    }
}
