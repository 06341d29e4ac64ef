//! Rigidity matrices, randomized exact rank, rigidity predicates and pinning.
//!
//! Generic rank is estimated from the exact rank of `R(G,p)` at random integer
//! realisations reduced modulo large primes. The rank at any specialisation never exceeds
//! the generic rank, so a full-rank witness proves rigidity; a deficient rank is only
//! probabilistic evidence of flexibility.

pub mod pebble;
pub mod pin;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dimension, Edge, Graph};
use crate::modp::{PrimeField, RowBasis, RANK_PRIMES};
use crate::rng::{derive, stream_rng, streams};

pub use pebble::{pebble_game, PebbleResult};
pub use pin::{canonical_pin, PinLayout};

/// Integer coordinates for rank sampling are drawn from `[-2^20, 2^20]`.
pub const RANK_SAMPLE_BOUND: i64 = 1 << 20;
/// Number of independent integer realisations per rank estimate.
pub const RANK_SAMPLES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Real,
    Complex,
}

/// A graph with a point in `F^d` for every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Framework {
    graph: Graph,
    d: Dimension,
    points: Vec<Vec<Complex64>>,
    kind: ScalarKind,
}

impl Framework {
    pub fn new(graph: Graph, d: Dimension, points: Vec<Vec<Complex64>>, kind: ScalarKind) -> Result<Self> {
        if points.len() != graph.n() {
            return Err(Error::InvalidGraph(format!(
                "{} points for {} vertices",
                points.len(),
                graph.n()
            )));
        }
        for (v, p) in points.iter().enumerate() {
            if p.len() != d.get() {
                return Err(Error::InvalidGraph(format!("point of vertex {v} has wrong dimension")));
            }
            if p.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::InvalidGraph(format!("point of vertex {v} is not finite")));
            }
            if kind == ScalarKind::Real && p.iter().any(|c| c.im != 0.0) {
                return Err(Error::InvalidGraph(format!("real framework has complex point at {v}")));
            }
        }
        Ok(Framework { graph, d, points, kind })
    }

    pub fn real(graph: Graph, d: Dimension, points: Vec<Vec<f64>>) -> Result<Self> {
        let pts = points
            .into_iter()
            .map(|p| p.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
            .collect();
        Framework::new(graph, d, pts, ScalarKind::Real)
    }

    pub fn from_integers(graph: Graph, d: Dimension, points: &[Vec<i64>]) -> Result<Self> {
        Framework::real(graph, d, points.iter().map(|p| p.iter().map(|&x| x as f64).collect()).collect())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    pub fn points(&self) -> &[Vec<Complex64>] {
        &self.points
    }

    pub fn kind(&self) -> ScalarKind {
        self.kind
    }

    fn half_square(&self, u: usize, v: usize) -> Complex64 {
        self.points[u].iter().zip(&self.points[v]).map(|(a, b)| (a - b) * (a - b)).sum::<Complex64>() * 0.5
    }

    /// `f_{G,d}(p)`: half squared lengths per edge in sorted edge order.
    pub fn edge_lengths(&self) -> Vec<Complex64> {
        self.graph.edges().map(|e| self.half_square(e.u(), e.v())).collect()
    }

    /// Half squared lengths for all pairs `u < v`, lexicographic.
    pub fn pair_lengths(&self) -> Vec<Complex64> {
        let n = self.graph.n();
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).map(|(u, v)| self.half_square(u, v)).collect()
    }
}

/// `|E| x d|V|` rigidity matrix over the framework's scalars.
pub fn rigidity_matrix(f: &Framework) -> DMatrix<Complex64> {
    let d = f.d.get();
    let g = &f.graph;
    let mut m = DMatrix::zeros(g.edge_count(), d * g.n());
    for (row, e) in g.edges().enumerate() {
        let (u, v) = (e.u(), e.v());
        for j in 0..d {
            let diff = f.points[u][j] - f.points[v][j];
            m[(row, u * d + j)] = diff;
            m[(row, v * d + j)] = -diff;
        }
    }
    m
}

/// Numerical rank: singular values above `rel_tol` times the largest.
pub fn numeric_rank(m: &DMatrix<Complex64>, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Rigidity matrix with the pinned columns deleted: the Jacobian of the pinned rigidity map.
pub fn pinned_rigidity_matrix(f: &Framework, layout: &PinLayout) -> DMatrix<Complex64> {
    let d = f.d.get();
    let full = rigidity_matrix(f);
    let mut m = DMatrix::zeros(full.nrows(), layout.unknowns());
    for v in 0..f.graph.n() {
        for j in 0..d {
            if let Some(i) = layout.var(v, j) {
                m.set_column(i, &full.column(v * d + j));
            }
        }
    }
    m
}

pub fn sample_integer_points(n: usize, d: usize, bound: i64, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    (0..n).map(|_| (0..d).map(|_| rng.random_range(-bound..=bound)).collect()).collect()
}

/// Rows of `R(G,p)` reduced modulo the field's prime.
pub fn rigidity_rows_modp(g: &Graph, d: usize, points: &[Vec<i64>], field: PrimeField) -> Vec<Vec<u64>> {
    g.edges()
        .map(|e| rigidity_row_modp(e, g.n(), d, points, field))
        .collect()
}

fn rigidity_row_modp(e: Edge, n: usize, d: usize, points: &[Vec<i64>], field: PrimeField) -> Vec<u64> {
    let mut row = vec![0u64; n * d];
    for j in 0..d {
        let diff = points[e.u()][j] - points[e.v()][j];
        row[e.u() * d + j] = field.from_i64(diff);
        row[e.v() * d + j] = field.from_i64(-diff);
    }
    row
}

/// Evidence behind a rank estimate. `rank` is a certified lower bound on the generic rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankWitness {
    pub rank: usize,
    pub threshold: usize,
    pub seeds: Vec<u64>,
    pub primes: Vec<u64>,
    pub trials: usize,
    pub field: String,
}

impl RankWitness {
    pub fn full(&self) -> bool {
        self.rank >= self.threshold
    }
}

/// Max exact rank of `R(G,p)` over `RANK_SAMPLES` integer realisations, each reduced
/// modulo both rank primes.
pub fn generic_rank(g: &Graph, d: Dimension, seed: u64) -> RankWitness {
    generic_rank_with(g, d, seed, RANK_SAMPLES)
}

fn generic_rank_with(g: &Graph, d: Dimension, seed: u64, samples: usize) -> RankWitness {
    let threshold = d.rigid_rank(g.n());
    let mut best = 0;
    let mut seeds = Vec::with_capacity(samples);
    for s in 0..samples {
        let sample_seed = derive(seed, &[streams::RANK, s as u64]);
        seeds.push(sample_seed);
        let pts = sample_integer_points(g.n(), d.get(), RANK_SAMPLE_BOUND, &mut stream_rng(sample_seed, &[]));
        for &p in &RANK_PRIMES {
            let field = PrimeField::new(p);
            best = best.max(field.rank(&rigidity_rows_modp(g, d.get(), &pts, field)));
        }
    }
    RankWitness {
        rank: best,
        threshold,
        seeds,
        primes: RANK_PRIMES.to_vec(),
        trials: samples * RANK_PRIMES.len(),
        field: format!("GF(p), integer coordinates in [-{RANK_SAMPLE_BOUND}, {RANK_SAMPLE_BOUND}]"),
    }
}

/// Verdict of [`is_d_rigid`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub rigid: bool,
    pub minimal: bool,
    pub rank: usize,
    pub threshold: usize,
    pub edges: usize,
    pub seeds: Vec<u64>,
    /// `true` when a flexible verdict rests only on repeated rank deficiency.
    pub probabilistic: bool,
    /// `(2,3)` pebble game verdict, computed for `d = 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pebble: Option<bool>,
    pub witness: RankWitness,
}

/// `G` is `d`-rigid iff it is complete on at most `d+1` vertices or its generic rank
/// reaches `d n - d(d+1)/2`. For `d = 2` the pebble game decides exactly and the rank
/// estimate is resampled until it agrees.
pub fn is_d_rigid(g: &Graph, d: Dimension, seed: u64) -> RigidityReport {
    let mut witness = generic_rank(g, d, seed);
    let pebble = (d.get() == 2).then(|| pebble_game(g).rigid());
    if pebble == Some(true) {
        let mut extra = 1;
        while !witness.full() && extra <= 8 {
            let w = generic_rank(g, d, derive(seed, &[streams::RESTART, extra]));
            if w.rank > witness.rank {
                witness = w;
            }
            extra += 1;
        }
    }
    let small_complete = g.n() <= d.get() + 1 && g.is_complete();
    let rigid = small_complete || witness.full();
    if let Some(p) = pebble {
        debug_assert!(!(witness.full() && !p), "full rank witness contradicts the pebble game");
        debug_assert_eq!(p, rigid, "pebble game and rank disagree on {g}");
    }
    RigidityReport {
        rigid,
        minimal: rigid && g.edge_count() == d.rigid_rank(g.n()),
        rank: witness.rank,
        threshold: witness.threshold,
        edges: g.edge_count(),
        seeds: witness.seeds.clone(),
        probabilistic: !rigid,
        pebble,
        witness,
    }
}

pub fn is_minimally_d_rigid(g: &Graph, d: Dimension, seed: u64) -> bool {
    is_d_rigid(g, d, seed).minimal
}

/// Greedy spanning subgraph with exactly `d n - d(d+1)/2` independent edges, scanning
/// edges in sorted order.
pub fn spanning_minimally_rigid_subgraph(g: &Graph, d: Dimension, seed: u64) -> Result<Graph> {
    spanning_minimally_rigid_subgraph_ordered(g, d, seed, &g.edge_vec())
}

/// As [`spanning_minimally_rigid_subgraph`] with an explicit edge scan order.
pub fn spanning_minimally_rigid_subgraph_ordered(
    g: &Graph,
    d: Dimension,
    seed: u64,
    order: &[Edge],
) -> Result<Graph> {
    let threshold = d.rigid_rank(g.n());
    let field = PrimeField::new(RANK_PRIMES[0]);
    for attempt in 0..4u64 {
        let pts = sample_integer_points(
            g.n(),
            d.get(),
            RANK_SAMPLE_BOUND,
            &mut stream_rng(seed, &[streams::SPANNING, attempt]),
        );
        let mut basis = RowBasis::new(field, g.n() * d.get());
        let mut kept = Vec::with_capacity(threshold);
        for &e in order {
            if !g.has_edge(e.u(), e.v()) {
                return Err(Error::InvalidGraph(format!("edge {e} not in graph")));
            }
            if basis.insert(rigidity_row_modp(e, g.n(), d.get(), &pts, field)) {
                kept.push(e);
                if kept.len() == threshold {
                    break;
                }
            }
        }
        if kept.len() == threshold {
            return g.spanning_subgraph(kept);
        }
    }
    Err(Error::NotRigid { d: d.get() })
}

/// Maxwell bound check helper: rank of `R(G,p)` modulo a rank prime at integer points.
pub fn rank_at_integer_points(g: &Graph, d: usize, points: &[Vec<i64>]) -> usize {
    let field = PrimeField::new(RANK_PRIMES[0]);
    field.rank(&rigidity_rows_modp(g, d, points, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn k2_matrix() {
        let f = Framework::real(Graph::complete(2), dim(1), vec![vec![0.0], vec![5.0]]).unwrap();
        let m = rigidity_matrix(&f);
        assert_eq!(m.shape(), (1, 2));
        assert_eq!(m[(0, 0)], Complex64::new(-5.0, 0.0));
        assert_eq!(m[(0, 1)], Complex64::new(5.0, 0.0));
    }

    #[test]
    fn triangle_matrix_rank() {
        let f = Framework::real(Graph::complete(3), dim(2), vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let m = rigidity_matrix(&f);
        assert_eq!(m.shape(), (3, 6));
        assert_eq!(numeric_rank(&m, 1e-10), 3);
    }

    #[test]
    fn double_banana_rank_at_random_integer_points() {
        let g = named::double_banana();
        let mut rng = stream_rng(3, &[]);
        let pts = sample_integer_points(8, 3, RANK_SAMPLE_BOUND, &mut rng);
        assert_eq!(rank_at_integer_points(&g, 3, &pts), 17);
    }

    #[test]
    fn generic_rank_examples() {
        assert_eq!(generic_rank(&Graph::complete(4), dim(2), 1).rank, 5);
        assert_eq!(generic_rank(&named::k4_minus_edge(), dim(2), 1).rank, 5);
        assert_eq!(generic_rank(&named::octahedron(), dim(3), 1).rank, 12);
    }

    #[test]
    fn rigidity_predicates() {
        assert!(is_d_rigid(&Graph::complete(4), dim(3), 1).rigid);
        assert!(!is_d_rigid(&Graph::cycle(4), dim(2), 1).rigid);
        let db = is_d_rigid(&named::double_banana(), dim(3), 1);
        assert!(!db.rigid && db.probabilistic && db.rank == 17);
        assert!(is_minimally_d_rigid(&named::k4_minus_edge(), dim(2), 1));
        assert!(!is_minimally_d_rigid(&Graph::complete(4), dim(2), 1));
        assert!(is_minimally_d_rigid(&named::octahedron(), dim(3), 1));
        assert!(is_minimally_d_rigid(&crate::triangulation::Triangulation::icosahedron().graph(), dim(3), 1));
        assert!(!is_d_rigid(&Graph::from_pairs(3, [(0, 1), (1, 2)]).unwrap(), dim(2), 1).rigid);
        assert!(is_d_rigid(&Graph::complete(2), dim(3), 1).rigid);
    }

    #[test]
    fn spanning_subgraph_examples() {
        let k4 = spanning_minimally_rigid_subgraph(&Graph::complete(4), dim(2), 1).unwrap();
        assert_eq!(k4.edge_count(), 5);
        assert!(k4.is_isomorphic(&named::k4_minus_edge()));
        let m = named::k4_minus_edge();
        assert_eq!(spanning_minimally_rigid_subgraph(&m, dim(2), 9).unwrap(), m);
        let g1 = named::prism_g1();
        let h = spanning_minimally_rigid_subgraph(&g1, dim(2), 5).unwrap();
        assert_eq!(h.edge_count(), 13);
        assert!(h.is_subgraph_of(&g1));
        assert!(is_minimally_d_rigid(&h, dim(2), 11));
        assert!(matches!(
            spanning_minimally_rigid_subgraph(&Graph::cycle(4), dim(2), 1),
            Err(Error::NotRigid { d: 2 })
        ));
    }
}
