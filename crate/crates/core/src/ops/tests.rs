use proptest::prelude::*;

use super::*;
use crate::graph::named;
use crate::rigidity::{is_d_rigid, is_minimally_d_rigid};
use crate::triangulation::Triangulation;

fn dim(d: usize) -> Dimension {
    Dimension::new(d).unwrap()
}

fn pairs(g: &Graph) -> Vec<(usize, usize)> {
    g.edges().map(|e| (e.u(), e.v())).collect()
}

#[test]
fn zero_extension_examples() {
    let (g, step) = zero_extension(&Graph::complete(3), dim(2), &[0, 1]).unwrap();
    assert_eq!(g, Graph::complete(4).without_edge(Edge::new(2, 3)).unwrap());
    assert_eq!(step.predicted_effect, PredictedEffect::ExactFactor { factor: 2 });
    let (g, _) = zero_extension(&Graph::complete(4), dim(3), &[0, 2, 3]).unwrap();
    assert_eq!((g.n(), g.edge_count()), (5, 9));
    assert!(is_minimally_d_rigid(&g, dim(3), 1));
    assert!(zero_extension(&Graph::complete(3), dim(2), &[0, 0]).is_err());
    assert!(zero_extension(&Graph::complete(3), dim(2), &[0]).is_err());
}

#[test]
fn one_extension_examples() {
    let (g, step) = one_extension(&Graph::complete(4), dim(2), Edge::new(0, 1), &[2]).unwrap();
    assert_eq!((g.n(), g.edge_count()), (5, 8));
    assert!(!g.has_edge(0, 1));
    assert_eq!(step.predicted_effect, PredictedEffect::ExactFactor { factor: 2 });
    let (g, _) = one_extension(&Graph::complete(3), dim(1), Edge::new(0, 1), &[]).unwrap();
    assert_eq!(pairs(&g), vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
    // no clique, no prediction
    let (_, step) = one_extension(&Graph::path(4), dim(2), Edge::new(0, 1), &[3]).unwrap();
    assert_eq!(step.predicted_effect, PredictedEffect::None);
    assert!(one_extension(&Graph::path(4), dim(2), Edge::new(0, 2), &[3]).is_err());
    assert!(one_extension(&Graph::complete(4), dim(2), Edge::new(0, 1), &[1]).is_err());
}

#[test]
fn split_examples() {
    let (g, step) = vertex_split(&Graph::complete(4), dim(3), 0, &[1], &[], &[2, 3]).unwrap();
    assert_eq!((g.n(), g.edge_count()), (5, 9));
    assert!(g.has_edge(0, 4));
    assert_eq!(step.predicted_effect, PredictedEffect::LowerBoundFactor { factor: 2 });
    assert!(vertex_split(&Graph::complete(4), dim(3), 0, &[1], &[], &[2]).is_err());
    assert!(vertex_split(&Graph::complete(4), dim(3), 0, &[], &[], &[2, 3]).is_err());

    let oct = named::octahedron();
    let nb: Vec<_> = oct.neighbors(0).collect();
    assert_eq!(nb.len(), 4);
    let (g, _) = vertex_split(&oct, dim(3), 0, &nb[..1], &nb[1..2], &nb[2..]).unwrap();
    assert_eq!((g.n(), g.edge_count()), (7, 15));
    assert!(is_minimally_d_rigid(&g, dim(3), 2));

    // spider split of K5 minus an edge, with the bookkeeping identity
    let k5e = Graph::complete(5).without_edge(Edge::new(3, 4)).unwrap();
    let (g, step) = spider_split(&k5e, dim(3), 0, &[4], &[], &[1, 2, 3]).unwrap();
    assert_eq!(g.n(), 6);
    assert_eq!(g.edge_count(), k5e.edge_count() - 4 + 1 + 2 * 3);
    assert!(!g.has_edge(0, 5));
    assert_eq!(step.predicted_effect, PredictedEffect::LowerBoundFactor { factor: 1 });

    // redundantly rigid input: no prediction
    let (_, step) = vertex_split(&Graph::complete(5), dim(2), 0, &[1, 2], &[3], &[4]).unwrap();
    assert_eq!(step.predicted_effect, PredictedEffect::None);
}

#[test]
fn xv_replacement_gate() {
    // K5 minus 34 inside a 6-vertex minimally 3-rigid host
    let host = zero_extension(&Graph::complete(5).without_edge(Edge::new(3, 4)).unwrap(), dim(3), &[0, 1, 2]).unwrap().0;
    let (g, step) = xv_replacement(&host, dim(3), ReplacementKind::X, Edge::new(0, 1), Edge::new(2, 3), &[4]).unwrap();
    assert_eq!(g.degree(6), 5);
    assert_eq!(g.edge_count(), host.edge_count() + 3);
    assert_eq!(step.predicted_effect, PredictedEffect::ExactFactor { factor: 2 });
    let (_, step) = xv_replacement(&host, dim(3), ReplacementKind::V, Edge::new(0, 1), Edge::new(1, 2), &[3, 4]).unwrap();
    assert_eq!(step.predicted_effect, PredictedEffect::ExactFactor { factor: 2 });
    // vertices 1, 2, 3, 4, 5 induce fewer than 9 edges
    let (_, step) = xv_replacement(&host, dim(3), ReplacementKind::X, Edge::new(1, 5), Edge::new(2, 3), &[4]).unwrap();
    assert_eq!(step.predicted_effect, PredictedEffect::None);
    assert!(xv_replacement(&host, dim(3), ReplacementKind::X, Edge::new(0, 1), Edge::new(1, 2), &[4]).is_err());
    assert!(xv_replacement(&host, dim(3), ReplacementKind::V, Edge::new(0, 1), Edge::new(2, 3), &[4]).is_err());
}

#[test]
fn substitution_examples() {
    // K4 for K4
    let k4 = Graph::complete(4);
    let (g, step) = subgraph_substitution(&k4, dim(2), &[0, 1, 2, 3], &k4, 0, &k4, 1).unwrap();
    assert_eq!(g, k4);
    assert_eq!(step.predicted_effect, PredictedEffect::ExactRatio { replacement: k4.clone(), replaced: k4.clone() });

    // K5 minus an edge for K5
    let k5 = Graph::complete(5);
    let k5e = k5.without_edge(Edge::new(3, 4)).unwrap();
    let (_, step) = subgraph_substitution(&k5, dim(3), &[0, 1, 2, 3, 4], &k5, 0, &k5e, 1).unwrap();
    assert_eq!(step.predicted_effect, PredictedEffect::ExactRatio { replacement: k5e, replaced: k5 });

    // the 1-extension on a clique is the substitution of K_{d+2} minus v1 v2 for K_{d+1}
    for d in 2..=3 {
        let g = zero_extension(&Graph::complete(d + 1), dim(d), &(0..d).collect::<Vec<_>>()).unwrap().0;
        let clique: Vec<usize> = (0..=d).collect();
        let h = g.induced(&clique).unwrap();
        let n = g.n();
        let mut hp = Graph::empty(n + 1);
        for a in clique.iter().copied().chain([n]) {
            for b in clique.iter().copied().chain([n]) {
                if a < b && !(a == 0 && b == 1) {
                    hp.insert(Edge::new(a, b));
                }
            }
        }
        let (via_sub, step) = subgraph_substitution(&g, dim(d), &clique, &h, 1, &hp, 1).unwrap();
        let (via_ext, _) = one_extension(&g, dim(d), Edge::new(0, 1), &(2..=d).collect::<Vec<_>>()).unwrap();
        assert_eq!(via_sub, via_ext);
        match step.predicted_effect {
            PredictedEffect::ExactRatio { replacement, replaced } => {
                assert_eq!(replaced, Graph::complete(d + 1));
                assert_eq!(replacement.edge_count(), (d + 2) * (d + 1) / 2 - 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    // H' may not touch vertices outside W
    let g = Graph::complete(5);
    let h = Graph::complete(5).induced(&[0, 1, 2, 3]).unwrap();
    let mut hp = Graph::empty(5);
    hp.insert(Edge::new(0, 4));
    assert!(subgraph_substitution(&g, dim(2), &[0, 1, 2, 3], &h, 0, &hp, 1).is_err());
    // H must be rigid
    let path = Graph::from_pairs(5, [(0, 1), (1, 2), (2, 3)]).unwrap();
    assert!(subgraph_substitution(&g, dim(2), &[0, 1, 2, 3], &path, 0, &path, 1).is_err());
}

#[test]
fn steinitz_examples() {
    let r = steinitz_contract(&Triangulation::tetrahedron()).unwrap();
    assert!(r.is_empty());
    r.verify(&Graph::complete(4)).unwrap();
    for (t, len) in [(Triangulation::octahedron(), 2), (Triangulation::icosahedron(), 8), (Triangulation::stacked(3), 3)] {
        let r = steinitz_contract(&t).unwrap();
        assert_eq!(r.len(), len);
        assert_eq!(r.len(), t.n() - 4);
        r.verify(&t.graph()).unwrap();
        for g in r.contractions.replay().unwrap() {
            assert_eq!(g.edge_count(), 3 * g.n() - 6);
        }
        for s in &r.splits.steps {
            assert_eq!(s.kind(), "vertex_split");
            assert_eq!(s.predicted_effect, PredictedEffect::LowerBoundFactor { factor: 2 });
        }
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<SphereReduction>(&json).unwrap(), r);
    }
}

#[test]
fn contraction_then_split_is_identity() {
    let t = Triangulation::icosahedron();
    let g = t.graph();
    let e = g.edges().next().unwrap();
    let (small, step) = edge_contraction(&g, dim(3), e.u(), e.v()).unwrap();
    let Operation::EdgeContraction { relabel, .. } = &step.operation else { panic!() };
    let c: Vec<_> = g.common_neighbors(e.u(), e.v()).unwrap().into_iter().map(|a| relabel[a].unwrap()).collect();
    let nu = g.neighbor_set(e.u());
    let nv = g.neighbor_set(e.v());
    let n1: Vec<_> = nu.iter().filter(|&&a| a != e.v() && !nv.contains(&a)).map(|&a| relabel[a].unwrap()).collect();
    let n2: Vec<_> = nv.iter().filter(|&&a| a != e.u() && !nu.contains(&a)).map(|&a| relabel[a].unwrap()).collect();
    let (back, _) = vertex_split(&small, dim(3), relabel[e.u()].unwrap(), &n1, &n2, &c).unwrap();
    let mut perm: Vec<usize> = vec![0; g.n()];
    for (old, new) in relabel.iter().enumerate() {
        if let Some(new) = new {
            perm[*new] = old;
        }
    }
    perm[g.n() - 1] = e.v();
    assert_eq!(back.relabel(&perm, g.n()).unwrap(), g);
}

#[test]
fn sequence_json_and_replay() {
    let (g1, s1) = zero_extension(&Graph::complete(3), dim(2), &[0, 1]).unwrap();
    let (g2, s2) = vertex_split(&g1, dim(2), 3, &[0], &[], &[1]).unwrap();
    let seq = ConstructionSequence { base: Graph::complete(3), steps: vec![s1, s2], final_graph: g2 };
    let json = serde_json::to_string(&seq).unwrap();
    assert!(json.contains("\"kind\":\"zero_extension\""));
    let back: ConstructionSequence = serde_json::from_str(&json).unwrap();
    assert_eq!(back.replay().unwrap().len(), 3);
    let mut broken = back.clone();
    broken.final_graph = Graph::complete(5);
    assert!(broken.replay().is_err());
}

fn laman_by_extensions(ops: &[(u8, usize, usize, usize)], d: usize) -> Graph {
    // start from K_{d+1} and apply 0-extensions and 1-extensions chosen by the inputs
    let mut g = Graph::complete(d + 1);
    for &(kind, a, b, c) in ops {
        let n = g.n();
        if kind % 2 == 0 {
            let mut nb: Vec<usize> = (0..n).collect();
            nb.rotate_left(a % n);
            nb.truncate(d);
            g = zero_extension(&g, dim(d), &nb).unwrap().0;
        } else {
            let edges = g.edge_vec();
            let e = edges[b % edges.len()];
            let others: Vec<usize> = (0..n).filter(|&v| v != e.u() && v != e.v()).collect();
            let mut extra = others.clone();
            extra.rotate_left(c % others.len());
            extra.truncate(d - 1);
            g = one_extension(&g, dim(d), e, &extra).unwrap().0;
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operations_keep_bookkeeping_and_rigidity(
        d in 2usize..=3,
        ops in prop::collection::vec((any::<u8>(), any::<usize>(), any::<usize>(), any::<usize>()), 0..3),
        x in any::<usize>(),
        cut in any::<usize>(),
    ) {
        let g = laman_by_extensions(&ops, d);
        prop_assert!(is_minimally_d_rigid(&g, dim(d), 3));
        let n = g.n();
        let (z, _) = zero_extension(&g, dim(d), &(0..d).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!((z.n(), z.edge_count()), (n + 1, g.edge_count() + d));
        prop_assert!(is_minimally_d_rigid(&z, dim(d), 3));

        let x = x % n;
        let nb: Vec<usize> = g.neighbors(x).collect();
        if nb.len() >= d - 1 {
            let rest = nb.len() - (d - 1);
            let k = cut % (rest + 1);
            let (w, others) = nb.split_at(d - 1);
            let (n1, n2) = others.split_at(k);
            let (s, _) = vertex_split(&g, dim(d), x, n1, n2, w).unwrap();
            prop_assert_eq!((s.n(), s.edge_count()), (n + 1, g.edge_count() + d));
            prop_assert!(is_minimally_d_rigid(&s, dim(d), 3));
        }
        if nb.len() >= d {
            let rest = nb.len() - d;
            let k = cut % (rest + 1);
            let (w, others) = nb.split_at(d);
            let (n1, n2) = others.split_at(k);
            let (s, _) = spider_split(&g, dim(d), x, n1, n2, w).unwrap();
            prop_assert_eq!(s.edge_count(), g.edge_count() - nb.len() + n1.len() + n2.len() + 2 * d);
            prop_assert!(is_d_rigid(&s, dim(d), 3).rigid);
        }
    }
}
