//! The bundled data files match the graphs they are named after.

use std::path::PathBuf;

use rigcount::graph::named;
use rigcount::io::read_graph_file;
use rigcount::triangulation::enumerate_spheres;
use rigcount::{Graph, Triangulation};

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

#[test]
fn sphere_corpus_is_complete_and_valid() {
    let mut files: Vec<PathBuf> = std::fs::read_dir(data("spheres")).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    let loaded: Vec<Triangulation> = files.iter().map(|p| read_graph_file(p).unwrap().triangulation().unwrap()).collect();
    let per_n: Vec<usize> = (4..=8).map(|n| loaded.iter().filter(|t| t.n() == n).count()).collect();
    assert_eq!(per_n, vec![1, 1, 2, 5, 14]);
    let fresh = enumerate_spheres(8);
    for t in &fresh {
        let hits = loaded.iter().filter(|s| s.graph().is_isomorphic(&t.graph())).count();
        assert_eq!(hits, 1, "sphere with skeleton {} appears {hits} times", t.graph().to_edge_list());
    }
}

#[test]
fn graph_files_match_named_graphs() {
    let cases: Vec<(&str, Graph)> = vec![
        ("k4.edges", Graph::complete(4)),
        ("k4e.edges", named::k4_minus_edge()),
        ("c4.edges", Graph::cycle(4)),
        ("doublebanana.edges", named::double_banana()),
        ("prism_g1.edges", named::prism_g1()),
        ("prism_g2.edges", named::prism_g2()),
        ("prism_g3.edges", named::prism_g3()),
        ("two_reflection.edges", named::two_reflection_graph()),
        ("k33cone.edges", named::k33_cone()),
        ("octahedron_skeleton.edges", named::octahedron()),
        ("k1112.edges", named::singletons_plus_part(2, 2)),
        ("k113.edges", named::singletons_plus_part(2, 3)),
    ];
    for (file, g) in cases {
        assert_eq!(read_graph_file(&data(&format!("graphs/{file}"))).unwrap().graph, g, "{file}");
    }
    let g2 = read_graph_file(&data("graphs/prism_g2.edges")).unwrap().graph;
    assert_eq!((g2.n(), g2.edge_count()), (8, 13));
    for (file, t) in [
        ("tetrahedron.json", Triangulation::tetrahedron()),
        ("octahedron.json", Triangulation::octahedron()),
        ("icosahedron.json", Triangulation::icosahedron()),
        ("stacked7.json", Triangulation::stacked(3)),
    ] {
        assert_eq!(read_graph_file(&data(&format!("graphs/{file}"))).unwrap().triangulation().unwrap(), t, "{file}");
    }
}
