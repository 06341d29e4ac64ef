//! Realisation numbers of rigid graphs.
//!
//! The crate counts complex realisations `c_d(G)` of generic frameworks by tracking the
//! pinned edge-length system with a total-degree homotopy, samples real realisation
//! counts, implements the graph operations whose effect on these counts is known, and
//! packages the resulting claims as re-checkable certificates.

pub mod certificates;
pub mod config;
pub mod engine;
pub mod error;
pub mod graph;
pub mod io;
pub mod ops;
pub mod modp;
pub mod rigidity;
pub mod rng;
pub mod triangulation;

pub use certificates::{Certificate, Check, ClaimKind, Verdict};
pub use config::{EngineConfig, Predictor, TrackerConfig};
pub use engine::{count_complex, count_real_samples, CountResult, PinnedSystem, SolutionSet};
pub use error::{Error, Result};
pub use graph::{Dimension, Edge, Graph, Vertex};
pub use rigidity::{Framework, RankWitness, RigidityReport, ScalarKind};
pub use triangulation::Triangulation;
