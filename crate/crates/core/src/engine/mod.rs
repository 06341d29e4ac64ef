//! Counting solutions of the pinned edge-length system by homotopy continuation.

pub mod count;
pub mod fiber;
pub mod linalg;
pub mod system;
pub mod tracker;

pub use count::{count_complex, count_real_samples, count_with_real_samples, CountResult, PathSummary, SampleRecord};
pub use fiber::{track_fiber, PathStats, Solution, SolutionSet};
pub use system::{build_pinned_system, EdgeEquation, PinnedSystem, SystemSummary};
pub use tracker::{PathStatus, Homotopy};
