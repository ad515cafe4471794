//! Invariant manifolds: normalization, series charts, pointwise solvers on
//! weighted sequence spaces, and invariance certification.

mod chart;
mod irwin;
mod orbit;
mod system;
mod verify;

pub use chart::{centre_chart, centre_stable_chart, series_chart, GraphChart, DEFAULT_SAMPLES};
pub use irwin::{irwin_stable_chart, irwin_unstable_chart, IrwinSolution};
pub use orbit::{orbit_space_ops, OrbitOp, OrbitOpResult, WeightedOrbit};
pub use system::{normalize, normalize_with, BlockSystem, Mode};
pub use verify::{shell_samples, verify_invariance, Certification};
