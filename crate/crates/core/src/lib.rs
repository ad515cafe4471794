//! Invariant manifolds of analytic maps over ultrametric fields.
//!
//! The crate is layered bottom-up:
//!
//! * [`field`]: scalars of `Q_p` and `F_p((t))` at capped precision.
//! * [`linalg`]: characteristic polynomials, Newton polygons, slope
//!   factorization, spectral splitting and adapted norms.
//! * [`series`]: truncated multivariate power series maps.
//! * [`manifolds`]: normalized block systems and the chart solvers.
//! * [`dynamics`]: orbits, fixed-point classification and stable-set membership.

pub mod dynamics;
pub mod error;
pub mod field;
pub mod linalg;
pub mod manifolds;
pub mod series;

pub use error::{Error, ErrorClass, Result};
pub use field::{AbsValue, FieldKind, FieldSpec, ScalarJson, UltraScalar};
pub use linalg::{Matrix, Poly, SpectralSplit, WeightedNorm};
pub use series::{HomogPoly, MultiIndex, TruncatedMap};
pub use manifolds::{BlockSystem, GraphChart, Mode};
