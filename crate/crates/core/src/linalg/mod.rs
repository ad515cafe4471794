//! Linear algebra over ultrametric fields: matrices, characteristic
//! polynomials, Newton polygons, slope factorization, spectral splitting,
//! and adapted norms.

mod factor;
mod matrix;
mod newton;
mod norm;
mod poly;
mod split;
mod subspace;

pub use factor::{slope_factorize, SlopeFactor};
pub use matrix::Matrix;
pub use newton::{newton_polygon, NewtonPolygon, Segment};
pub use norm::{adapted_norm, coordinate_norm, coordinate_norm_exact, WeightedNorm};
pub use poly::{char_poly, Poly};
pub use split::{spectral_split, SpectralComponent, SpectralSplit};
pub use subspace::{is_hyperbolic, subspace_query, Subspace, SubspaceAnswer, SubspaceKind};
