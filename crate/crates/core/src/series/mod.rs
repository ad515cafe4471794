//! Truncated multivariate power series maps.
//!
//! Maps are stored degree by degree; each homogeneous component is a sparse
//! table of monomial coefficients. Norms are Gauss norms for weighted max
//! norms, which majorize the sup norm of a component on the unit ball.

mod homog;
mod jet;
mod map;
mod multi;

pub use homog::HomogPoly;
pub use jet::{compose_jets, Jet};
pub use map::{parse_terms, TruncatedMap};
pub use multi::MultiIndex;
