//! Orbit iteration, stable-set membership certificates and fixed-point
//! classification.

mod classify;
mod membership;
mod orbit;

pub use classify::{classify_fixed_point, FixedPointReport, SubspaceDims};
pub use membership::{default_b, stable_membership, stable_membership_batch, MembershipCertificate, Verdict, Witness};
pub use orbit::{orbit, OrbitTrace, Termination};
