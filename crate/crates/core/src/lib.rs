//! Exact enumerative counts of rational and elliptic plane curves, their
//! growth bounds, and the asymptotic analysis of their generating series at
//! the dominant singularity.

pub mod bounds;
pub mod empirics;
pub mod numerics;
pub mod recursions;
pub mod singularity;
