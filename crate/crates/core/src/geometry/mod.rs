//! Convex localization bodies inside the unit ball: support queries, cuts,
//! sampling-based centroids of cylindrifications, and thin-direction tracking.

mod body;
mod directions;
mod sampler;
mod solver;
mod vertices;

pub use body::{ConvexBody, Halfspace, KeepSide, UNIT_TOL};
pub use directions::{orthonormal_complement, update_small_directions, DirectionBasis};
pub use sampler::{
    centroid_cyl, centroid_from_samples, hit_and_run, projected_hit_and_run, Cylinder,
    SamplerConfig,
};
pub use solver::GAP_TOL;
