//! Global maximization over box domains.

mod bounds;
mod direct;
mod grid;

pub use bounds::Bounds;
pub use direct::{direct_maximize, direct_maximize_with, DirectOptions, DirectResult, DEFAULT_DIRECT_EVALS};
pub use grid::{grid_argmax, unit_grid, unit_grid_capped, DEFAULT_GRID_CAP};
