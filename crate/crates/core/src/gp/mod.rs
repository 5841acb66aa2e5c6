//! Gaussian-process regression with a zero prior mean.

mod hyper;
mod kernel;
mod posterior;
mod sampling;

pub use hyper::{optimize_hyperparams, HyperBounds, HyperFit, HyperOptions};
pub use kernel::{kernel_eval, KernelKind, KernelSpec};
pub use posterior::{fit, log_marginal_likelihood, predict, Dataset, GpPosterior, JITTER_LADDER};
pub use sampling::{sample_on_grid, GridSampler, MAX_GRID_POINTS};
