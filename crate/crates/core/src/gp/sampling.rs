use rand::Rng;
use rand_distr::StandardNormal;

use super::posterior::{GpPosterior, JITTER_LADDER};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_semidefinite, dot, forward_solve, lower_mul, SquareMatrix};

/// Posterior variances below this fraction of the output scale are treated
/// as exact zeros when factoring a grid covariance.
const SEMIDEFINITE_TOL: f64 = 1e-10;
/// Largest grid accepted; the covariance is a dense `m × m` matrix.
pub const MAX_GRID_POINTS: usize = 20_000;

/// Joint posterior over a fixed grid, factored once so several independent
/// function draws can share it.
///
/// A draw is `mean + L z` with `z` the next `m` standard-normal variates
/// of the supplied stream, in grid order.
#[derive(Debug, Clone)]
pub struct GridSampler {
    mean: Vec<f64>,
    factor: SquareMatrix,
    jitter: f64,
}

impl GridSampler {
    pub fn new(model: &GpPosterior, grid: &[Vec<f64>]) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::input("sampling grid is empty"));
        }
        if grid.len() > MAX_GRID_POINTS {
            return Err(Error::Capacity(format!(
                "{} grid points exceed the sampler limit of {MAX_GRID_POINTS}",
                grid.len()
            )));
        }
        let d = grid[0].len();
        for g in grid {
            if g.len() != d {
                return Err(Error::input("sampling grid points differ in dimension"));
            }
            model.check_point(g)?;
        }
        let m = grid.len();
        let spec = model.kernel();
        let n = model.data().len();

        // Rows of W are L⁻¹ k(X, g_a); posterior cov = K** − W Wᵀ.
        let w: Vec<Vec<f64>> = if n == 0 {
            vec![Vec::new(); m]
        } else {
            grid.iter()
                .map(|g| forward_solve(model.factor(), &model.cross_cov(g)))
                .collect()
        };
        let mean: Vec<f64> = if n == 0 {
            vec![0.0; m]
        } else {
            grid.iter()
                .map(|g| dot(&model.cross_cov(g), model.weights()))
                .collect()
        };
        let mut cov = SquareMatrix::zeros(m);
        for a in 0..m {
            for b in 0..=a {
                let v = spec.eval_unchecked(&grid[a], &grid[b]) - dot(&w[a], &w[b]);
                cov.set(a, b, v);
                cov.set(b, a, v);
            }
        }
        for a in 0..m {
            let v = cov.get(a, a).max(0.0);
            cov.set(a, a, v);
        }

        let tol = SEMIDEFINITE_TOL * spec.output_scale;
        let mut tried = Vec::new();
        for rel in JITTER_LADDER {
            let jitter = rel * spec.output_scale;
            tried.push(jitter);
            if let Some(factor) = cholesky_semidefinite(&cov, jitter, tol) {
                return Ok(Self {
                    mean,
                    factor,
                    jitter,
                });
            }
        }
        Err(Error::Numerical {
            message: format!("posterior covariance on {m}-point grid is not factorable"),
            jitters: tried,
        })
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn factor(&self) -> &SquareMatrix {
        &self.factor
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z: Vec<f64> = (0..self.len()).map(|_| rng.sample(StandardNormal)).collect();
        let lz = lower_mul(&self.factor, &z);
        self.mean.iter().zip(lz).map(|(m, e)| m + e).collect()
    }
}

/// One joint posterior draw over `grid`.
pub fn sample_on_grid<R: Rng + ?Sized>(
    model: &GpPosterior,
    grid: &[Vec<f64>],
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(GridSampler::new(model, grid)?.draw(rng))
}
