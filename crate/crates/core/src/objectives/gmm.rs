//! Two-dimensional Gaussian-mixture objectives.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum pairwise distance between component means for cases 2 and 3.
pub const MIN_MEAN_SPACING: f64 = 2.0;
const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmObjective {
    pub weights: Vec<f64>,
    pub means: Vec<[f64; 2]>,
    /// Row-major 2×2 covariance matrices.
    pub covariances: Vec<[[f64; 2]; 2]>,
}

impl GmmObjective {
    pub fn validate(&self) -> Result<()> {
        let k = self.weights.len();
        if k == 0 || self.means.len() != k || self.covariances.len() != k {
            return Err(Error::input("GMM components are inconsistent"));
        }
        if self.weights.iter().any(|w| *w < 0.0) || (self.weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::input("GMM weights must be non-negative and sum to 1"));
        }
        for c in &self.covariances {
            let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
            if c[0][1] != c[1][0] || c[0][0] <= 0.0 || det <= 0.0 {
                return Err(Error::input("GMM covariance is not symmetric positive-definite"));
            }
        }
        Ok(())
    }

    pub fn components(&self) -> usize {
        self.weights.len()
    }
}

/// Draws a case-`case` mixture: `case` components with equal weights, means
/// uniform on `[-3, 3]²` and diagonal covariances with entries uniform on
/// `[0.7, 1.3]` (cases 1–3) or `[1.5, 2.0]` (case 4). Cases 2 and 3 resample
/// the means until they are at least [`MIN_MEAN_SPACING`] apart.
pub fn gmm_generate<R: Rng + ?Sized>(case: u8, rng: &mut R) -> Result<GmmObjective> {
    if !(1..=4).contains(&case) {
        return Err(Error::input(format!("GMM case must be 1..=4, got {case}")));
    }
    let k = case as usize;
    let (lo, hi) = if case == 4 { (1.5, 2.0) } else { (0.7, 1.3) };
    let covariances = (0..k)
        .map(|_| {
            let a = rng.random_range(lo..=hi);
            let b = rng.random_range(lo..=hi);
            [[a, 0.0], [0.0, b]]
        })
        .collect();
    let spaced = matches!(case, 2 | 3);
    let mut attempts = 0;
    let means = loop {
        attempts += 1;
        let means: Vec<[f64; 2]> = (0..k)
            .map(|_| [rng.random_range(-3.0..=3.0), rng.random_range(-3.0..=3.0)])
            .collect();
        let ok = !spaced
            || means.iter().enumerate().all(|(i, a)| {
                means[i + 1..]
                    .iter()
                    .all(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt() >= MIN_MEAN_SPACING)
            });
        if ok {
            break means;
        }
        if attempts >= MAX_ATTEMPTS {
            return Err(Error::Generation(format!(
                "could not place {k} means {MIN_MEAN_SPACING} apart in {MAX_ATTEMPTS} attempts"
            )));
        }
    };
    Ok(GmmObjective {
        weights: vec![1.0 / k as f64; k],
        means,
        covariances,
    })
}

/// Mixture density `Σ π_k N(x | μ_k, Σ_k)`.
pub fn gmm_eval(model: &GmmObjective, x: &[f64]) -> f64 {
    model
        .weights
        .iter()
        .zip(&model.means)
        .zip(&model.covariances)
        .map(|((w, mu), c)| {
            let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
            let (dx, dy) = (x[0] - mu[0], x[1] - mu[1]);
            // Quadratic form with the explicit 2×2 inverse.
            let q = (c[1][1] * dx * dx - (c[0][1] + c[1][0]) * dx * dy + c[0][0] * dy * dy) / det;
            w * (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
        })
        .sum()
}
