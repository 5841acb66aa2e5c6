//! Analytic benchmark functions, all oriented as scores (higher is better)
//! and shifted to be non-negative over most of their domain.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::inner_opt::Bounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Synthetic {
    Levy6,
    Hartmann6,
    Rosenbrock3,
    Rosenbrock4,
}

const HARTMANN_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const HARTMANN_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];
const HARTMANN_P: [[f64; 6]; 4] = [
    [1312.0, 1696.0, 5569.0, 124.0, 8283.0, 5886.0],
    [2329.0, 4135.0, 8307.0, 3736.0, 1004.0, 9991.0],
    [2348.0, 1451.0, 3522.0, 2883.0, 3047.0, 6650.0],
    [4047.0, 8828.0, 8732.0, 5743.0, 1091.0, 381.0],
];
/// Known maximizer of the six-dimensional Hartmann function.
pub const HARTMANN_ARGMAX: [f64; 6] = [0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573];

impl Synthetic {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "levy6" => Ok(Self::Levy6),
            "hartmann6" => Ok(Self::Hartmann6),
            "rosenbrock3" => Ok(Self::Rosenbrock3),
            "rosenbrock4" => Ok(Self::Rosenbrock4),
            other => Err(Error::input(format!("unknown synthetic function `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Levy6 => "levy6",
            Self::Hartmann6 => "hartmann6",
            Self::Rosenbrock3 => "rosenbrock3",
            Self::Rosenbrock4 => "rosenbrock4",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Self::Levy6 | Self::Hartmann6 => 6,
            Self::Rosenbrock3 => 3,
            Self::Rosenbrock4 => 4,
        }
    }

    pub fn bounds(self) -> Bounds {
        match self {
            Self::Levy6 => Bounds::uniform(6, -5.0, 5.0),
            Self::Hartmann6 => Bounds::uniform(6, 0.0, 1.0),
            Self::Rosenbrock3 => Bounds::uniform(3, -2.0, 2.0),
            Self::Rosenbrock4 => Bounds::uniform(4, -2.0, 2.0),
        }
    }

    /// Default batch-shared dimensions.
    pub fn default_constrained_dims(self) -> Vec<usize> {
        match self {
            Self::Levy6 | Self::Hartmann6 => vec![0, 1, 2],
            Self::Rosenbrock3 => vec![0],
            // The last k coordinates are the constrained ones.
            Self::Rosenbrock4 => vec![2, 3],
        }
    }

    /// Formula value without domain checks.
    pub fn value(self, x: &[f64]) -> f64 {
        match self {
            Self::Levy6 => levy6(x),
            Self::Hartmann6 => hartmann6(x),
            Self::Rosenbrock3 => 7218.0 - rosenbrock(x),
            Self::Rosenbrock4 => 10827.0 - rosenbrock(x),
        }
    }

    /// Analytic optimum `(x*, f*)`.
    pub fn optimum(self) -> (Vec<f64>, f64) {
        match self {
            Self::Levy6 => (vec![1.0; 6], 47.341),
            Self::Hartmann6 => {
                let x = HARTMANN_ARGMAX.to_vec();
                let f = hartmann6(&x);
                (x, f)
            }
            Self::Rosenbrock3 => (vec![1.0; 3], 7218.0),
            Self::Rosenbrock4 => (vec![1.0; 4], 10827.0),
        }
    }
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

fn levy6(x: &[f64]) -> f64 {
    let w: Vec<f64> = x.iter().map(|v| 1.0 + (v - 1.0) / 4.0).collect();
    let head = (PI * w[0]).sin().powi(2);
    let middle: f64 = w[..5]
        .iter()
        .map(|wi| (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2)))
        .sum();
    let tail = (w[5] - 1.0).powi(2) * (1.0 + (2.0 * PI * w[5]).sin().powi(2));
    47.341 - (head + middle + tail)
}

fn hartmann6(x: &[f64]) -> f64 {
    (0..4)
        .map(|i| {
            let inner: f64 = (0..6)
                .map(|j| HARTMANN_A[i][j] * (x[j] - 1e-4 * HARTMANN_P[i][j]).powi(2))
                .sum();
            HARTMANN_ALPHA[i] * (-inner).exp()
        })
        .sum()
}

/// Evaluates a named analytic function, rejecting points of the wrong
/// dimension or outside its domain.
pub fn eval_synthetic(name: &str, x: &[f64]) -> Result<f64> {
    let f = Synthetic::from_name(name)?;
    if x.len() != f.dim() {
        return Err(Error::input(format!("{name} takes {} inputs, got {}", f.dim(), x.len())));
    }
    if !f.bounds().contains(x) {
        return Err(Error::input(format!("{x:?} lies outside the domain of {name}")));
    }
    Ok(f.value(x))
}
