//! Acquisition scores over a GP posterior: GP-UCB with the growing `β_t`
//! schedule, fixed-β UCB, and expected improvement.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::error::{Error, Result};
use crate::gp::GpPosterior;

pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_BETA: f64 = 2.0;
pub const DEFAULT_XI: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AcquisitionSpec {
    GpUcb { delta: f64 },
    Ucb { beta: f64 },
    Ei { xi: f64 },
}

impl AcquisitionSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AcquisitionSpec::GpUcb { delta } if !(delta > 0.0 && delta < 1.0) => {
                Err(Error::input(format!("delta must lie in (0, 1), got {delta}")))
            }
            AcquisitionSpec::Ucb { beta } if !(beta > 0.0 && beta.is_finite()) => {
                Err(Error::input(format!("beta must be > 0, got {beta}")))
            }
            AcquisitionSpec::Ei { xi } if !(xi >= 0.0 && xi.is_finite()) => {
                Err(Error::input(format!("xi must be >= 0, got {xi}")))
            }
            _ => Ok(()),
        }
    }

    /// Exploration weight at iteration `t` in dimension `d`; `None` for EI.
    pub fn beta(&self, t: usize, d: usize) -> Result<Option<f64>> {
        match *self {
            AcquisitionSpec::GpUcb { delta } => beta_t(t, d, delta).map(Some),
            AcquisitionSpec::Ucb { beta } => Ok(Some(beta)),
            AcquisitionSpec::Ei { .. } => Ok(None),
        }
    }
}

/// `2 log(π² t^{2+d/2} / (3δ))`.
pub fn beta_t(t: usize, d: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::input(format!("delta must lie in (0, 1), got {delta}")));
    }
    if t == 0 || d == 0 {
        return Err(Error::input(format!("beta_t needs t >= 1 and d >= 1 (t={t}, d={d})")));
    }
    let t = t as f64;
    let exponent = 2.0 + d as f64 / 2.0;
    Ok(2.0 * (PI * PI / (3.0 * delta) * t.powf(exponent)).ln())
}

/// `mean + √β · stddev`.
pub fn alpha_ucb(mean: f64, stddev: f64, beta: f64) -> f64 {
    mean + beta.sqrt() * stddev
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Expected improvement over `f_best + xi`; `max(Δ, 0)` when `stddev = 0`.
pub fn alpha_ei(mean: f64, stddev: f64, f_best: f64, xi: f64) -> f64 {
    let delta = mean - f_best - xi;
    if stddev <= 0.0 {
        return delta.max(0.0);
    }
    let z = delta / stddev;
    (delta * normal_cdf(z) + stddev * normal_pdf(z)).max(0.0)
}

/// Scores `x` under `spec` at iteration `t`. `β_t` uses the model's input
/// dimension (taken from `x`).
pub fn score(model: &GpPosterior, spec: &AcquisitionSpec, x: &[f64], t: usize, f_best: f64) -> Result<f64> {
    let (mean, var) = model.predict(x)?;
    let sd = var.sqrt();
    Ok(match *spec {
        AcquisitionSpec::Ei { xi } => alpha_ei(mean, sd, f_best, xi),
        _ => {
            let beta = spec.beta(t, x.len())?.expect("UCB kinds carry beta");
            alpha_ucb(mean, sd, beta)
        }
    })
}
