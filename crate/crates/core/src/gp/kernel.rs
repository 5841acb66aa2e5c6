use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stationary kernel profile.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// Matérn with smoothness 5/2.
    #[default]
    Matern25,
    /// Squared exponential.
    Rbf,
}

/// Isotropic kernel hyperparameters plus observation noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// Prior variance of the latent function, `k(x, x)`.
    pub output_scale: f64,
    pub length_scale: f64,
    pub noise_variance: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, output_scale: f64, length_scale: f64, noise_variance: f64) -> Self {
        Self {
            kind,
            output_scale,
            length_scale,
            noise_variance,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.output_scale.is_finite() && self.output_scale > 0.0) {
            return Err(Error::input(format!(
                "output_scale must be finite and > 0, got {}",
                self.output_scale
            )));
        }
        if !(self.length_scale.is_finite() && self.length_scale > 0.0) {
            return Err(Error::input(format!(
                "length_scale must be finite and > 0, got {}",
                self.length_scale
            )));
        }
        if !(self.noise_variance.is_finite() && self.noise_variance >= 0.0) {
            return Err(Error::input(format!(
                "noise_variance must be finite and >= 0, got {}",
                self.noise_variance
            )));
        }
        Ok(())
    }

    /// Kernel value as a function of the squared distance.
    #[inline]
    pub(crate) fn eval_sq_dist(&self, sq_dist: f64) -> f64 {
        let u2 = sq_dist / (self.length_scale * self.length_scale);
        let profile = match self.kind {
            KernelKind::Rbf => (-0.5 * u2).exp(),
            KernelKind::Matern25 => {
                let s = (5.0 * u2).sqrt();
                (1.0 + s + 5.0 * u2 / 3.0) * (-s).exp()
            }
        };
        self.output_scale * profile
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], x2: &[f64]) -> f64 {
        self.eval_sq_dist(sq_dist(x, x2))
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// `θ0 · m(‖x − x2‖ / ℓ)` for the spec's profile `m`.
pub fn kernel_eval(spec: &KernelSpec, x: &[f64], x2: &[f64]) -> Result<f64> {
    if x.len() != x2.len() {
        return Err(Error::input(format!(
            "kernel arguments differ in dimension: {} vs {}",
            x.len(),
            x2.len()
        )));
    }
    Ok(spec.eval_unchecked(x, x2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_profiles() {
        let m = KernelSpec::new(KernelKind::Matern25, 1.0, 1.0, 0.0);
        assert_eq!(kernel_eval(&m, &[0.3, 0.2], &[0.3, 0.2]).unwrap(), 1.0);

        let r = KernelSpec::new(KernelKind::Rbf, 1.0, 1.0, 0.0);
        let v = kernel_eval(&r, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);

        // (1 + √5 + 5/3) e^{−√5}
        let s5 = 5f64.sqrt();
        let expected = (1.0 + s5 + 5.0 / 3.0) * (-s5).exp();
        let v = kernel_eval(&m, &[0.0], &[1.0]).unwrap();
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.523994).abs() < 1e-6);
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let m = KernelSpec::new(KernelKind::Matern25, 1.0, 1.0, 0.0);
        assert!(matches!(kernel_eval(&m, &[0.0], &[0.0, 1.0]), Err(Error::Input(_))));
    }

    #[test]
    fn output_scale_multiplies() {
        let m = KernelSpec::new(KernelKind::Matern25, 2.5, 0.7, 0.0);
        assert_eq!(kernel_eval(&m, &[1.0], &[1.0]).unwrap(), 2.5);
        assert!(m.validate().is_ok());
        assert!(KernelSpec::new(KernelKind::Rbf, 0.0, 1.0, 0.0).validate().is_err());
        assert!(KernelSpec::new(KernelKind::Rbf, 1.0, 1.0, -1e-3).validate().is_err());
    }
}
