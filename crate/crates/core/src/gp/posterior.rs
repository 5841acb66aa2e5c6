use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use crate::error::{Error, Result};
use crate::linalg::{backward_solve_transposed, cholesky, dot, forward_solve, SquareMatrix};

/// Diagonal jitter ladder, relative to the output scale.
pub const JITTER_LADDER: [f64; 5] = [0.0, 1e-10, 1e-8, 1e-6, 1e-4];

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Observed inputs and outputs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, outputs: Vec<f64>) -> Result<Self> {
        let d = Self { inputs, outputs };
        d.validate()?;
        Ok(d)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.len() != self.outputs.len() {
            return Err(Error::input(format!(
                "dataset has {} inputs but {} outputs",
                self.inputs.len(),
                self.outputs.len()
            )));
        }
        if let Some(first) = self.inputs.first() {
            let d = first.len();
            for (i, x) in self.inputs.iter().enumerate() {
                if x.len() != d {
                    return Err(Error::input(format!(
                        "input {i} has dimension {} (expected {d})",
                        x.len()
                    )));
                }
                if x.iter().any(|v| !v.is_finite()) {
                    return Err(Error::input(format!("input {i} is not finite")));
                }
            }
        }
        if let Some(i) = self.outputs.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("output {i} is not finite")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.inputs.first().map(Vec::len)
    }

    pub fn push(&mut self, x: Vec<f64>, y: f64) {
        self.inputs.push(x);
        self.outputs.push(y);
    }

    /// Sample variance (population form) of the outputs.
    pub fn output_variance(&self) -> f64 {
        let n = self.outputs.len();
        if n == 0 {
            return 0.0;
        }
        let mean = self.outputs.iter().sum::<f64>() / n as f64;
        self.outputs.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / n as f64
    }

    /// Scale used for default output-scale bounds and the fixed noise level:
    /// the output variance, or the raw second moment when outputs are constant.
    pub fn output_scale_hint(&self) -> f64 {
        let v = self.output_variance();
        if v > 0.0 {
            return v;
        }
        let n = self.outputs.len().max(1) as f64;
        let m2 = self.outputs.iter().map(|y| y * y).sum::<f64>() / n;
        m2.max(1.0)
    }
}

/// GP conditioned on a dataset under a zero prior mean.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    kernel: KernelSpec,
    data: Dataset,
    factor: SquareMatrix,
    weights: Vec<f64>,
    jitter: f64,
}

/// Conditions a zero-mean GP on `data`.
pub fn fit(data: &Dataset, spec: &KernelSpec) -> Result<GpPosterior> {
    spec.validate()?;
    data.validate()?;
    let n = data.len();
    let x = &data.inputs;
    let c = SquareMatrix::from_fn(n, |i, j| {
        let k = spec.eval_unchecked(&x[i], &x[j]);
        if i == j {
            k + spec.noise_variance
        } else {
            k
        }
    });
    let mut tried = Vec::with_capacity(JITTER_LADDER.len());
    for rel in JITTER_LADDER {
        let jitter = rel * spec.output_scale;
        tried.push(jitter);
        if let Some(factor) = cholesky(&c, jitter) {
            let z = forward_solve(&factor, &data.outputs);
            let weights = backward_solve_transposed(&factor, &z);
            return Ok(GpPosterior {
                kernel: *spec,
                data: data.clone(),
                factor,
                weights,
                jitter,
            });
        }
    }
    Err(Error::Numerical {
        message: format!("Cholesky of {n}x{n} covariance failed"),
        jitters: tried,
    })
}

impl GpPosterior {
    pub fn prior(spec: &KernelSpec) -> Result<Self> {
        fit(&Dataset::empty(), spec)
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    /// Lower factor of `K + (σ² + jitter) I`.
    pub fn factor(&self) -> &SquareMatrix {
        &self.factor
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Diagonal jitter that made the factorization succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn dim(&self) -> Option<usize> {
        self.data.dim()
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        match self.dim() {
            Some(d) if d != x.len() => Err(Error::input(format!(
                "query point has dimension {} but the model has {d}",
                x.len()
            ))),
            _ => Ok(()),
        }
    }

    pub(crate) fn cross_cov(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .inputs
            .iter()
            .map(|xi| self.kernel.eval_unchecked(xi, x))
            .collect()
    }

    /// Posterior mean and (latent) variance at `x`. Variance is clamped at 0.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        self.check_point(x)?;
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> (f64, f64) {
        if self.data.is_empty() {
            return (0.0, self.kernel.output_scale);
        }
        let k = self.cross_cov(x);
        let mean = dot(&k, &self.weights);
        let v = forward_solve(&self.factor, &k);
        let var = self.kernel.output_scale - dot(&v, &v);
        (mean, var.max(0.0))
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.data.len();
        if n == 0 {
            return 0.0;
        }
        let fit_term = -0.5 * dot(&self.data.outputs, &self.weights);
        let log_det_half: f64 = (0..n).map(|i| self.factor.get(i, i).ln()).sum();
        fit_term - log_det_half - 0.5 * n as f64 * LN_2PI
    }

    /// Conditions on `points` with dummy observations equal to the current
    /// posterior mean. Only the variance of the result is meaningful, and it
    /// does not depend on the dummy values.
    pub fn with_hallucinated(&self, points: &[Vec<f64>]) -> Result<GpPosterior> {
        let mut data = self.data.clone();
        for p in points {
            self.check_point(p)?;
            let (mean, _) = self.predict_unchecked(p);
            data.push(p.clone(), mean);
        }
        fit(&data, &self.kernel)
    }
}

/// See [`GpPosterior::predict`].
pub fn predict(model: &GpPosterior, x: &[f64]) -> Result<(f64, f64)> {
    model.predict(x)
}

/// `−½ yᵀC⁻¹y − ½ log|C| − (n/2) log 2π`.
pub fn log_marginal_likelihood(model: &GpPosterior) -> f64 {
    model.log_marginal_likelihood()
}

#[cfg(test)]
mod tests {
    use super::super::kernel::KernelKind;
    use super::*;

    fn rbf(noise: f64) -> KernelSpec {
        KernelSpec::new(KernelKind::Rbf, 1.0, 1.0, noise)
    }

    #[test]
    fn empty_dataset_gives_prior() {
        let spec = KernelSpec::new(KernelKind::Matern25, 2.0, 0.3, 0.0);
        let gp = fit(&Dataset::empty(), &spec).unwrap();
        assert_eq!(gp.predict(&[0.1, 0.9]).unwrap(), (0.0, 2.0));
        assert_eq!(gp.predict(&[5.0]).unwrap(), (0.0, 2.0));
        assert_eq!(gp.log_marginal_likelihood(), 0.0);
    }

    #[test]
    fn one_point_posterior_closed_form() {
        let data = Dataset::new(vec![vec![0.0]], vec![1.0]).unwrap();
        let gp = fit(&data, &rbf(0.0)).unwrap();
        let (m0, v0) = gp.predict(&[0.0]).unwrap();
        assert!((m0 - 1.0).abs() < 1e-12);
        assert!(v0 <= 1e-8);
        // μ = k(x, x0) y / k(x0, x0), σ² = k(x,x) − k(x,x0)² / k(x0,x0)
        let (m1, v1) = gp.predict(&[1.0]).unwrap();
        assert!((m1 - (-0.5f64).exp()).abs() < 1e-12);
        assert!((v1 - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert!((m1 - 0.606531).abs() < 1e-6);
        assert!((v1 - 0.632121).abs() < 1e-6);
    }

    #[test]
    fn lml_scalar_cases() {
        let data = Dataset::new(vec![vec![0.0]], vec![0.0]).unwrap();
        let gp = fit(&data, &rbf(0.0)).unwrap();
        assert!((gp.log_marginal_likelihood() + 0.5 * LN_2PI).abs() < 1e-12);

        let data = Dataset::new(vec![vec![0.0]], vec![1.0]).unwrap();
        let gp = fit(&data, &rbf(0.1)).unwrap();
        let expected = -1.0 / 2.2 - 0.5 * 1.1f64.ln() - 0.5 * LN_2PI;
        assert!((gp.log_marginal_likelihood() - expected).abs() < 1e-12);
        assert!((gp.log_marginal_likelihood() + 1.421139).abs() < 1e-6);
    }

    #[test]
    fn duplicate_points_need_jitter() {
        let data = Dataset::new(vec![vec![0.5], vec![0.5]], vec![1.0, 1.0]).unwrap();
        let gp = fit(&data, &rbf(0.0)).unwrap();
        assert!(gp.jitter() > 0.0);
        let (m, _) = gp.predict(&[0.5]).unwrap();
        assert!((m - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Dataset::new(vec![vec![0.0]], vec![]).is_err());
        assert!(Dataset::new(vec![vec![f64::NAN]], vec![1.0]).is_err());
        assert!(Dataset::new(vec![vec![0.0], vec![0.0, 1.0]], vec![1.0, 2.0]).is_err());
        let data = Dataset::new(vec![vec![0.0, 1.0]], vec![1.0]).unwrap();
        let gp = fit(&data, &rbf(0.0)).unwrap();
        assert!(matches!(gp.predict(&[0.0]), Err(Error::Input(_))));
    }

    #[test]
    fn hallucination_zeroes_variance_at_point() {
        let data = Dataset::new(vec![vec![0.1]], vec![0.3]).unwrap();
        let gp = fit(&data, &rbf(1e-8)).unwrap();
        let h = gp.with_hallucinated(&[vec![0.8]]).unwrap();
        let (m_before, _) = gp.predict(&[0.8]).unwrap();
        let (m_after, v_after) = h.predict(&[0.8]).unwrap();
        assert!(v_after < 1e-6);
        assert!((m_before - m_after).abs() < 1e-6);
    }
}
