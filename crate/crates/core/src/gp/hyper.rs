//! Marginal-likelihood hyperparameter search.
//!
//! Multistart coordinate-wise golden-section search over `(log ℓ, log θ0)`,
//! plus `log σ²` when noise is learned. Each coordinate move is kept only if
//! it improves the log marginal likelihood, so the result never scores below
//! any start point.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::posterior::{fit, Dataset};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperBounds {
    pub length_scale: (f64, f64),
    pub output_scale: (f64, f64),
    pub noise_variance: (f64, f64),
}

impl HyperBounds {
    /// `ℓ ∈ [1e-2, 1e1]` (unit-cube inputs), `θ0 ∈ [1e-3 s, 1e3 s]` and
    /// `σ² ∈ [1e-10 s, 1e-1 s]` with `s` the dataset's output scale hint.
    pub fn default_for(data: &Dataset) -> Self {
        let s = data.output_scale_hint();
        Self {
            length_scale: (1e-2, 1e1),
            output_scale: (1e-3 * s, 1e3 * s),
            noise_variance: (1e-10 * s, 1e-1 * s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperOptions {
    pub restarts: usize,
    pub learn_noise: bool,
    /// Coordinate sweeps per restart.
    pub passes: usize,
    /// Golden-section iterations per coordinate line search.
    pub golden_iters: usize,
    /// Explicit bounds; derived from the data when absent.
    pub bounds: Option<HyperBounds>,
}

impl Default for HyperOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            learn_noise: false,
            passes: 2,
            golden_iters: 16,
            bounds: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperFit {
    pub spec: KernelSpec,
    pub log_likelihood: f64,
    /// Set when every restart failed numerically and the start spec was
    /// returned unchanged.
    pub warning: bool,
}

struct Search<'a> {
    data: &'a Dataset,
    base: KernelSpec,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Search<'_> {
    fn spec(&self, p: &[f64]) -> KernelSpec {
        let mut s = self.base;
        s.length_scale = p[0].exp();
        s.output_scale = p[1].exp();
        if p.len() > 2 {
            s.noise_variance = p[2].exp();
        }
        s
    }

    fn score(&self, p: &[f64]) -> f64 {
        match fit(self.data, &self.spec(p)) {
            Ok(gp) => {
                let v = gp.log_marginal_likelihood();
                if v.is_finite() {
                    v
                } else {
                    f64::NEG_INFINITY
                }
            }
            Err(_) => f64::NEG_INFINITY,
        }
    }

    fn clamp(&self, p: &mut [f64]) {
        for (i, v) in p.iter_mut().enumerate() {
            *v = v.clamp(self.lo[i], self.hi[i]);
        }
    }

    /// Golden-section maximization along coordinate `c` inside `[a, b]`.
    /// Returns the best evaluated (value, score).
    fn line_search(&self, p: &[f64], c: usize, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
        let mut probe = p.to_vec();
        let mut eval = |v: f64| {
            probe[c] = v;
            self.score(&probe)
        };
        let mut x1 = b - GOLDEN * (b - a);
        let mut x2 = a + GOLDEN * (b - a);
        let mut f1 = eval(x1);
        let mut f2 = eval(x2);
        let (mut best_x, mut best_f) = if f2 > f1 { (x2, f2) } else { (x1, f1) };
        for _ in 0..iters {
            if f1 >= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - GOLDEN * (b - a);
                f1 = eval(x1);
                if f1 > best_f {
                    best_x = x1;
                    best_f = f1;
                }
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + GOLDEN * (b - a);
                f2 = eval(x2);
                if f2 > best_f {
                    best_x = x2;
                    best_f = f2;
                }
            }
        }
        (best_x, best_f)
    }

    fn refine(&self, start: Vec<f64>, opts: &HyperOptions) -> (Vec<f64>, f64) {
        let mut p = start;
        let mut f = self.score(&p);
        for pass in 0..opts.passes {
            for c in 0..p.len() {
                let range = self.hi[c] - self.lo[c];
                let half = range / 4f64.powi(pass as i32);
                let a = (p[c] - half).max(self.lo[c]);
                let b = (p[c] + half).min(self.hi[c]);
                if b <= a {
                    continue;
                }
                let (v, fv) = self.line_search(&p, c, a, b, opts.golden_iters);
                if fv > f {
                    p[c] = v;
                    f = fv;
                }
            }
        }
        (p, f)
    }
}

/// Maximizes the log marginal likelihood starting from `start` and
/// `restarts - 1` random log-uniform points inside the bounds.
///
/// With fewer than two observations `start` is returned unchanged.
pub fn optimize_hyperparams<R: Rng + ?Sized>(
    data: &Dataset,
    start: &KernelSpec,
    opts: &HyperOptions,
    rng: &mut R,
) -> HyperFit {
    let unchanged = |warning| HyperFit {
        spec: *start,
        log_likelihood: fit(data, start)
            .map(|g| g.log_marginal_likelihood())
            .unwrap_or(f64::NEG_INFINITY),
        warning,
    };
    if data.len() < 2 {
        return unchanged(false);
    }
    let bounds = opts.bounds.unwrap_or_else(|| HyperBounds::default_for(data));
    let mut lo = vec![bounds.length_scale.0.ln(), bounds.output_scale.0.ln()];
    let mut hi = vec![bounds.length_scale.1.ln(), bounds.output_scale.1.ln()];
    if opts.learn_noise {
        lo.push(bounds.noise_variance.0.ln());
        hi.push(bounds.noise_variance.1.ln());
    }
    let search = Search {
        data,
        base: *start,
        lo,
        hi,
    };

    let mut first = vec![start.length_scale.ln(), start.output_scale.ln()];
    if opts.learn_noise {
        first.push(start.noise_variance.max(f64::MIN_POSITIVE).ln());
    }
    search.clamp(&mut first);
    let mut starts = vec![first];
    for _ in 1..opts.restarts.max(1) {
        let p: Vec<f64> = (0..search.lo.len())
            .map(|i| search.lo[i] + rng.random::<f64>() * (search.hi[i] - search.lo[i]))
            .collect();
        starts.push(p);
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    for s in starts {
        let (p, f) = search.refine(s, opts);
        if f.is_finite() && best.as_ref().is_none_or(|(_, bf)| f > *bf) {
            best = Some((p, f));
        }
    }
    match best {
        Some((p, f)) => HyperFit {
            spec: search.spec(&p),
            log_likelihood: f,
            warning: false,
        },
        None => {
            log::warn!("hyperparameter search failed on every restart; keeping start spec");
            unchanged(true)
        }
    }
}
