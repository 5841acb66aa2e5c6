//! Benchmark objectives. Every objective is a score to maximize.

mod gmm;
mod optimum;
mod surrogate;
mod synthetic;

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use gmm::{gmm_eval, gmm_generate, GmmObjective, MIN_MEAN_SPACING};
pub use optimum::{refine_local, scan_and_refine, SCAN_PER_DIM};
pub use surrogate::{read_yield_table, realistic_bounds, Surrogate, FIXED_MASS_MG, MIN_RECORDS};
pub use synthetic::{eval_synthetic, Synthetic, HARTMANN_ARGMAX};

use crate::error::{Error, Result};
use crate::inner_opt::Bounds;
use crate::rng::seeded;

type ObjectiveFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Source {
    Synthetic(Synthetic),
    Gmm(GmmObjective),
    Surrogate(Box<Surrogate>),
    Custom(ObjectiveFn),
}

/// A named objective with its domain and (numeric or analytic) optimum.
#[derive(Clone)]
pub struct Objective {
    name: String,
    bounds: Bounds,
    source: Source,
    x_star: Option<Vec<f64>>,
    f_star: f64,
    default_constrained: Vec<usize>,
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .field("f_star", &self.f_star)
            .finish_non_exhaustive()
    }
}

impl Objective {
    pub fn synthetic(name: &str) -> Result<Self> {
        let s = Synthetic::from_name(name)?;
        let (x, f) = s.optimum();
        Ok(Self {
            name: s.name().to_string(),
            bounds: s.bounds(),
            source: Source::Synthetic(s),
            x_star: Some(x),
            f_star: f,
            default_constrained: s.default_constrained_dims(),
        })
    }

    /// GMM objective on `[-3, 3]²`.
    pub fn gmm(name: impl Into<String>, model: GmmObjective) -> Result<Self> {
        model.validate()?;
        let bounds = Bounds::uniform(2, -3.0, 3.0);
        let (x, f) = if model.components() == 1 {
            // A single Gaussian peaks exactly at its mean.
            let mu = model.means[0].to_vec();
            let f = gmm_eval(&model, &mu);
            (mu, f)
        } else {
            scan_and_refine(&|x: &[f64]| gmm_eval(&model, x), &bounds, SCAN_PER_DIM)
        };
        Ok(Self {
            name: name.into(),
            bounds,
            source: Source::Gmm(model),
            x_star: Some(x),
            f_star: f,
            default_constrained: vec![0],
        })
    }

    /// Generates the case-`case` mixture from `seed`, named `gmm_case{case}`.
    pub fn gmm_case(case: u8, seed: u64) -> Result<Self> {
        let model = gmm_generate(case, &mut seeded(seed))?;
        Self::gmm(format!("gmm_case{case}"), model)
    }

    /// Surrogate on the realistic flow/temperature domain.
    pub fn surrogate(records: &[(Vec<f64>, f64)]) -> Result<Self> {
        Self::surrogate_on(records, &realistic_bounds())
    }

    pub fn surrogate_on(records: &[(Vec<f64>, f64)], bounds: &Bounds) -> Result<Self> {
        let s = Surrogate::fit(records, bounds)?;
        let (x, f) = scan_and_refine(&|x: &[f64]| s.value(x), bounds, SCAN_PER_DIM);
        Ok(Self {
            name: "surrogate".to_string(),
            bounds: bounds.clone(),
            source: Source::Surrogate(Box::new(s)),
            x_star: Some(x),
            f_star: f,
            default_constrained: vec![0],
        })
    }

    /// Wraps an arbitrary function. `f_star` must be its maximum over
    /// `bounds` for regret metrics to be meaningful.
    pub fn from_fn(
        name: impl Into<String>,
        bounds: Bounds,
        f_star: f64,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        bounds.validate()?;
        let d = bounds.dim();
        Ok(Self {
            name: name.into(),
            bounds,
            source: Source::Custom(Arc::new(f)),
            x_star: None,
            f_star,
            default_constrained: (0..d / 2).collect(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn f_star(&self) -> f64 {
        self.f_star
    }

    pub fn x_star(&self) -> Option<&[f64]> {
        self.x_star.as_deref()
    }

    /// Batch-shared dimensions used when a configuration names none.
    pub fn default_constrained_dims(&self) -> &[usize] {
        &self.default_constrained
    }

    pub fn gmm_model(&self) -> Option<&GmmObjective> {
        match &self.source {
            Source::Gmm(g) => Some(g),
            _ => None,
        }
    }

    pub fn surrogate_model(&self) -> Option<&Surrogate> {
        match &self.source {
            Source::Surrogate(s) => Some(s),
            _ => None,
        }
    }

    /// Evaluates at `x`, which must lie inside the bounds.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if !self.bounds.contains(x) {
            return Err(Error::input(format!("{x:?} lies outside the domain of {}", self.name)));
        }
        Ok(self.value(x))
    }

    /// Evaluates without domain checks.
    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.source {
            Source::Synthetic(s) => s.value(x),
            Source::Gmm(g) => gmm_eval(g, x),
            Source::Surrogate(s) => s.value(x),
            Source::Custom(f) => f(x),
        }
    }
}

/// Optimal point (when known) and value, computed once at construction.
pub fn true_optimum(objective: &Objective) -> (Option<Vec<f64>>, f64) {
    (objective.x_star.clone(), objective.f_star)
}

/// See [`Objective::surrogate`].
pub fn fit_surrogate_from_table(records: &[(Vec<f64>, f64)]) -> Result<Objective> {
    Objective::surrogate(records)
}

/// Serializable description of a registered objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    Levy6,
    Hartmann6,
    Rosenbrock3,
    Rosenbrock4,
    Gmm {
        case: u8,
        #[serde(default)]
        seed: u64,
    },
    Surrogate {
        path: PathBuf,
    },
}

impl ObjectiveSpec {
    pub fn build(&self) -> Result<Objective> {
        match self {
            Self::Levy6 => Objective::synthetic("levy6"),
            Self::Hartmann6 => Objective::synthetic("hartmann6"),
            Self::Rosenbrock3 => Objective::synthetic("rosenbrock3"),
            Self::Rosenbrock4 => Objective::synthetic("rosenbrock4"),
            Self::Gmm { case, seed } => Objective::gmm_case(*case, *seed),
            Self::Surrogate { path } => Objective::surrogate(&read_yield_table(path)?),
        }
    }
}
