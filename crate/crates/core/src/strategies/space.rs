use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inner_opt::Bounds;

pub const DEFAULT_TS_GRID_PER_DIM: usize = 10;

fn default_ts_grid() -> usize {
    DEFAULT_TS_GRID_PER_DIM
}

/// Box domain split into batch-shared (constrained) and free coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpace {
    pub bounds: Bounds,
    #[serde(default)]
    pub constrained_dims: Vec<usize>,
    /// Thompson-sampling grid resolution per free dimension.
    #[serde(default = "default_ts_grid")]
    pub ts_grid_per_dim: usize,
}

impl DesignSpace {
    pub fn new(bounds: Bounds, constrained_dims: Vec<usize>) -> Result<Self> {
        let s = Self {
            bounds,
            constrained_dims,
            ts_grid_per_dim: DEFAULT_TS_GRID_PER_DIM,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_ts_grid(mut self, per_dim: usize) -> Result<Self> {
        self.ts_grid_per_dim = per_dim;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        let d = self.dim();
        let mut seen = vec![false; d];
        for &i in &self.constrained_dims {
            if i >= d {
                return Err(Error::input(format!("constrained dimension {i} out of range for d = {d}")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::input(format!("constrained dimension {i} listed twice")));
            }
        }
        if self.ts_grid_per_dim < 2 {
            return Err(Error::input("ts_grid_per_dim must be at least 2"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    /// Complement of the constrained set, ascending.
    pub fn unconstrained_dims(&self) -> Vec<usize> {
        (0..self.dim()).filter(|i| !self.constrained_dims.contains(i)).collect()
    }

    /// Errors unless both halves of the split are non-empty.
    pub(crate) fn require_split(&self) -> Result<()> {
        if self.constrained_dims.is_empty() || self.constrained_dims.len() == self.dim() {
            return Err(Error::input(
                "process-constrained strategies need at least one constrained and one free dimension",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Level {
    pub dims: Vec<usize>,
    pub batch_size: usize,
}

/// Tree of nested process constraints. Level `ℓ` fixes its dimensions for
/// all descendants and branches into `batch_size` children per parent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierarchySpec {
    pub levels: Vec<Level>,
}

impl HierarchySpec {
    /// One level per dimension group, with the given batch sizes.
    pub fn new(dims: Vec<Vec<usize>>, batch_sizes: Vec<usize>) -> Result<Self> {
        if dims.len() != batch_sizes.len() {
            return Err(Error::input("hierarchy needs one batch size per level"));
        }
        Ok(Self {
            levels: dims
                .into_iter()
                .zip(batch_sizes)
                .map(|(dims, batch_size)| Level { dims, batch_size })
                .collect(),
        })
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::input("hierarchy has no levels"));
        }
        if self.levels[0].batch_size != 1 {
            return Err(Error::input("the root level must have batch size 1"));
        }
        let mut seen = vec![false; d];
        for (l, level) in self.levels.iter().enumerate() {
            if level.batch_size == 0 {
                return Err(Error::input(format!("level {l} has batch size 0")));
            }
            if level.dims.is_empty() {
                return Err(Error::input(format!("level {l} has no dimensions")));
            }
            for &i in &level.dims {
                if i >= d || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::input(format!(
                        "level dimension sets must partition 0..{d}; bad index {i} at level {l}"
                    )));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::input(format!("level dimension sets do not cover 0..{d}")));
        }
        Ok(())
    }

    pub fn leaves(&self) -> usize {
        self.levels.iter().map(|l| l.batch_size).product()
    }

    /// Dimensions of levels `from..N`, ascending.
    pub fn free_dims(&self, from: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.levels[from..].iter().flat_map(|l| l.dims.iter().copied()).collect();
        v.sort_unstable();
        v
    }

    /// Dimensions of levels `0..to`, ascending.
    pub fn fixed_dims(&self, to: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.levels[..to].iter().flat_map(|l| l.dims.iter().copied()).collect();
        v.sort_unstable();
        v
    }
}
