use serde::{Deserialize, Serialize};

use crate::inner_opt::Bounds;

/// How a batch point was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Maximizer of a confidence-bound acquisition.
    Ucb,
    /// Maximizer of expected improvement.
    Ei,
    /// Thompson-sample grid argmax.
    Ts,
    /// Maximizer of hallucinated posterior variance.
    PureExploration,
    /// Uniform draw.
    Random,
}

/// One batch. `unit_points` are the coordinates the strategy worked in;
/// `points` are the same points mapped into the real domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchProposal {
    pub points: Vec<Vec<f64>>,
    pub unit_points: Vec<Vec<f64>>,
    pub provenance: Vec<Provenance>,
}

impl BatchProposal {
    pub fn from_unit(bounds: &Bounds, unit_points: Vec<Vec<f64>>, provenance: Vec<Provenance>) -> Self {
        debug_assert_eq!(unit_points.len(), provenance.len());
        Self {
            points: unit_points.iter().map(|u| bounds.from_unit(u)).collect(),
            unit_points,
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when every point has bit-identical coordinates on `dims`.
    pub fn shares_dims(&self, dims: &[usize]) -> bool {
        self.points.iter().all(|p| {
            dims.iter()
                .all(|&i| p[i].to_bits() == self.points[0][i].to_bits())
        })
    }
}
