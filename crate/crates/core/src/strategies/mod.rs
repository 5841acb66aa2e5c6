//! Batch proposal strategies and the campaign loop.

mod config;
mod engine;
mod hpc;
mod proposal;
mod propose;
mod space;

use serde::{Deserialize, Serialize};

pub use config::{CampaignConfig, ModelConfig, StrategyKind, StrategyName};
pub use engine::{initial_batch, EngineState, ObservedBatch, FIXED_NOISE_FRACTION};
pub use hpc::propose_hpc_bo_ts;
pub use proposal::{BatchProposal, Provenance};
pub use propose::{
    propose_gp_ucb_pe, propose_pc_basic, propose_pc_bo_ts, propose_pc_nested, propose_random,
    propose_sequential, ProposeCtx, SearchBudget, Streams, MAX_TS_GRID_POINTS,
};
pub use space::{DesignSpace, HierarchySpec, Level, DEFAULT_TS_GRID_PER_DIM};

use crate::error::{Error, Result};
use crate::objectives::Objective;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    pub proposal: BatchProposal,
    pub values: Vec<f64>,
}

/// Everything a finished (or aborted) campaign produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignHistory {
    pub strategy: StrategyName,
    pub seed: u64,
    pub iterations: Vec<IterationRecord>,
    pub best_point: Option<Vec<f64>>,
    pub best_value: Option<f64>,
    /// Why the campaign stopped early, if it did.
    pub failure: Option<String>,
}

impl CampaignHistory {
    pub fn new(strategy: StrategyName, seed: u64) -> Self {
        Self {
            strategy,
            seed,
            iterations: Vec::new(),
            best_point: None,
            best_value: None,
            failure: None,
        }
    }

    pub fn push(&mut self, t: usize, proposal: BatchProposal, values: Vec<f64>) {
        for (x, &y) in proposal.points.iter().zip(&values) {
            if self.best_value.is_none_or(|b| y > b) {
                self.best_value = Some(y);
                self.best_point = Some(x.clone());
            }
        }
        self.iterations.push(IterationRecord { t, proposal, values });
    }

    /// Every evaluated point in order.
    pub fn evaluations(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.iterations
            .iter()
            .flat_map(|it| it.proposal.points.iter().map(Vec::as_slice).zip(it.values.iter().copied()))
    }
}

/// Runs the initialization batch plus `iterations` proposal rounds.
///
/// Invalid configurations are errors. A failure while running (including a
/// non-finite objective value) ends the campaign early; the history keeps
/// every completed iteration and records the reason.
pub fn run_campaign(config: &CampaignConfig, objective: &Objective, iterations: usize, seed: u64) -> Result<CampaignHistory> {
    config.validate()?;
    if iterations == 0 {
        return Err(Error::input("a campaign needs at least one iteration"));
    }
    if objective.bounds() != &config.space.bounds {
        return Err(Error::input(format!(
            "configured bounds do not match the domain of {}",
            objective.name()
        )));
    }
    let mut state = EngineState::default();
    let mut history = CampaignHistory::new(config.strategy, seed);
    for t in 0..=iterations {
        let step = state.suggest(config, seed).and_then(|proposal| {
            let values = proposal
                .points
                .iter()
                .map(|x| {
                    let y = objective.eval(x)?;
                    if y.is_finite() {
                        Ok(y)
                    } else {
                        Err(Error::NonFinite { point: x.clone(), value: y })
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            state.observe(&values)?;
            Ok((proposal, values))
        });
        match step {
            Ok((proposal, values)) => history.push(t, proposal, values),
            Err(e) => {
                log::warn!("{} seed {seed} stopped at iteration {t}: {e}", config.strategy);
                history.failure = Some(format!("iteration {t}: {e}"));
                break;
            }
        }
    }
    Ok(history)
}

#[cfg(test)]
mod tests;
