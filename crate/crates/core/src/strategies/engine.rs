//! Campaign state machine shared by [`run_campaign`](super::run_campaign)
//! and the ask-tell API: `suggest` builds the next batch, `observe` absorbs
//! its values.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{CampaignConfig, StrategyKind};
use super::hpc::propose_hpc_bo_ts;
use super::proposal::{BatchProposal, Provenance};
use super::propose::{
    maximize_acquisition, propose_gp_ucb_pe, propose_pc_basic, propose_pc_bo_ts, propose_pc_nested,
    propose_random, propose_sequential, ProposeCtx, SearchBudget, Streams,
};
use crate::acquisition::{AcquisitionSpec, DEFAULT_BETA};
use crate::error::{Error, Result};
use crate::gp::{fit, optimize_hyperparams, Dataset, GpPosterior, HyperOptions, KernelSpec};
use crate::rng::Purpose;

/// Relative noise variance used whenever noise is not learned.
pub const FIXED_NOISE_FRACTION: f64 = 1e-6;

/// One evaluated batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservedBatch {
    pub points: Vec<Vec<f64>>,
    pub unit_points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

/// Mutable part of a campaign.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineState {
    /// Index of the next batch; 0 means the initialization batch.
    pub t: usize,
    pub batches: Vec<ObservedBatch>,
    /// Last fitted kernel, reused as one restart of the next fit.
    pub kernel: Option<KernelSpec>,
    /// Same for the outer model of the nested strategy.
    pub outer_kernel: Option<KernelSpec>,
    pub pending: Option<BatchProposal>,
}

impl EngineState {
    /// All observations, unit inputs.
    pub fn dataset(&self) -> Dataset {
        let mut data = Dataset::empty();
        for b in &self.batches {
            for (x, y) in b.unit_points.iter().zip(&b.values) {
                data.push(x.clone(), *y);
            }
        }
        data
    }

    /// Produces the next batch and records it as pending.
    pub fn suggest(&mut self, config: &CampaignConfig, seed: u64) -> Result<BatchProposal> {
        if self.pending.is_some() {
            return Err(Error::Sequencing("a proposal is already awaiting observations".into()));
        }
        let proposal = if self.t == 0 {
            initial_batch(config, seed)?
        } else {
            self.next_batch(config, seed)?
        };
        self.pending = Some(proposal.clone());
        Ok(proposal)
    }

    /// Absorbs one value per pending point.
    pub fn observe(&mut self, values: &[f64]) -> Result<()> {
        let Some(pending) = &self.pending else {
            return Err(Error::Sequencing("no proposal is awaiting observations".into()));
        };
        if values.len() != pending.len() {
            return Err(Error::input(format!(
                "expected {} values for the pending batch, got {}",
                pending.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("value for slot {k} is not finite ({})", values[k])));
        }
        let pending = self.pending.take().expect("checked above");
        self.batches.push(ObservedBatch {
            points: pending.points,
            unit_points: pending.unit_points,
            values: values.to_vec(),
        });
        self.t += 1;
        Ok(())
    }

    fn next_batch(&mut self, config: &CampaignConfig, seed: u64) -> Result<BatchProposal> {
        let space = &config.space;
        let streams = Streams::new(seed, self.t as u64);
        let b = config.effective_batch_size();
        let acq = config.acquisition();
        if config.strategy.kind() == StrategyKind::Random {
            return propose_random(space, b, &mut streams.get(0, Purpose::Random));
        }

        let data = self.dataset();
        let model = refit(&data, self.kernel, config, streams, Purpose::Hyper)?;
        self.kernel = Some(*model.kernel());
        let ctx = ProposeCtx {
            model: &model,
            space,
            t: self.t,
            f_best: data.outputs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            streams,
            budget: SearchBudget {
                direct_evals: config.model.direct_evals,
                fallback_probes: config.model.fallback_probes,
            },
        };
        match config.strategy.kind() {
            StrategyKind::Random => unreachable!("handled above"),
            StrategyKind::Sequential => propose_sequential(&ctx, &acq),
            StrategyKind::GpUcbPe => propose_gp_ucb_pe(&ctx, b, &acq),
            StrategyKind::PcBasic => propose_pc_basic(&ctx, b, &acq),
            StrategyKind::PcTs => propose_pc_bo_ts(&ctx, b, &acq),
            StrategyKind::PcNested => {
                let outer_data = self.outer_dataset(config);
                let outer = refit(&outer_data, self.outer_kernel, config, streams, Purpose::HyperOuter)?;
                self.outer_kernel = Some(*outer.kernel());
                propose_pc_nested(&ctx, &outer, b, &acq)
            }
            StrategyKind::HpcTs => {
                let hierarchy = config.hierarchy.as_ref().expect("validated");
                let d = space.dim();
                // The tree root is the fixed-β UCB argmax, whatever the
                // configured acquisition.
                let ucb = match acq {
                    AcquisitionSpec::Ucb { .. } => acq,
                    _ => AcquisitionSpec::Ucb { beta: DEFAULT_BETA },
                };
                let all: Vec<usize> = (0..d).collect();
                let x_ucb = maximize_acquisition(&ctx, &model, &ucb, &vec![0.5; d], &all, 0)?;
                propose_hpc_bo_ts(&ctx, hierarchy, &x_ucb)
            }
        }
    }

    /// `(x^c, max y)` per batch.
    fn outer_dataset(&self, config: &CampaignConfig) -> Dataset {
        let cdims = &config.space.constrained_dims;
        let mut data = Dataset::empty();
        for b in &self.batches {
            let xc = cdims.iter().map(|&i| b.unit_points[0][i]).collect();
            let best = b.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            data.push(xc, best);
        }
        data
    }
}

/// Hyperparameter refit warm-started from `previous`, then conditioning.
fn refit(
    data: &Dataset,
    previous: Option<KernelSpec>,
    config: &CampaignConfig,
    streams: Streams,
    purpose: Purpose,
) -> Result<GpPosterior> {
    let s = data.output_scale_hint();
    let mut start = previous.unwrap_or_else(|| {
        KernelSpec::new(config.model.kernel, s, config.model.initial_length_scale, FIXED_NOISE_FRACTION * s)
    });
    if !config.model.learn_noise {
        start.noise_variance = FIXED_NOISE_FRACTION * s;
    }
    let opts = HyperOptions {
        restarts: config.model.restarts,
        learn_noise: config.model.learn_noise,
        ..HyperOptions::default()
    };
    let tuned = optimize_hyperparams(data, &start, &opts, &mut streams.get(0, purpose));
    fit(data, &tuned.spec)
}

/// Prior kernel used before any data exists.
pub(crate) fn prior_kernel(config: &CampaignConfig) -> KernelSpec {
    KernelSpec::new(config.model.kernel, 1.0, config.model.initial_length_scale, FIXED_NOISE_FRACTION)
}

/// Iteration-0 batch. Slot `k` draws from the `(0, k, Init)` substream only,
/// so strategies of one class share their initial points for a given seed:
/// slot 0 is uniform over the box everywhere; process-constrained slots copy
/// its `x^c` and keep their own uniform `x^uc`; GP-UCB-PE and random slots
/// stay fully uniform; the hierarchical strategy grows its tree from slot 0
/// under the prior.
pub fn initial_batch(config: &CampaignConfig, seed: u64) -> Result<BatchProposal> {
    config.validate()?;
    let space = &config.space;
    let d = space.dim();
    let streams = Streams::new(seed, 0);
    let uniform = |k: usize| -> Vec<f64> {
        let mut rng = streams.get(k as u64, Purpose::Init);
        (0..d).map(|_| rng.random::<f64>()).collect()
    };
    let b = config.effective_batch_size();
    match config.strategy.kind() {
        StrategyKind::HpcTs => {
            let prior = GpPosterior::prior(&prior_kernel(config))?;
            let ctx = ProposeCtx {
                model: &prior,
                space,
                t: 0,
                f_best: 0.0,
                streams,
                budget: SearchBudget::default(),
            };
            let mut p = propose_hpc_bo_ts(&ctx, config.hierarchy.as_ref().expect("validated"), &uniform(0))?;
            p.provenance[0] = Provenance::Random;
            Ok(p)
        }
        kind => {
            let first = uniform(0);
            let mut points = vec![first.clone()];
            for k in 1..b {
                let mut x = uniform(k);
                if matches!(kind, StrategyKind::PcBasic | StrategyKind::PcNested | StrategyKind::PcTs) {
                    for &i in &space.constrained_dims {
                        x[i] = first[i];
                    }
                }
                points.push(x);
            }
            Ok(BatchProposal::from_unit(&space.bounds, points, vec![Provenance::Random; b]))
        }
    }
}
