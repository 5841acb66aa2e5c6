//! Single-step batch proposers. Models are fitted on unit-cube inputs; all
//! searching happens there and proposals carry both unit and real points.

use rand::Rng;

use super::proposal::{BatchProposal, Provenance};
use super::space::DesignSpace;
use crate::acquisition::{score, AcquisitionSpec};
use crate::error::{Error, Result};
use crate::gp::{GpPosterior, GridSampler};
use crate::inner_opt::{direct_maximize, grid_argmax, unit_grid_capped, Bounds};
use crate::rng::{substream, Purpose, StreamRng};

/// Largest Thompson grid. The sampler factors a dense matrix of this order.
pub const MAX_TS_GRID_POINTS: usize = 4096;

/// Fallback-stream slot used by the outer search of the nested strategy.
pub(crate) const OUTER_SLOT: u64 = u64::MAX;

/// Substream factory for one iteration of one campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Streams {
    pub master: u64,
    pub iteration: u64,
}

impl Streams {
    pub fn new(master: u64, iteration: u64) -> Self {
        Self { master, iteration }
    }

    pub fn get(&self, slot: u64, purpose: Purpose) -> StreamRng {
        substream(self.master, self.iteration, slot, purpose)
    }
}

/// Inner-search budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub direct_evals: usize,
    pub fallback_probes: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            direct_evals: crate::inner_opt::DEFAULT_DIRECT_EVALS,
            fallback_probes: 1000,
        }
    }
}

/// Shared inputs of the model-based proposers.
#[derive(Debug, Clone, Copy)]
pub struct ProposeCtx<'a> {
    /// GP fitted on unit-cube inputs of `space.bounds`.
    pub model: &'a GpPosterior,
    pub space: &'a DesignSpace,
    /// Iteration index, at least 1 for the β schedule.
    pub t: usize,
    /// Best observed value, for EI.
    pub f_best: f64,
    pub streams: Streams,
    pub budget: SearchBudget,
}

fn inject(template: &[f64], free: &[usize], u: &[f64]) -> Vec<f64> {
    let mut x = template.to_vec();
    for (k, &i) in free.iter().enumerate() {
        x[i] = u[k];
    }
    x
}

/// Maximizes `f` over the `free` coordinates of the unit cube with the
/// remaining coordinates taken from `template`.
///
/// DIRECT runs first. If it errors or returns the box center, uniform probes
/// from the `(slot, Fallback)` substream are tried and the best one replaces
/// the DIRECT point when it is strictly better.
pub(crate) fn maximize_free(
    f: &dyn Fn(&[f64]) -> f64,
    template: &[f64],
    free: &[usize],
    budget: SearchBudget,
    streams: Streams,
    slot: u64,
) -> Result<(Vec<f64>, f64)> {
    let sub = Bounds::unit(free.len());
    let direct = direct_maximize(|u| f(&inject(template, free, u)), &sub, budget.direct_evals);
    let center = sub.center();
    let needs_probe = match &direct {
        Ok((u, _)) => *u == center,
        Err(e) => {
            log::debug!("DIRECT failed, probing uniformly: {e}");
            true
        }
    };
    if !needs_probe {
        let (u, v) = direct?;
        return Ok((inject(template, free, &u), v));
    }
    let mut rng = streams.get(slot, Purpose::Fallback);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..budget.fallback_probes {
        let u: Vec<f64> = (0..free.len()).map(|_| rng.random::<f64>()).collect();
        let v = f(&inject(template, free, &u));
        if v.is_finite() && best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((u, v));
        }
    }
    match (direct, best) {
        (Ok((u, v)), Some((pu, pv))) => {
            if pv > v {
                Ok((inject(template, free, &pu), pv))
            } else {
                Ok((inject(template, free, &u), v))
            }
        }
        (Ok((u, v)), None) => Ok((inject(template, free, &u), v)),
        (Err(_), Some((pu, pv))) => Ok((inject(template, free, &pu), pv)),
        (Err(e), None) => Err(e),
    }
}

fn acquisition_tag(acq: &AcquisitionSpec) -> Provenance {
    match acq {
        AcquisitionSpec::Ei { .. } => Provenance::Ei,
        _ => Provenance::Ucb,
    }
}

fn all_dims(d: usize) -> Vec<usize> {
    (0..d).collect()
}

/// Maximizes `acq` over the free coordinates (unit cube).
pub(crate) fn maximize_acquisition(
    ctx: &ProposeCtx<'_>,
    model: &GpPosterior,
    acq: &AcquisitionSpec,
    template: &[f64],
    free: &[usize],
    slot: u64,
) -> Result<Vec<f64>> {
    let f = |x: &[f64]| score(model, acq, x, ctx.t, ctx.f_best).unwrap_or(f64::NAN);
    Ok(maximize_free(&f, template, free, ctx.budget, ctx.streams, slot)?.0)
}

/// Appends points maximizing the posterior variance conditioned on every
/// point chosen so far, searching over `free` with the rest taken from the
/// first point.
fn fill_by_variance(
    ctx: &ProposeCtx<'_>,
    points: &mut Vec<Vec<f64>>,
    tags: &mut Vec<Provenance>,
    batch: usize,
    free: &[usize],
) -> Result<()> {
    while points.len() < batch {
        let slot = points.len() as u64;
        let conditioned = ctx.model.with_hallucinated(points)?;
        let f = |x: &[f64]| conditioned.predict(x).map(|(_, v)| v).unwrap_or(f64::NAN);
        let template = points[0].clone();
        let (x, _) = maximize_free(&f, &template, free, ctx.budget, ctx.streams, slot)?;
        points.push(x);
        tags.push(Provenance::PureExploration);
    }
    Ok(())
}

fn require_batch(b: usize) -> Result<()> {
    if b == 0 {
        return Err(Error::input("batch size must be at least 1"));
    }
    Ok(())
}

/// `b` independent uniform points. Constraints are deliberately ignored.
pub fn propose_random<R: Rng + ?Sized>(space: &DesignSpace, b: usize, rng: &mut R) -> Result<BatchProposal> {
    require_batch(b)?;
    let d = space.dim();
    let unit: Vec<Vec<f64>> = (0..b).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect();
    Ok(BatchProposal::from_unit(&space.bounds, unit, vec![Provenance::Random; b]))
}

/// One point maximizing `acq` over the whole box.
pub fn propose_sequential(ctx: &ProposeCtx<'_>, acq: &AcquisitionSpec) -> Result<BatchProposal> {
    let d = ctx.space.dim();
    let x = maximize_acquisition(ctx, ctx.model, acq, &vec![0.5; d], &all_dims(d), 0)?;
    Ok(BatchProposal::from_unit(&ctx.space.bounds, vec![x], vec![acquisition_tag(acq)]))
}

/// Acquisition argmax followed by `b - 1` hallucinated-variance maximizers
/// over the whole box.
pub fn propose_gp_ucb_pe(ctx: &ProposeCtx<'_>, b: usize, acq: &AcquisitionSpec) -> Result<BatchProposal> {
    require_batch(b)?;
    let d = ctx.space.dim();
    let free = all_dims(d);
    let first = maximize_acquisition(ctx, ctx.model, acq, &vec![0.5; d], &free, 0)?;
    let mut points = vec![first];
    let mut tags = vec![acquisition_tag(acq)];
    fill_by_variance(ctx, &mut points, &mut tags, b, &free)?;
    Ok(BatchProposal::from_unit(&ctx.space.bounds, points, tags))
}

/// Like [`propose_gp_ucb_pe`], but the variance steps only move the
/// unconstrained coordinates.
pub fn propose_pc_basic(ctx: &ProposeCtx<'_>, b: usize, acq: &AcquisitionSpec) -> Result<BatchProposal> {
    require_batch(b)?;
    ctx.space.require_split()?;
    let d = ctx.space.dim();
    let first = maximize_acquisition(ctx, ctx.model, acq, &vec![0.5; d], &all_dims(d), 0)?;
    let mut points = vec![first];
    let mut tags = vec![acquisition_tag(acq)];
    fill_by_variance(ctx, &mut points, &mut tags, b, &ctx.space.unconstrained_dims())?;
    Ok(BatchProposal::from_unit(&ctx.space.bounds, points, tags))
}

/// Two-stage proposal: `outer` (fitted on constrained coordinates only)
/// picks `x^c`; the inner model then picks point 0's free coordinates and
/// the variance steps fill the batch.
pub fn propose_pc_nested(
    ctx: &ProposeCtx<'_>,
    outer: &GpPosterior,
    b: usize,
    acq: &AcquisitionSpec,
) -> Result<BatchProposal> {
    require_batch(b)?;
    ctx.space.require_split()?;
    let cdims = &ctx.space.constrained_dims;
    let c = cdims.len();
    let outer_best = outer.data().outputs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let outer_ctx = ProposeCtx {
        model: outer,
        f_best: if outer_best.is_finite() { outer_best } else { ctx.f_best },
        ..*ctx
    };
    let xc = maximize_acquisition(&outer_ctx, outer, acq, &vec![0.5; c], &all_dims(c), OUTER_SLOT)?;

    let d = ctx.space.dim();
    let mut template = vec![0.5; d];
    for (k, &i) in cdims.iter().enumerate() {
        template[i] = xc[k];
    }
    let free = ctx.space.unconstrained_dims();
    let first = maximize_acquisition(ctx, ctx.model, acq, &template, &free, 0)?;
    let mut points = vec![first];
    let mut tags = vec![acquisition_tag(acq)];
    fill_by_variance(ctx, &mut points, &mut tags, b, &free)?;
    Ok(BatchProposal::from_unit(&ctx.space.bounds, points, tags))
}

/// Grid over the `free` coordinates of the unit cube with the remaining
/// coordinates copied from `template`.
pub(crate) fn slice_grid(template: &[f64], free: &[usize], per_dim: usize) -> Result<Vec<Vec<f64>>> {
    let grid = unit_grid_capped(&Bounds::unit(free.len()), per_dim, MAX_TS_GRID_POINTS).map_err(|e| match e {
        Error::Capacity(m) => Error::Capacity(format!("{m} (lower ts_grid_per_dim)")),
        other => other,
    })?;
    Ok(grid.iter().map(|u| inject(template, free, u)).collect())
}

/// Draws one posterior sample on `grid` from the `(slot, Thompson)` stream
/// and returns its argmax.
pub(crate) fn thompson_argmax(
    sampler: &GridSampler,
    grid: &[Vec<f64>],
    streams: Streams,
    slot: u64,
) -> Result<Vec<f64>> {
    let draw = sampler.draw(&mut streams.get(slot, Purpose::Thompson));
    Ok(grid_argmax(&draw, grid)?.1)
}

/// Acquisition argmax for point 0; every further point keeps its `x^c` and
/// takes the argmax of an independent posterior draw over the free grid.
pub fn propose_pc_bo_ts(ctx: &ProposeCtx<'_>, b: usize, acq: &AcquisitionSpec) -> Result<BatchProposal> {
    require_batch(b)?;
    ctx.space.require_split()?;
    let d = ctx.space.dim();
    let first = maximize_acquisition(ctx, ctx.model, acq, &vec![0.5; d], &all_dims(d), 0)?;
    let mut points = vec![first];
    let mut tags = vec![acquisition_tag(acq)];
    if b > 1 {
        let grid = slice_grid(&points[0], &ctx.space.unconstrained_dims(), ctx.space.ts_grid_per_dim)?;
        let sampler = GridSampler::new(ctx.model, &grid)?;
        for k in 1..b {
            points.push(thompson_argmax(&sampler, &grid, ctx.streams, k as u64)?);
            tags.push(Provenance::Ts);
        }
    }
    Ok(BatchProposal::from_unit(&ctx.space.bounds, points, tags))
}
