use super::proposal::{BatchProposal, Provenance};
use super::propose::{slice_grid, thompson_argmax, ProposeCtx};
use super::space::HierarchySpec;
use crate::error::{Error, Result};
use crate::gp::GridSampler;

/// Builds the hierarchical batch rooted at `x_ucb` (unit coordinates).
///
/// Level `ℓ ≥ 1` keeps `x_ucb`, adds `K_ℓ − 1` Thompson children of it and
/// `K_ℓ` children of every other parent from level `ℓ − 1`. A child copies
/// its parent's coordinates on the dimensions of levels `0..ℓ` and takes
/// the rest from the argmax of a fresh posterior draw over a grid on those
/// free dimensions. Draws use Thompson slots `1, 2, …` in construction
/// order. The returned leaves start with `x_ucb`.
pub fn propose_hpc_bo_ts(ctx: &ProposeCtx<'_>, hierarchy: &HierarchySpec, x_ucb: &[f64]) -> Result<BatchProposal> {
    let d = ctx.space.dim();
    if x_ucb.len() != d {
        return Err(Error::input(format!("x_ucb has dimension {} but the space has {d}", x_ucb.len())));
    }
    hierarchy.validate(d)?;

    let mut level: Vec<Vec<f64>> = vec![x_ucb.to_vec()];
    let mut slot = 1u64;
    for l in 1..hierarchy.levels.len() {
        let k = hierarchy.levels[l].batch_size;
        let free = hierarchy.free_dims(l);
        let mut next = Vec::with_capacity(level.len() * k);
        for (p, parent) in level.iter().enumerate() {
            // The UCB lineage keeps its own point as the first child.
            let children = if p == 0 {
                next.push(parent.clone());
                k - 1
            } else {
                k
            };
            if children == 0 {
                continue;
            }
            let grid = slice_grid(parent, &free, ctx.space.ts_grid_per_dim)?;
            let sampler = GridSampler::new(ctx.model, &grid)?;
            for _ in 0..children {
                next.push(thompson_argmax(&sampler, &grid, ctx.streams, slot)?);
                slot += 1;
            }
        }
        level = next;
    }
    let mut tags = vec![Provenance::Ts; level.len()];
    tags[0] = Provenance::Ucb;
    Ok(BatchProposal::from_unit(&ctx.space.bounds, level, tags))
}
