use super::Bounds;
use crate::error::{Error, Result};

pub const DEFAULT_GRID_CAP: usize = 1_000_000;

/// Index, point and value of the maximum; ties go to the lowest index.
pub fn grid_argmax(values: &[f64], points: &[Vec<f64>]) -> Result<(usize, Vec<f64>, f64)> {
    if values.is_empty() {
        return Err(Error::input("grid_argmax on empty input"));
    }
    if values.len() != points.len() {
        return Err(Error::input(format!(
            "grid_argmax: {} values but {} points",
            values.len(),
            points.len()
        )));
    }
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] || values[best].is_nan() {
            best = i;
        }
    }
    Ok((best, points[best].clone(), values[best]))
}

/// Regular grid with `per_dim` points per axis, endpoints included, last
/// dimension varying fastest.
pub fn unit_grid(bounds: &Bounds, per_dim: usize) -> Result<Vec<Vec<f64>>> {
    unit_grid_capped(bounds, per_dim, DEFAULT_GRID_CAP)
}

pub fn unit_grid_capped(bounds: &Bounds, per_dim: usize, cap: usize) -> Result<Vec<Vec<f64>>> {
    if per_dim < 2 {
        return Err(Error::input(format!("grid needs at least 2 points per dimension, got {per_dim}")));
    }
    let d = bounds.dim();
    let total = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(per_dim).filter(|&t| t <= cap));
    let Some(total) = total else {
        return Err(Error::Capacity(format!(
            "{per_dim}^{d} grid points exceed the cap of {cap}; use a smaller grid resolution"
        )));
    };
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let (l, u) = (bounds.lower[k], bounds.upper[k]);
            let step = (u - l) / (per_dim - 1) as f64;
            (0..per_dim)
                .map(|i| if i == per_dim - 1 { u } else { l + i as f64 * step })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        out.push(idx.iter().enumerate().map(|(k, &i)| axes[k][i]).collect());
        for k in (0..d).rev() {
            idx[k] += 1;
            if idx[k] < per_dim {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(out)
}
