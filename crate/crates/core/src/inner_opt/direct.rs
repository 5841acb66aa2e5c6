//! DIRECT (dividing rectangles) global maximization.
//!
//! Jones-style DIRECT on the unit cube: every potentially optimal rectangle
//! is trisected along all of its longest sides, the best side first. Ties
//! are broken lexicographically on (diameter, value, insertion order), so
//! the search is deterministic for a deterministic objective.

use super::Bounds;
use crate::error::{Error, Result};

pub const DEFAULT_DIRECT_EVALS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectOptions {
    pub max_evals: usize,
    /// Potential-optimality slack.
    pub epsilon: f64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self {
            max_evals: DEFAULT_DIRECT_EVALS,
            epsilon: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

struct Rect {
    center: Vec<f64>,
    levels: Vec<u32>,
    /// Negated objective (DIRECT minimizes internally).
    cost: f64,
    diameter: f64,
}

fn diameter(levels: &[u32]) -> f64 {
    let mut sorted = levels.to_vec();
    sorted.sort_unstable();
    0.5 * sorted.iter().map(|&k| 9f64.powi(-(k as i32))).sum::<f64>().sqrt()
}

struct Search<'a, F> {
    f: F,
    bounds: &'a Bounds,
    evals: usize,
    max_evals: usize,
    best: Option<(Vec<f64>, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Search<'_, F> {
    /// Evaluates at unit coordinates `u`; `None` once the budget is spent.
    fn eval(&mut self, u: &[f64]) -> Option<Result<f64>> {
        if self.evals >= self.max_evals {
            return None;
        }
        self.evals += 1;
        let x = self.bounds.from_unit(u);
        let v = (self.f)(&x);
        if !v.is_finite() {
            return Some(Err(Error::NonFinite { point: x, value: v }));
        }
        if self.best.as_ref().is_none_or(|(_, b)| v > *b) {
            self.best = Some((x, v));
        }
        Some(Ok(-v))
    }
}

/// Maximizes `f` over `bounds` with at most `max_evals` evaluations.
/// The first evaluation is always the box center.
pub fn direct_maximize<F>(f: F, bounds: &Bounds, max_evals: usize) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(&[f64]) -> f64,
{
    let r = direct_maximize_with(
        f,
        bounds,
        &DirectOptions {
            max_evals,
            ..DirectOptions::default()
        },
    )?;
    Ok((r.point, r.value))
}

pub fn direct_maximize_with<F>(f: F, bounds: &Bounds, opts: &DirectOptions) -> Result<DirectResult>
where
    F: FnMut(&[f64]) -> f64,
{
    bounds.validate()?;
    if opts.max_evals == 0 {
        return Err(Error::input("DIRECT needs max_evals >= 1"));
    }
    let d = bounds.dim();
    let mut s = Search {
        f,
        bounds,
        evals: 0,
        max_evals: opts.max_evals,
        best: None,
    };
    let center = vec![0.5; d];
    let cost = s.eval(&center).expect("budget >= 1")?;
    let levels = vec![0u32; d];
    let mut rects = vec![Rect {
        diameter: diameter(&levels),
        center,
        levels,
        cost,
    }];

    'outer: while s.evals < s.max_evals {
        for idx in potentially_optimal(&rects, opts.epsilon) {
            let parent_levels = rects[idx].levels.clone();
            let parent_center = rects[idx].center.clone();
            let kmin = *parent_levels.iter().min().expect("d >= 1");
            let delta = 3f64.powi(-(kmin as i32 + 1));
            let long_dims: Vec<usize> = (0..d).filter(|&i| parent_levels[i] == kmin).collect();

            // Sample both neighbours along every longest side.
            let mut samples = Vec::with_capacity(long_dims.len());
            for &i in &long_dims {
                let mut lo = parent_center.clone();
                lo[i] -= delta;
                let mut hi = parent_center.clone();
                hi[i] += delta;
                let Some(c_lo) = s.eval(&lo) else { break 'outer };
                let c_lo = c_lo?;
                let Some(c_hi) = s.eval(&hi) else { break 'outer };
                let c_hi = c_hi?;
                samples.push((i, lo, c_lo, hi, c_hi));
            }
            // Split the best side first so its children keep the largest boxes.
            samples.sort_by(|a, b| a.2.min(a.4).total_cmp(&b.2.min(b.4)).then(a.0.cmp(&b.0)));
            let mut levels = parent_levels;
            for (i, lo, c_lo, hi, c_hi) in samples {
                levels[i] += 1;
                let dia = diameter(&levels);
                rects.push(Rect {
                    center: lo,
                    levels: levels.clone(),
                    cost: c_lo,
                    diameter: dia,
                });
                rects.push(Rect {
                    center: hi,
                    levels: levels.clone(),
                    cost: c_hi,
                    diameter: dia,
                });
            }
            rects[idx].diameter = diameter(&levels);
            rects[idx].levels = levels;
        }
    }

    let (point, value) = s.best.expect("at least one evaluation");
    Ok(DirectResult {
        point,
        value,
        evals: s.evals,
    })
}

/// Indices of potentially optimal rectangles, ordered by diameter.
fn potentially_optimal(rects: &[Rect], epsilon: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by(|&a, &b| {
        rects[a]
            .diameter
            .total_cmp(&rects[b].diameter)
            .then(rects[a].cost.total_cmp(&rects[b].cost))
            .then(a.cmp(&b))
    });
    // Best rectangle of each diameter class.
    let mut groups: Vec<usize> = Vec::new();
    for &i in &order {
        match groups.last() {
            Some(&g) if rects[g].diameter == rects[i].diameter => {}
            _ => groups.push(i),
        }
    }
    let f_min = rects.iter().map(|r| r.cost).fold(f64::INFINITY, f64::min);
    let mut out = Vec::new();
    for (j, &gj) in groups.iter().enumerate() {
        let (dj, fj) = (rects[gj].diameter, rects[gj].cost);
        let lower = groups[..j]
            .iter()
            .map(|&gi| (fj - rects[gi].cost) / (dj - rects[gi].diameter))
            .fold(f64::NEG_INFINITY, f64::max);
        let upper = groups[j + 1..]
            .iter()
            .map(|&gi| (rects[gi].cost - fj) / (rects[gi].diameter - dj))
            .fold(f64::INFINITY, f64::min);
        if upper.is_infinite() {
            out.push(gj);
            continue;
        }
        if upper <= 0.0 || lower > upper {
            continue;
        }
        let slack = (fj - f_min + epsilon * f_min.abs()) / dj;
        if slack <= upper {
            out.push(gj);
        }
    }
    out
}
