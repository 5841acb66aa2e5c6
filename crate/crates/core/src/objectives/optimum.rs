//! Numeric optimum search for objectives without a closed-form maximizer.

use crate::inner_opt::{unit_grid, Bounds};

/// Grid resolution per axis for the dense scan.
pub const SCAN_PER_DIM: usize = 201;
const REFINE_STARTS: usize = 5;
const MIN_STEP: f64 = 1e-10;

/// Bounded compass search from `x0` with initial step `step` (unit-cube
/// fraction of each side). Halves the step whenever no axis move improves.
pub fn refine_local(f: &dyn Fn(&[f64]) -> f64, bounds: &Bounds, x0: &[f64], step: f64) -> (Vec<f64>, f64) {
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut h = step;
    while h > MIN_STEP {
        let mut moved = false;
        for i in 0..x.len() {
            let width = bounds.upper[i] - bounds.lower[i];
            for sign in [1.0, -1.0] {
                let mut y = x.clone();
                y[i] = (y[i] + sign * h * width).clamp(bounds.lower[i], bounds.upper[i]);
                let fy = f(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    (x, fx)
}

/// Dense grid scan followed by compass refinement of the best few nodes.
pub fn scan_and_refine(f: &dyn Fn(&[f64]) -> f64, bounds: &Bounds, per_dim: usize) -> (Vec<f64>, f64) {
    let grid = unit_grid(bounds, per_dim).expect("scan grid fits the cap");
    let mut scored: Vec<(f64, usize)> = grid.iter().enumerate().map(|(i, x)| (f(x), i)).collect();
    // Highest value first, lowest index on ties.
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let step = 1.0 / (per_dim - 1) as f64;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for &(_, i) in scored.iter().take(REFINE_STARTS) {
        let (x, fx) = refine_local(f, bounds, &grid[i], step);
        if best.as_ref().is_none_or(|(_, b)| fx > *b) {
            best = Some((x, fx));
        }
    }
    best.expect("grid is non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refines_off_grid_quadratic() {
        let b = Bounds::uniform(2, -1.0, 1.0);
        let f = |x: &[f64]| -(x[0] - 0.123_456).powi(2) - 2.0 * (x[1] + 0.654_321).powi(2);
        let (x, fx) = scan_and_refine(&f, &b, 21);
        assert!((x[0] - 0.123_456).abs() < 1e-8 && (x[1] + 0.654_321).abs() < 1e-8);
        assert!(fx <= 0.0 && fx > -1e-15);
    }

    #[test]
    fn boundary_maximum_stays_in_box() {
        let b = Bounds::uniform(1, 0.0, 1.0);
        let (x, fx) = scan_and_refine(&|x: &[f64]| x[0], &b, 11);
        assert_eq!(x, vec![1.0]);
        assert_eq!(fx, 1.0);
    }
}
