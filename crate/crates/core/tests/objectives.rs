//! Objective values against independent computations.

use std::path::Path;

use pcbo::objectives::{
    eval_synthetic, gmm_eval, gmm_generate, read_yield_table, realistic_bounds, GmmObjective, Objective,
};
use pcbo::rng::seeded;

fn table() -> Vec<(Vec<f64>, f64)> {
    read_yield_table(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/yield_standin.csv")).unwrap()
}

/// Generator behind the stand-in table.
fn standin(x: &[f64]) -> f64 {
    20.0 + 60.0 * (-((x[0] - 31.0) / 9.0).powi(2) - ((x[1] - 567.0) / 14.0).powi(2)).exp()
}

#[test]
fn gmm_integrates_to_one() {
    for case in 1..=4 {
        let model = gmm_generate(case, &mut seeded(case as u64)).unwrap();
        // Midpoint rule on [-15, 15]^2; every mean lies in [-3, 3]^2.
        let n = 1200;
        let h = 30.0 / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = [-15.0 + (i as f64 + 0.5) * h, -15.0 + (j as f64 + 0.5) * h];
                total += gmm_eval(&model, &x);
            }
        }
        let mass = total * h * h;
        assert!((mass - 1.0).abs() < 1e-6, "case {case}: {mass}");
    }
}

#[test]
fn gmm_density_matches_hand_formula() {
    let model = GmmObjective {
        weights: vec![0.25, 0.75],
        means: vec![[0.0, 0.0], [1.0, -1.0]],
        covariances: vec![[[1.0, 0.0], [0.0, 1.0]], [[2.0, 0.5], [0.5, 1.0]]],
    };
    let x = [0.3f64, -0.2];
    let g1 = (-(0.09f64 + 0.04) / 2.0).exp() / (2.0 * std::f64::consts::PI);
    // Inverse of [[2, .5], [.5, 1]] is [[1, -.5], [-.5, 2]] / 1.75.
    let (dx, dy) = (x[0] - 1.0, x[1] + 1.0);
    let q = (dx * dx - dx * dy + 2.0 * dy * dy) / 1.75;
    let g2 = (-q / 2.0).exp() / (2.0 * std::f64::consts::PI * 1.75f64.sqrt());
    let expect = 0.25 * g1 + 0.75 * g2;
    assert!((gmm_eval(&model, &x) - expect).abs() < 1e-15);
}

#[test]
fn gmm_case2_optimum_matches_grid_search() {
    let obj = Objective::gmm_case(2, 7).unwrap();
    let model = obj.gmm_model().unwrap();
    let b = obj.bounds();
    let f = |x: &[f64]| gmm_eval(model, x);
    let n = 401;
    let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
    for i in 0..n {
        for j in 0..n {
            let x = [
                b.lower[0] + (b.upper[0] - b.lower[0]) * i as f64 / (n - 1) as f64,
                b.lower[1] + (b.upper[1] - b.lower[1]) * j as f64 / (n - 1) as f64,
            ];
            let v = f(&x);
            if v > best.0 {
                best = (v, x);
            }
        }
    }
    // Zoom: successive finer grids around the incumbent.
    let mut half = (b.upper[0] - b.lower[0]) / (n - 1) as f64;
    for _ in 0..12 {
        let c = best.1;
        for i in 0..=40 {
            for j in 0..=40 {
                let x = [
                    (c[0] - half + 2.0 * half * i as f64 / 40.0).clamp(b.lower[0], b.upper[0]),
                    (c[1] - half + 2.0 * half * j as f64 / 40.0).clamp(b.lower[1], b.upper[1]),
                ];
                let v = f(&x);
                if v > best.0 {
                    best = (v, x);
                }
            }
        }
        half /= 10.0;
    }
    let rel = (obj.f_star() - best.0).abs() / best.0;
    assert!(rel <= 1e-6, "f_star {} vs grid {}", obj.f_star(), best.0);
}

#[test]
fn synthetic_values_are_deterministic_and_checked() {
    assert_eq!(eval_synthetic("levy6", &[1.0; 6]).unwrap(), eval_synthetic("levy6", &[1.0; 6]).unwrap());
    assert!(eval_synthetic("levy6", &[1.0; 5]).is_err());
    assert!(eval_synthetic("rosenbrock3", &[3.0, 0.0, 0.0]).is_err());
    assert!(eval_synthetic("sphere", &[0.0]).is_err());
}

#[test]
fn yield_table_filters_mass() {
    let rows = table();
    assert_eq!(rows.len(), 99);
    assert!(rows.iter().all(|(_, y)| *y > 19.0));
}

#[test]
fn surrogate_interpolates_table() {
    let rows = table();
    let obj = Objective::surrogate(&rows).unwrap();
    let sur = obj.surrogate_model().unwrap();
    let tol = 3.0 * sur.kernel().noise_variance.sqrt();
    for (x, y) in &rows {
        let v = obj.value(x);
        assert!((v - y).abs() <= tol.max(1e-3), "{x:?}: {v} vs {y} (tol {tol})");
    }
}

#[test]
fn surrogate_optimum_near_generator() {
    let obj = Objective::surrogate(&table()).unwrap();
    assert_eq!(obj.bounds(), &realistic_bounds());
    let truth = standin(&[31.0, 567.0]);
    assert!((obj.f_star() - truth).abs() <= 0.05 * truth, "{} vs {truth}", obj.f_star());
    let x = obj.x_star().unwrap();
    assert!(obj.bounds().contains(x));
}

#[test]
fn surrogate_on_constant_table_is_flat() {
    let rows: Vec<(Vec<f64>, f64)> = (0..9)
        .map(|i| (vec![10.0 + 4.0 * (i % 3) as f64, 530.0 + 20.0 * (i / 3) as f64], 42.0))
        .collect();
    let obj = Objective::surrogate(&rows).unwrap();
    for x in [[5.0, 520.0], [27.0, 555.0], [50.0, 590.0]] {
        assert!((obj.value(&x) - 42.0).abs() < 1e-6, "{}", obj.value(&x));
    }
}

#[test]
fn surrogate_needs_enough_rows() {
    let rows = vec![(vec![10.0, 550.0], 1.0); 4];
    assert!(Objective::surrogate(&rows).is_err());
}
