use rand::Rng;
use rand_distr::StandardNormal;

use super::propose::maximize_free;
use super::*;
use crate::acquisition::{score, AcquisitionSpec};
use crate::gp::{fit, Dataset, GpPosterior, KernelKind, KernelSpec};
use crate::inner_opt::{direct_maximize, unit_grid, Bounds};
use crate::rng::{seeded, substream, Purpose};

fn prior(ls: f64) -> GpPosterior {
    GpPosterior::prior(&KernelSpec::new(KernelKind::Matern25, 1.0, ls, 0.0)).unwrap()
}

fn ctx<'a>(model: &'a GpPosterior, space: &'a DesignSpace, t: usize) -> ProposeCtx<'a> {
    ProposeCtx {
        model,
        space,
        t,
        f_best: 0.0,
        streams: Streams::new(7, t as u64),
        budget: SearchBudget::default(),
    }
}

fn toy_model() -> GpPosterior {
    let data = Dataset::new(
        vec![vec![0.1, 0.2], vec![0.7, 0.9], vec![0.4, 0.5], vec![0.9, 0.1]],
        vec![0.3, 1.2, 0.8, -0.2],
    )
    .unwrap();
    fit(&data, &KernelSpec::new(KernelKind::Matern25, 1.0, 0.3, 1e-6)).unwrap()
}

const UCB: AcquisitionSpec = AcquisitionSpec::Ucb { beta: 2.0 };

#[test]
fn random_batches() {
    let space = DesignSpace::new(Bounds::unit(2), vec![0]).unwrap();
    let p = propose_random(&space, 1, &mut seeded(1)).unwrap();
    assert_eq!(p.len(), 1);
    assert!(space.bounds.contains(&p.points[0]));
    assert_eq!(p, propose_random(&space, 1, &mut seeded(1)).unwrap());

    let p = propose_random(&space, 10_000, &mut seeded(2)).unwrap();
    for i in 0..2 {
        let mean = p.points.iter().map(|x| x[i]).sum::<f64>() / 1e4;
        assert!((mean - 0.5).abs() < 0.02, "{mean}");
    }
    assert!(propose_random(&space, 0, &mut seeded(1)).is_err());
}

#[test]
fn sequential_on_constant_surface_is_center() {
    let m = prior(0.3);
    let space = DesignSpace::new(Bounds::new(vec![-1.0, 2.0], vec![1.0, 4.0]).unwrap(), vec![]).unwrap();
    let p = propose_sequential(&ctx(&m, &space, 1), &UCB).unwrap();
    assert_eq!(p.points, vec![vec![0.0, 3.0]]);
    assert_eq!(p.provenance, vec![Provenance::Ucb]);
}

#[test]
fn sequential_ei_avoids_observed_point() {
    let data = Dataset::new(vec![vec![0.5]], vec![1.0]).unwrap();
    let m = fit(&data, &KernelSpec::new(KernelKind::Matern25, 1.0, 0.05, 0.0)).unwrap();
    let space = DesignSpace::new(Bounds::unit(1), vec![]).unwrap();
    let mut c = ctx(&m, &space, 1);
    c.f_best = 1.0;
    let p = propose_sequential(&c, &AcquisitionSpec::Ei { xi: 0.0 }).unwrap();
    assert!((p.points[0][0] - 0.5).abs() > 1e-3);
}

#[test]
fn sequential_matches_compositional_trace() {
    let data = Dataset::new(vec![vec![0.1], vec![0.45], vec![0.8]], vec![0.2, 0.9, 0.4]).unwrap();
    let m = fit(&data, &KernelSpec::new(KernelKind::Rbf, 1.0, 0.2, 1e-6)).unwrap();
    let space = DesignSpace::new(Bounds::unit(1), vec![]).unwrap();
    let mut c = ctx(&m, &space, 3);
    c.f_best = 0.9;
    let acq = AcquisitionSpec::GpUcb { delta: 0.1 };
    let p = propose_sequential(&c, &acq).unwrap();
    let (x, _) = direct_maximize(|x| score(&m, &acq, x, 3, 0.9).unwrap(), &Bounds::unit(1), 500).unwrap();
    assert_eq!(p.unit_points[0], x);
}

#[test]
fn gp_ucb_pe_rules() {
    let m = toy_model();
    let space = DesignSpace::new(Bounds::unit(2), vec![]).unwrap();
    let acq = AcquisitionSpec::GpUcb { delta: 0.1 };
    let one = propose_gp_ucb_pe(&ctx(&m, &space, 2), 1, &acq).unwrap();
    let seq = propose_sequential(&ctx(&m, &space, 2), &acq).unwrap();
    assert_eq!(one.points, seq.points);

    let four = propose_gp_ucb_pe(&ctx(&m, &space, 2), 4, &acq).unwrap();
    assert_eq!(four.provenance[1..], [Provenance::PureExploration; 3]);
    for i in 0..4 {
        for j in i + 1..4 {
            assert_ne!(four.points[i], four.points[j]);
        }
    }
}

#[test]
fn gp_ucb_pe_second_point_goes_to_boundary() {
    let m = prior(0.3);
    let space = DesignSpace::new(Bounds::unit(1), vec![]).unwrap();
    let p = propose_gp_ucb_pe(&ctx(&m, &space, 1), 2, &UCB).unwrap();
    assert_eq!(p.points[0], vec![0.5]);
    let b = p.points[1][0];
    assert!(b.min(1.0 - b) < 1e-3, "{b}");
}

#[test]
fn pc_basic_toy() {
    let m = prior(0.3);
    let space = DesignSpace::new(Bounds::unit(2), vec![0]).unwrap();
    let p = propose_pc_basic(&ctx(&m, &space, 1), 2, &UCB).unwrap();
    assert_eq!(p.points[0], vec![0.5, 0.5]);
    assert_eq!(p.points[1][0], 0.5);
    let b = p.points[1][1];
    assert!(b.min(1.0 - b) < 1e-3, "{b}");

    let m = toy_model();
    let p = propose_pc_basic(&ctx(&m, &space, 3), 4, &AcquisitionSpec::GpUcb { delta: 0.1 }).unwrap();
    assert!(p.shares_dims(&[0]));
    let one = propose_pc_basic(&ctx(&m, &space, 3), 1, &AcquisitionSpec::GpUcb { delta: 0.1 }).unwrap();
    assert_eq!(one.points[0], p.points[0]);
}

#[test]
fn pc_nested_follows_outer_peak() {
    let c_star = 0.3;
    let outer_data = Dataset::new(
        vec![vec![0.05], vec![0.2], vec![c_star], vec![0.45], vec![0.7], vec![0.95]],
        vec![0.0, 0.0, 10.0, 0.0, 0.0, 0.0],
    )
    .unwrap();
    let outer = fit(&outer_data, &KernelSpec::new(KernelKind::Matern25, 1.0, 0.05, 1e-8)).unwrap();
    let m = toy_model();
    let space = DesignSpace::new(Bounds::unit(2), vec![1]).unwrap();
    let p = propose_pc_nested(&ctx(&m, &space, 2), &outer, 3, &UCB).unwrap();
    assert!(p.shares_dims(&[1]));
    assert!((p.points[0][1] - c_star).abs() < 0.01, "{:?}", p.points[0]);
    let one = propose_pc_nested(&ctx(&m, &space, 2), &outer, 1, &UCB).unwrap();
    assert_eq!(one.points[0], p.points[0]);
}

/// Dense Cholesky written independently of the library routine.
fn chol(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                l[i][j] = (a[i][i] - s).max(0.0).sqrt();
            } else {
                l[i][j] = if l[j][j] > 0.0 { (a[i][j] - s) / l[j][j] } else { 0.0 };
            }
        }
    }
    l
}

#[test]
fn pc_ts_replays_documented_draws() {
    let spec = KernelSpec::new(KernelKind::Matern25, 1.0, 0.3, 0.0);
    let m = GpPosterior::prior(&spec).unwrap();
    let space = DesignSpace::new(Bounds::unit(2), vec![0]).unwrap();
    let c = ctx(&m, &space, 1);
    let p = propose_pc_bo_ts(&c, 4, &UCB).unwrap();
    assert!(p.shares_dims(&[0]));
    assert_eq!(&p.provenance[1..], &[Provenance::Ts; 3]);

    let xc = p.points[0][0];
    let grid: Vec<f64> = unit_grid(&Bounds::unit(1), 10).unwrap().into_iter().map(|g| g[0]).collect();
    let cov: Vec<Vec<f64>> = grid
        .iter()
        .map(|a| grid.iter().map(|b| crate::gp::kernel_eval(&spec, &[xc, *a], &[xc, *b]).unwrap()).collect())
        .collect();
    let l = chol(&cov);
    for k in 1..4u64 {
        let mut rng = substream(7, 1, k, Purpose::Thompson);
        let z: Vec<f64> = (0..10).map(|_| rng.sample(StandardNormal)).collect();
        let f: Vec<f64> = (0..10).map(|i| (0..=i).map(|j| l[i][j] * z[j]).sum()).collect();
        let best = (0..10).fold(0, |b, i| if f[i] > f[b] { i } else { b });
        assert_eq!(p.points[k as usize], vec![xc, grid[best]]);
    }
}

#[test]
fn pc_ts_capacity_error() {
    let m = prior(0.3);
    let space = DesignSpace::new(Bounds::unit(7), vec![0]).unwrap().with_ts_grid(10).unwrap();
    let e = propose_pc_bo_ts(&ctx(&m, &space, 1), 2, &UCB).unwrap_err();
    assert!(matches!(e, crate::Error::Capacity(ref s) if s.contains("ts_grid_per_dim")), "{e}");
}

#[test]
fn hpc_tree_shape() {
    let m = toy_model();
    let space = DesignSpace::new(Bounds::unit(3), vec![0]).unwrap();
    let data = Dataset::new(
        vec![vec![0.1, 0.2, 0.3], vec![0.7, 0.9, 0.5], vec![0.4, 0.5, 0.9]],
        vec![0.3, 1.2, 0.8],
    )
    .unwrap();
    let model = fit(&data, m.kernel()).unwrap();
    let h = HierarchySpec::new(vec![vec![0], vec![1], vec![2]], vec![1, 2, 4]).unwrap();
    let x_ucb = vec![0.3, 0.6, 0.2];
    let p = propose_hpc_bo_ts(&ctx(&model, &space, 1), &h, &x_ucb).unwrap();
    assert_eq!(p.len(), 8);
    assert_eq!(p.unit_points[0], x_ucb);
    // Every leaf shares level 0; leaves 0..4 descend from x_ucb at level 1.
    assert!(p.unit_points.iter().all(|x| x[0] == x_ucb[0]));
    assert!(p.unit_points[..4].iter().all(|x| x[1] == x_ucb[1]));
    assert!(p.unit_points[4..].iter().all(|x| x[1] == p.unit_points[4][1]));
    assert!(propose_hpc_bo_ts(&ctx(&model, &space, 1), &h, &[0.5]).is_err());
}

#[test]
fn two_level_hpc_matches_pc_ts() {
    let m = toy_model();
    let space = DesignSpace::new(Bounds::unit(2), vec![0]).unwrap();
    let c = ctx(&m, &space, 2);
    let ts = propose_pc_bo_ts(&c, 4, &UCB).unwrap();
    let h = HierarchySpec::new(vec![vec![0], vec![1]], vec![1, 4]).unwrap();
    let tree = propose_hpc_bo_ts(&c, &h, &ts.unit_points[0]).unwrap();
    assert_eq!(tree.unit_points, ts.unit_points);
}

#[test]
fn fallback_keeps_a_true_center_maximum() {
    let f = |x: &[f64]| -(x[0] - 0.5).powi(2);
    let b = SearchBudget::default();
    let (x, _) = maximize_free(&f, &[0.5], &[0], b, Streams::new(0, 1), 0).unwrap();
    assert_eq!(x, vec![0.5]);
}

#[test]
fn fallback_replaces_failed_direct() {
    let f = |x: &[f64]| if x[0] == 0.5 { f64::NAN } else { x[0] };
    let b = SearchBudget::default();
    let (x, v) = maximize_free(&f, &[0.0], &[0], b, Streams::new(0, 1), 0).unwrap();
    assert!(v > 0.99 && x[0] == v);
}

fn gmm_config(strategy: StrategyName, b: usize) -> (CampaignConfig, crate::objectives::Objective) {
    let obj = crate::objectives::Objective::gmm_case(1, 0).unwrap();
    let space = DesignSpace::new(obj.bounds().clone(), vec![0]).unwrap();
    (CampaignConfig::new(strategy, space, b), obj)
}

#[test]
fn campaign_counts_and_determinism() {
    let (cfg, obj) = gmm_config(StrategyName::PcTsUcb, 4);
    let h = run_campaign(&cfg, &obj, 1, 3).unwrap();
    assert_eq!(h.iterations.len(), 2);
    assert_eq!(h.evaluations().count(), 8);
    assert!(h.failure.is_none());
    let again = run_campaign(&cfg, &obj, 1, 3).unwrap();
    assert_eq!(h, again);
    let best = h.evaluations().map(|(_, y)| y).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(h.best_value, Some(best));
}

#[test]
fn every_strategy_runs_and_keeps_constraints() {
    for s in StrategyName::ALL {
        let (mut cfg, obj) = gmm_config(s, 3);
        if s == StrategyName::HpcTsUcb {
            let h = HierarchySpec::new(vec![vec![0], vec![1]], vec![1, 3]).unwrap();
            cfg = CampaignConfig::hierarchical(cfg.space.clone(), h);
        }
        let h = run_campaign(&cfg, &obj, 2, 1).unwrap();
        assert!(h.failure.is_none(), "{s}: {:?}", h.failure);
        assert_eq!(h.iterations.len(), 3);
        for it in &h.iterations {
            assert_eq!(it.values.len(), cfg.effective_batch_size());
            if s.is_process_constrained() || s == StrategyName::HpcTsUcb {
                assert!(it.proposal.shares_dims(&[0]), "{s} at t={}", it.t);
            }
        }
    }
}

#[test]
fn shared_initialization_within_classes() {
    let (a, obj) = gmm_config(StrategyName::PcTsUcb, 4);
    let (b, _) = gmm_config(StrategyName::PcNestedGpucb, 4);
    let (c, _) = gmm_config(StrategyName::GpUcbPe, 4);
    let ia = initial_batch(&a, 9).unwrap();
    assert_eq!(ia, initial_batch(&b, 9).unwrap());
    let ic = initial_batch(&c, 9).unwrap();
    assert_eq!(ia.points[0], ic.points[0]);
    assert!(ia.shares_dims(&[0]));
    assert_ne!(ic.points[1][0], ic.points[0][0]);
    assert!(run_campaign(&a, &obj, 0, 0).is_err());
}

#[test]
fn random_never_beats_rosenbrock_maximum() {
    let obj = crate::objectives::Objective::synthetic("rosenbrock3").unwrap();
    let space = DesignSpace::new(obj.bounds().clone(), vec![0]).unwrap();
    let cfg = CampaignConfig::new(StrategyName::Random, space, 4);
    for seed in 0..3 {
        let h = run_campaign(&cfg, &obj, 75, seed).unwrap();
        assert!(h.best_value.unwrap() <= 7218.0);
        assert_eq!(h.iterations.len(), 76);
    }
}

#[test]
fn non_finite_objective_aborts_with_partial_history() {
    let obj = crate::objectives::Objective::from_fn("spike", Bounds::unit(2), 1.0, |x| {
        if x[0] > 0.0 { f64::NAN } else { 0.0 }
    })
    .unwrap();
    let space = DesignSpace::new(Bounds::unit(2), vec![0]).unwrap();
    let cfg = CampaignConfig::new(StrategyName::Random, space, 2);
    let h = run_campaign(&cfg, &obj, 3, 0).unwrap();
    assert!(h.iterations.is_empty());
    assert!(h.failure.as_deref().unwrap().contains("non-finite"), "{:?}", h.failure);
}

#[test]
fn engine_sequencing() {
    let (cfg, _) = gmm_config(StrategyName::PcTsUcb, 2);
    let mut state = EngineState::default();
    assert!(state.observe(&[1.0, 2.0]).is_err());
    state.suggest(&cfg, 0).unwrap();
    assert!(matches!(state.suggest(&cfg, 0), Err(crate::Error::Sequencing(_))));
    let e = state.observe(&[1.0, f64::NAN]).unwrap_err();
    assert!(e.to_string().contains("slot 1"), "{e}");
    assert!(state.observe(&[1.0]).is_err());
    state.observe(&[1.0, 2.0]).unwrap();
    assert_eq!(state.t, 1);
}
