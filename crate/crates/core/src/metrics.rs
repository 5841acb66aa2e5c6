//! Regret metrics, run aggregation and kernel density estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategies::CampaignHistory;

/// Floor applied before taking `log10` of a regret.
pub const REGRET_FLOOR: f64 = 1e-12;
const MIN_BANDWIDTH: f64 = 1e-3;

/// Per-iteration best-so-far record of one campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretSeries {
    pub best_value: Vec<f64>,
    pub regret: Vec<f64>,
    pub log10_regret: Vec<f64>,
}

impl RegretSeries {
    pub fn len(&self) -> usize {
        self.regret.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regret.is_empty()
    }
}

/// `1 − f_val / f_star`, clamped into `[0, 1]`.
pub fn normalized_regret(f_val: f64, f_star: f64) -> Result<f64> {
    if !(f_star > 0.0) {
        return Err(Error::input(format!("normalized regret needs f_star > 0, got {f_star}")));
    }
    Ok((1.0 - f_val / f_star).clamp(0.0, 1.0))
}

/// `log10(max(regret, 1e-12))`.
pub fn log_normalized_regret(regret: f64) -> f64 {
    regret.max(REGRET_FLOOR).log10()
}

/// `Σ |f_star − y|` over individual evaluations.
pub fn cumulative_regret(values: &[f64], f_star: f64) -> f64 {
    values.iter().map(|y| (f_star - y).abs()).sum()
}

/// Regret of the best observation up to and including each iteration.
pub fn best_so_far_series(history: &CampaignHistory, f_star: f64) -> Result<RegretSeries> {
    if history.iterations.is_empty() {
        return Err(Error::input("best-so-far series of an empty history"));
    }
    let mut best = f64::NEG_INFINITY;
    let mut out = RegretSeries {
        best_value: Vec::new(),
        regret: Vec::new(),
        log10_regret: Vec::new(),
    };
    for it in &history.iterations {
        best = it.values.iter().copied().fold(best, f64::max);
        let r = normalized_regret(best, f_star)?;
        out.best_value.push(best);
        out.regret.push(r);
        out.log10_regret.push(log_normalized_regret(r));
    }
    Ok(out)
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Element-wise median across equal-length runs.
pub fn median_series(runs: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(first) = runs.first() else {
        return Err(Error::input("median of zero runs"));
    };
    let len = first.len();
    if let Some(r) = runs.iter().find(|r| r.len() != len) {
        return Err(Error::input(format!("run lengths differ ({} vs {len})", r.len())));
    }
    Ok((0..len)
        .map(|t| {
            let mut col: Vec<f64> = runs.iter().map(|r| r[t]).collect();
            col.sort_by(f64::total_cmp);
            median(&col)
        })
        .collect())
}

/// Scott's-rule bandwidth `n^{-1/5}·std` (sample std), at least `1e-3`.
pub fn kde_bandwidth(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let std = if samples.len() > 1 {
        let mean = samples.iter().sum::<f64>() / n;
        (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (n.powf(-0.2) * std).max(MIN_BANDWIDTH)
}

/// Gaussian kernel density of `samples` at each of `eval_points`.
pub fn kde(samples: &[f64], eval_points: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::input("kde needs at least one sample"));
    }
    let h = kde_bandwidth(samples);
    let norm = 1.0 / (samples.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
    Ok(eval_points
        .iter()
        .map(|x| {
            norm * samples
                .iter()
                .map(|s| (-0.5 * ((x - s) / h).powi(2)).exp())
                .sum::<f64>()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner_opt::Bounds;
    use crate::strategies::{BatchProposal, Provenance, StrategyName};

    fn history(batches: &[&[f64]]) -> CampaignHistory {
        let mut h = CampaignHistory::new(StrategyName::Random, 0);
        for (t, b) in batches.iter().enumerate() {
            let unit = vec![vec![0.5]; b.len()];
            let p = BatchProposal::from_unit(&Bounds::unit(1), unit, vec![Provenance::Random; b.len()]);
            h.push(t, p, b.to_vec());
        }
        h
    }

    #[test]
    fn regret_values() {
        assert_eq!(normalized_regret(10.0, 10.0).unwrap(), 0.0);
        assert_eq!(normalized_regret(0.0, 10.0).unwrap(), 1.0);
        assert!((normalized_regret(9.0, 10.0).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(normalized_regret(10.0 + 1e-10, 10.0).unwrap(), 0.0);
        assert!(normalized_regret(1.0, 0.0).is_err());
        assert!((log_normalized_regret(0.001) + 3.0).abs() < 1e-12);
        assert_eq!(log_normalized_regret(0.0), -12.0);
        assert!((log_normalized_regret(0.1) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn cumulative() {
        assert_eq!(cumulative_regret(&[1.0, 1.0], 1.0), 0.0);
        assert_eq!(cumulative_regret(&[0.5, 0.75], 1.0), 0.75);
        assert_eq!(cumulative_regret(&[0.0], 2.0), 2.0);
    }

    #[test]
    fn best_so_far() {
        let s = best_so_far_series(&history(&[&[5.0], &[8.0]]), 10.0).unwrap();
        assert!((s.regret[0] - 0.5).abs() < 1e-15 && (s.regret[1] - 0.2).abs() < 1e-15);
        let s = best_so_far_series(&history(&[&[10.0, 1.0], &[3.0]]), 10.0).unwrap();
        assert_eq!(s.regret, vec![0.0, 0.0]);
        assert_eq!(s.log10_regret, vec![-12.0, -12.0]);
        assert!(best_so_far_series(&history(&[]), 1.0).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median_series(&[vec![1.0, 2.0]]).unwrap(), vec![1.0, 2.0]);
        let runs = vec![vec![1.0, 1.0], vec![3.0, 3.0], vec![2.0, 2.0]];
        assert_eq!(median_series(&runs).unwrap(), vec![2.0, 2.0]);
        let runs = vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
        assert_eq!(median_series(&runs).unwrap(), vec![2.5]);
        assert!(median_series(&[vec![1.0], vec![]]).is_err());
    }

    #[test]
    fn kde_rules() {
        let h = kde_bandwidth(&[0.7]);
        assert_eq!(h, 1e-3);
        let d = kde(&[0.7], &[0.7]).unwrap()[0];
        assert!((d - 1.0 / (h * (2.0 * std::f64::consts::PI).sqrt())).abs() < 1e-9);

        let samples = [-2.0, -0.5, 0.5, 2.0];
        let xs = [-1.3, -0.2, 0.9];
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        let a = kde(&samples, &xs).unwrap();
        let b = kde(&samples, &neg).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }

        let h = kde_bandwidth(&samples);
        let (lo, hi) = (-2.0 - 5.0 * h, 2.0 + 5.0 * h);
        let n = 4001;
        let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
        let dens = kde(&samples, &grid).unwrap();
        let dx = (hi - lo) / (n - 1) as f64;
        let integral: f64 = dens.windows(2).map(|w| 0.5 * (w[0] + w[1]) * dx).sum();
        assert!((integral - 1.0).abs() < 0.01, "{integral}");
        assert!(kde(&[], &[0.0]).is_err());
    }
}
