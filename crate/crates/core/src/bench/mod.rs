//! Strategy × objective × seed suites and their report files.

mod config;
mod report;

use std::sync::Mutex;

pub use config::{
    parse_config, ObjectiveEntry, StrategyEntry, SuiteConfig, DEFAULT_BATCH_SIZE, DEFAULT_GMM_ITERATIONS,
    DEFAULT_ITERATIONS, DEFAULT_SEED_COUNT,
};
pub use report::{emit_report, read_runs, summarize, write_aggregates, KDE_POINTS, REPORT_FILES};

use crate::error::Result;
use crate::metrics::{best_so_far_series, RegretSeries};
use crate::objectives::Objective;
use crate::strategies::{run_campaign, CampaignConfig, CampaignHistory, StrategyName};

/// Outcome of one campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub strategy: StrategyName,
    pub objective: String,
    pub seed: u64,
    pub f_star: f64,
    /// Present when the campaign completed.
    pub series: Option<RegretSeries>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResults {
    /// Sorted by (strategy, objective, seed).
    pub runs: Vec<RunResult>,
    pub xi: f64,
}

impl SuiteResults {
    pub fn failed(&self) -> usize {
        self.runs.iter().filter(|r| r.series.is_none()).count()
    }
}

struct Job {
    strategy: StrategyName,
    objective: usize,
    seed: u64,
    config: CampaignConfig,
}

fn execute(job: &Job, objectives: &[(String, Objective)], iterations: usize) -> RunResult {
    let (label, objective) = &objectives[job.objective];
    let outcome = run_campaign(&job.config, objective, iterations, job.seed);
    let (series, failure) = match outcome {
        Ok(CampaignHistory { failure: Some(f), .. }) => (None, Some(f)),
        Ok(h) => match best_so_far_series(&h, objective.f_star()) {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e.to_string())),
        },
        Err(e) => (None, Some(e.to_string())),
    };
    if let Some(f) = &failure {
        log::warn!("{} on {label} with seed {} failed: {f}", job.strategy, job.seed);
    }
    RunResult {
        strategy: job.strategy,
        objective: label.clone(),
        seed: job.seed,
        f_star: objective.f_star(),
        series,
        failure,
    }
}

/// Runs every campaign of the suite. Objectives are built (and every
/// campaign configuration checked) before any campaign starts; a failure
/// there is an error. Campaign failures are recorded per run.
///
/// Campaigns are spread over up to `workers` threads; results do not depend
/// on the thread count.
pub fn run_suite_with(config: &SuiteConfig, workers: usize) -> Result<SuiteResults> {
    config.validate()?;
    let mut config = config.clone();
    config.apply_defaults();

    let mut objectives = Vec::with_capacity(config.objectives.len());
    for (i, e) in config.objectives.iter().enumerate() {
        let obj = e.spec(&format!("objectives[{i}]"))?.build()?;
        objectives.push((config.label(i), obj));
    }
    let mut jobs = Vec::new();
    for s in &config.strategies {
        for (oi, (_, obj)) in objectives.iter().enumerate() {
            let cfg = config.campaign_config(oi, obj, s)?;
            for &seed in &config.seeds() {
                jobs.push(Job {
                    strategy: s.name,
                    objective: oi,
                    seed,
                    config: cfg.clone(),
                });
            }
        }
    }
    jobs.sort_by(|a, b| {
        (a.strategy.as_str(), &objectives[a.objective].0, a.seed).cmp(&(
            b.strategy.as_str(),
            &objectives[b.objective].0,
            b.seed,
        ))
    });

    let iterations = config.iterations();
    let slots: Vec<Mutex<Option<RunResult>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    let next = Mutex::new(0usize);
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, jobs.len().max(1)) {
            scope.spawn(|| loop {
                let i = {
                    let mut n = next.lock().expect("job counter");
                    let i = *n;
                    *n += 1;
                    i
                };
                let Some(job) = jobs.get(i) else { break };
                let r = execute(job, &objectives, iterations);
                *slots[i].lock().expect("result slot") = Some(r);
            });
        }
    });
    let runs = slots
        .into_iter()
        .map(|s| s.into_inner().expect("result slot").expect("every job ran"))
        .collect();
    Ok(SuiteResults { runs, xi: config.xi() })
}

/// [`run_suite_with`] using every available core.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteResults> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    run_suite_with(config, workers)
}
