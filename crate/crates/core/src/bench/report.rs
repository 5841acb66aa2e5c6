use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use super::SuiteResults;
use crate::error::{Error, Result};
use crate::metrics::{kde, median_series};

pub const REPORT_FILES: [&str; 3] = ["runs.csv", "median.csv", "kde.csv"];
/// KDE evaluation grid over log10 regret: `[-12.5, 0.5]` in steps of 0.1.
pub const KDE_POINTS: usize = 131;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Data(format!("{other:?}")),
    }
}

/// Log10 regret series per (strategy, objective), in report order.
type Groups = BTreeMap<(String, String), Vec<Vec<f64>>>;

fn write_csv(path: &Path, meta: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut buf = format!("# {meta}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(&r).map_err(csv_err)?;
        }
        w.flush()?;
    }
    fs::write(path, buf)?;
    Ok(())
}

/// Writes `median.csv` and `kde.csv` from grouped log10 regret series.
pub fn write_aggregates(groups: &Groups, meta: &str, out_dir: &Path) -> Result<()> {
    let mut median_rows = Vec::new();
    let mut kde_rows = Vec::new();
    let eval: Vec<f64> = (0..KDE_POINTS).map(|i| -12.5 + 0.1 * i as f64).collect();
    for ((s, o), runs) in groups {
        for (t, m) in median_series(runs)?.into_iter().enumerate() {
            median_rows.push(vec![s.clone(), o.clone(), t.to_string(), num(m)]);
        }
        let finals: Vec<f64> = runs.iter().filter_map(|r| r.last().copied()).collect();
        for (x, d) in eval.iter().zip(kde(&finals, &eval)?) {
            kde_rows.push(vec![s.clone(), o.clone(), num(*x), num(d)]);
        }
    }
    write_csv(
        &out_dir.join("median.csv"),
        meta,
        &["strategy", "objective", "iteration", "median_log10_norm_regret"],
        median_rows,
    )?;
    write_csv(
        &out_dir.join("kde.csv"),
        meta,
        &["strategy", "objective", "eval_point", "density"],
        kde_rows,
    )
}

/// Writes `runs.csv`, `median.csv` and `kde.csv` (plus `failures.csv` when
/// some campaigns failed) into `out_dir`. The first line of each file is a
/// `#` metadata comment holding the timestamp and failure count; everything
/// after it is deterministic. Failed runs are left out of the aggregates.
pub fn emit_report(results: &SuiteResults, out_dir: &Path) -> Result<()> {
    if results.runs.is_empty() {
        return Err(Error::input("no runs to report"));
    }
    fs::create_dir_all(out_dir)?;
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let meta = format!(
        "generated_unix={stamp} runs={} failed_runs={} xi={}",
        results.runs.len(),
        results.failed(),
        results.xi
    );

    let mut rows = Vec::new();
    let mut groups = Groups::new();
    let mut failures = Vec::new();
    for r in &results.runs {
        let Some(series) = &r.series else {
            failures.push(vec![
                r.strategy.to_string(),
                r.objective.clone(),
                r.seed.to_string(),
                r.failure.clone().unwrap_or_default(),
            ]);
            continue;
        };
        for t in 0..series.len() {
            rows.push(vec![
                r.strategy.to_string(),
                r.objective.clone(),
                r.seed.to_string(),
                t.to_string(),
                num(series.best_value[t]),
                num(series.regret[t]),
                num(series.log10_regret[t]),
            ]);
        }
        groups
            .entry((r.strategy.to_string(), r.objective.clone()))
            .or_default()
            .push(series.log10_regret.clone());
    }
    write_csv(
        &out_dir.join("runs.csv"),
        &meta,
        &[
            "strategy",
            "objective",
            "seed",
            "iteration",
            "best_value",
            "norm_regret",
            "log10_norm_regret",
        ],
        rows,
    )?;
    if !failures.is_empty() {
        write_csv(
            &out_dir.join("failures.csv"),
            &meta,
            &["strategy", "objective", "seed", "reason"],
            failures,
        )?;
    }
    write_aggregates(&groups, &meta, out_dir)
}

/// Reads `runs.csv` back into grouped log10 regret series.
pub fn read_runs(path: &Path) -> Result<Groups> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(csv_err)?;
    let mut by_run: BTreeMap<(String, String, u64), Vec<(usize, f64)>> = BTreeMap::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let bad = |what: &str| Error::Data(format!("{}: row {}: bad {what}", path.display(), i + 1));
        let field = |k: usize| rec.get(k).ok_or_else(|| bad("column count"));
        let seed: u64 = field(2)?.parse().map_err(|_| bad("seed"))?;
        let t: usize = field(3)?.parse().map_err(|_| bad("iteration"))?;
        let v: f64 = field(6)?.parse().map_err(|_| bad("log10_norm_regret"))?;
        by_run
            .entry((field(0)?.to_string(), field(1)?.to_string(), seed))
            .or_default()
            .push((t, v));
    }
    let mut groups = Groups::new();
    for ((s, o, _), mut pts) in by_run {
        pts.sort_by_key(|p| p.0);
        groups.entry((s, o)).or_default().push(pts.into_iter().map(|p| p.1).collect());
    }
    Ok(groups)
}

/// Final median log10 regret per (strategy, objective).
pub fn summarize(groups: &Groups) -> Result<Vec<(String, String, f64)>> {
    groups
        .iter()
        .map(|((s, o), runs)| {
            let m = median_series(runs)?;
            Ok((s.clone(), o.clone(), m.last().copied().unwrap_or(0.0)))
        })
        .collect()
}
