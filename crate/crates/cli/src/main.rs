//! `pcbo` command-line harness: benchmark suites and file-backed ask-tell
//! campaigns.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 runtime error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use pcbo::bench::{emit_report, parse_config, read_runs, run_suite, summarize, write_aggregates};
use pcbo::campaign::{campaign_init, load_state, observe, parse_campaign_config, save_state, suggest};
use pcbo::Error;

#[derive(Parser)]
#[command(name = "pcbo", version, about = "Process-constrained batch Bayesian optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a strategy × objective × seed suite and write its report files.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `out_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild median.csv and kde.csv from an existing runs.csv.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Create a campaign state file from a campaign config.
    Init {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        state: PathBuf,
        /// Replace an existing state file.
        #[arg(long)]
        force: bool,
    },
    /// Print the next batch as JSON and record it as pending.
    Suggest {
        #[arg(long)]
        state: PathBuf,
    },
    /// Record one objective value per pending point.
    Observe {
        #[arg(long)]
        state: PathBuf,
        /// Comma-separated values in the order the points were suggested.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
}

/// CLI failure carrying its exit code.
enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type CliResult = Result<(), Failure>;

fn read_config(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))
}

fn run(config: &Path, out: Option<PathBuf>) -> CliResult {
    let mut suite = parse_config(&read_config(config)?)?;
    // Relative yield-table paths are resolved against the config's directory.
    let base = config.parent().unwrap_or(Path::new("."));
    for o in &mut suite.objectives {
        if let Some(p) = &o.path {
            if p.is_relative() {
                o.path = Some(base.join(p));
            }
        }
    }
    let Some(out) = out.or_else(|| suite.out_dir.clone()) else {
        return Err(Failure::Config("no output directory: pass --out or set out_dir".into()));
    };
    let results = run_suite(&suite)?;
    emit_report(&results, &out)?;
    let failed = results.failed();
    if failed > 0 {
        log::warn!("{failed} of {} campaigns failed; see failures.csv", results.runs.len());
    }
    println!("wrote {} runs to {}", results.runs.len(), out.display());
    print_summary(&out.join("runs.csv"))
}

fn print_summary(runs: &Path) -> CliResult {
    let groups = read_runs(runs)?;
    println!("{:<18} {:<16} final median log10 regret", "strategy", "objective");
    for (s, o, m) in summarize(&groups)? {
        println!("{s:<18} {o:<16} {m:.3}");
    }
    Ok(())
}

fn report(dir: &Path) -> CliResult {
    let runs = dir.join("runs.csv");
    let groups = read_runs(&runs)?;
    if groups.is_empty() {
        return Err(Failure::Runtime(format!("{} holds no runs", runs.display())));
    }
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    write_aggregates(&groups, &format!("regenerated_unix={stamp} source=runs.csv"), dir)?;
    print_summary(&runs)
}

fn init(config: &Path, state: &Path, force: bool) -> CliResult {
    let file = parse_campaign_config(&read_config(config)?)?;
    if state.exists() && !force {
        return Err(Failure::Runtime(format!(
            "{} already exists; pass --force to replace it",
            state.display()
        )));
    }
    let s = campaign_init(file.campaign, file.seed)?;
    save_state(&s, state)?;
    println!("initialized {} (seed {})", state.display(), s.seed);
    Ok(())
}

fn suggest_cmd(path: &Path) -> CliResult {
    let mut state = load_state(path)?;
    let p = suggest(&mut state)?;
    save_state(&state, path)?;
    let doc = serde_json::json!({
        "iteration": state.t,
        "points": p.points,
        "provenance": p.provenance,
    });
    println!("{doc}");
    Ok(())
}

fn parse_values(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .enumerate()
        .map(|(i, v)| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Failure::Config(format!("--values entry {i} `{}`: {e}", v.trim())))
        })
        .collect()
}

fn observe_cmd(path: &Path, values: &str) -> CliResult {
    let values = parse_values(values)?;
    let mut state = load_state(path)?;
    observe(&mut state, &values)?;
    save_state(&state, path)?;
    println!("recorded {} values; {} iterations complete", values.len(), state.t);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run { config, out } => run(&config, out),
        Command::Report { input } => report(&input),
        Command::Init { config, state, force } => init(&config, &state, force),
        Command::Suggest { state } => suggest_cmd(&state),
        Command::Observe { state, values } => observe_cmd(&state, &values),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
