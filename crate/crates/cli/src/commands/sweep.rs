use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use qtrl_core::{EpisodeRecord, Mode, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::args::SweepArgs;
use crate::commands::train::{config_from, run_name, train_into};
use crate::error::{CliError, CliResult};
use crate::io::write_atomic;
use crate::manifest::{save_json, unix_ms, ConstantsRef, ARTIFACT_VERSION};

pub const AGGREGATE_HEADER: &str = "episode,mean,min,max,runs";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub depth: usize,
    pub seed: u64,
    pub run_dir: PathBuf,
    pub last_10_average: Option<f64>,
    pub last_100_average: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepManifest {
    pub artifact_version: u32,
    pub tool_version: String,
    pub complete: bool,
    pub constants: ConstantsRef,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub runs: Vec<RunEntry>,
    pub aggregates: Vec<PathBuf>,
}

pub struct SweepReport {
    pub dir: PathBuf,
    pub manifest: SweepManifest,
}

pub fn sweep_dir(out: &Path, env: qtrl_core::EnvKind, mode: Mode) -> PathBuf {
    out.join(format!("sweep-{env}-{mode}"))
}

pub fn aggregate_name(mode: Mode, depth: usize) -> String {
    match mode {
        Mode::Classical => "aggregate.csv".into(),
        Mode::Qtrl => format!("aggregate-L{depth}.csv"),
    }
}

/// Per-episode mean/min/max of total reward across runs. Runs may differ in
/// length; each row covers the runs that reached that episode.
pub fn aggregate_csv(runs: &[&[EpisodeRecord]]) -> Vec<u8> {
    let longest = runs.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut text = format!("{AGGREGATE_HEADER}\n");
    for episode in 0..longest {
        let values: Vec<f64> = runs
            .iter()
            .filter_map(|r| r.get(episode).map(|rec| rec.total_reward))
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        text.push_str(&format!("{episode},{mean},{min},{max},{}\n", values.len()));
    }
    text.into_bytes()
}

fn jobs_for(args: &SweepArgs) -> CliResult<Vec<TrainConfig>> {
    if args.seeds.is_empty() {
        return Err(CliError::Usage("--seeds is empty".into()));
    }
    if args.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let depths = match args.run.mode {
        Mode::Classical => vec![1],
        Mode::Qtrl if args.depths.is_empty() => {
            return Err(CliError::Usage("--depths is empty".into()))
        }
        Mode::Qtrl => args.depths.clone(),
    };
    let mut configs = Vec::new();
    for &depth in &depths {
        for &seed in &args.seeds {
            let cfg = config_from(&args.run, depth, seed);
            cfg.validate()?;
            configs.push(cfg);
        }
    }
    Ok(configs)
}

pub fn run(args: &SweepArgs, out: &mut impl Write) -> CliResult<SweepReport> {
    let configs = jobs_for(args)?;
    let dir = sweep_dir(&args.run.out, args.run.env, args.run.mode);
    let started = unix_ms();

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<CliResult<Vec<EpisodeRecord>>>>> =
        Mutex::new((0..configs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..args.jobs.min(configs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cfg) = configs.get(i) else { break };
                let result = train_into(cfg, &dir.join(run_name(cfg)), |_| {})
                    .map(|report| report.outcome.log.records);
                match &result {
                    Ok(records) => eprintln!("done {} ({} episodes)", run_name(cfg), records.len()),
                    Err(e) => eprintln!("failed {}: {e}", run_name(cfg)),
                }
                results.lock().unwrap()[i] = Some(result);
            });
        }
    });
    let results: Vec<CliResult<Vec<EpisodeRecord>>> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect();

    let mut entries = Vec::new();
    for (cfg, result) in configs.iter().zip(&results) {
        let last = |n: usize| {
            result.as_ref().ok().map(|recs| {
                let tail = &recs[recs.len().saturating_sub(n)..];
                tail.iter().map(|r| r.total_reward).sum::<f64>() / tail.len().max(1) as f64
            })
        };
        entries.push(RunEntry {
            depth: cfg.depth,
            seed: cfg.seed,
            run_dir: dir.join(run_name(cfg)),
            last_10_average: last(10),
            last_100_average: last(100),
            error: result.as_ref().err().map(|e| e.to_string()),
        });
    }

    let mut aggregates = Vec::new();
    let mut depths: Vec<usize> = configs.iter().map(|c| c.depth).collect();
    depths.dedup();
    for depth in depths {
        let runs: Vec<&[EpisodeRecord]> = configs
            .iter()
            .zip(&results)
            .filter(|(c, _)| c.depth == depth)
            .filter_map(|(_, r)| r.as_ref().ok().map(Vec::as_slice))
            .collect();
        if runs.is_empty() {
            continue;
        }
        let path = dir.join(aggregate_name(args.run.mode, depth));
        write_atomic(&path, &aggregate_csv(&runs))?;
        aggregates.push(path);
    }

    let failed = results.iter().filter(|r| r.is_err()).count();
    let manifest = SweepManifest {
        artifact_version: ARTIFACT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        complete: failed == 0,
        constants: ConstantsRef::current(),
        started_unix_ms: started,
        finished_unix_ms: unix_ms(),
        runs: entries,
        aggregates,
    };
    save_json(&dir.join("sweep.json"), &manifest)?;

    for entry in &manifest.runs {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
        let _ = writeln!(
            out,
            "L{:<3} seed {:<4} last-10 {:>10}  last-100 {:>10}",
            entry.depth,
            entry.seed,
            fmt(entry.last_10_average),
            fmt(entry.last_100_average)
        );
    }
    if failed > 0 {
        return Err(CliError::PartialSweep {
            failed,
            total: configs.len(),
        });
    }
    Ok(SweepReport { dir, manifest })
}
