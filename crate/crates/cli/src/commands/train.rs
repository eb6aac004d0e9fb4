use std::io::Write;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use qtrl_core::generator::{qubits_for, QtConfig};
use qtrl_core::{train_with_observer, Mode, TrainConfig, TrainOutcome};

use crate::args::{RunArgs, TrainArgs};
use crate::error::CliResult;
use crate::export::{ExportedPolicy, Provenance};
use crate::io::{log_csv, write_atomic};
use crate::manifest::{unix_ms, ConstantsRef, RunManifest, RunSummary};

pub const LOG_FILE: &str = "train_log.csv";
pub const POLICY_FILE: &str = "policy.json";
pub const MANIFEST_FILE: &str = "manifest.json";

pub struct TrainReport {
    pub run_dir: PathBuf,
    pub manifest: RunManifest,
    pub outcome: TrainOutcome,
}

pub fn config_from(run: &RunArgs, depth: usize, seed: u64) -> TrainConfig {
    let mut cfg = TrainConfig::new(run.env, run.mode);
    if let Some(episodes) = run.episodes {
        cfg.episodes = episodes;
    }
    cfg.depth = depth;
    cfg.seed = seed;
    cfg.gamma = run.gamma;
    cfg.lr = run.lr;
    cfg.record_wall_clock = run.wall_clock;
    cfg.bit_encoding = run.bit_encoding;
    cfg
}

pub fn run_name(cfg: &TrainConfig) -> String {
    match cfg.mode {
        Mode::Classical => format!("{}-classical-s{}", cfg.env, cfg.seed),
        Mode::Qtrl => format!("{}-qtrl-L{}-s{}", cfg.env, cfg.depth, cfg.seed),
    }
}

/// Trains, then writes the log, the exported policy and the manifest into
/// `run_dir`.
pub fn train_into(
    cfg: &TrainConfig,
    run_dir: &Path,
    mut progress: impl FnMut(&qtrl_core::EpisodeRecord),
) -> CliResult<TrainReport> {
    cfg.validate()?;
    let started = unix_ms();
    let outcome = train_with_observer(cfg, |record| {
        progress(record);
        ControlFlow::Continue(())
    })?;

    let log_path = run_dir.join(LOG_FILE);
    let policy_path = run_dir.join(POLICY_FILE);
    write_atomic(&log_path, &log_csv(&outcome.log.records))?;

    let spec = cfg.policy_spec();
    let (qubits, trainable) = match cfg.mode {
        Mode::Classical => (None, spec.param_count()),
        Mode::Qtrl => {
            let qt = QtConfig::for_policy(&spec, cfg.depth)?;
            (Some(qubits_for(spec.param_count())), qt.param_count())
        }
    };
    let summary = RunSummary {
        episodes_run: outcome.log.records.len(),
        last_10_average: outcome.log.last_10_average(),
        last_100_average: outcome.log.last_100_average(),
        best_last_100_average: outcome.log.best_running_average(100),
    };
    let export = ExportedPolicy::new(
        &outcome.policy,
        Provenance {
            env: cfg.env,
            mode: cfg.mode,
            depth: qubits.map(|_| cfg.depth),
            qubits,
            seed: cfg.seed,
            training_episodes: summary.episodes_run,
            final_last_10_average: summary.last_10_average,
        },
    );
    export.save(&policy_path)?;

    let manifest = RunManifest {
        artifact_version: crate::manifest::ARTIFACT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        qubits,
        trainable_parameters: trainable,
        policy_parameters: spec.param_count(),
        constants: ConstantsRef::current(),
        started_unix_ms: started,
        finished_unix_ms: unix_ms(),
        log: log_path,
        policy: policy_path,
        summary,
    };
    manifest.save(&run_dir.join(MANIFEST_FILE))?;
    Ok(TrainReport {
        run_dir: run_dir.to_path_buf(),
        manifest,
        outcome,
    })
}

pub fn run(args: &TrainArgs, out: &mut impl Write) -> CliResult<TrainReport> {
    let cfg = config_from(&args.run, args.depth, args.seed);
    cfg.validate()?;
    let run_dir = args.run.out.join(run_name(&cfg));
    let every = args.log_every;
    let mut recent = Vec::new();
    let report = train_into(&cfg, &run_dir, |record| {
        recent.push(record.total_reward);
        if every > 0 && (record.episode + 1) % every == 0 {
            let tail = &recent[recent.len().saturating_sub(every)..];
            let mean = tail.iter().sum::<f64>() / tail.len() as f64;
            eprintln!(
                "episode {:>6}  mean reward (last {every}) {mean:.3}",
                record.episode + 1
            );
        }
    })?;
    print_summary(out, &report);
    Ok(report)
}

fn print_summary(out: &mut impl Write, report: &TrainReport) {
    let s = &report.manifest.summary;
    let _ = writeln!(out, "run:              {}", report.run_dir.display());
    if let Some(q) = report.manifest.qubits {
        let _ = writeln!(
            out,
            "parameters:       {} trainable -> {} policy weights on {q} qubits",
            report.manifest.trainable_parameters, report.manifest.policy_parameters
        );
    }
    let _ = writeln!(out, "last-10 average:  {:.3}", s.last_10_average);
    let _ = writeln!(out, "last-100 average: {:.3}", s.last_100_average);
}
