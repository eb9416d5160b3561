//! The `fedbss` command-line front-end.
//!
//! Four subcommands: `run` executes one experiment per configured seed,
//! `compare` runs several configs over shared seeds and tabulates them,
//! `validate` parses a config and prints its resolved form, and
//! `dump-scores` is `run` with per-sample score records enabled. Metrics
//! are written as one JSON object per line, flushed after every round, so
//! an interrupted run keeps everything it produced.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::cli::config::{parse_config, AlgorithmKind, ExperimentConfig};
use crate::cli::report::{
    emit_report, experiment_summary, render_table, ExperimentSummary,
};
use crate::data::partition;
use crate::error::{Error, Result};
use crate::federation::{run_experiment, RoundObserver, RoundReport};
use crate::nn::checkpoint;
use crate::selection::{SampleScoreTable, ScoreRecord};

#[derive(Parser)]
#[command(
    name = "fedbss",
    version,
    about = "Federated-learning experiments with bias-aware sample selection",
    after_help = "Set FEDBSS_LOG=debug for per-round progress or FEDBSS_LOG=off for silence."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment per configured seed and write metrics + summary
    Run {
        /// Experiment config file (TOML)
        config: PathBuf,
        /// Output directory; overrides `run.out_dir`
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overwrite outputs left by a previous run
        #[arg(long)]
        force: bool,
    },
    /// Run two or more configs over shared seeds and tabulate the results
    Compare {
        /// Experiment config files (at least two)
        #[arg(required = true, num_args = 2..)]
        configs: Vec<PathBuf>,
        /// Output directory; overrides the first config's `run.out_dir`
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overwrite outputs left by a previous run
        #[arg(long)]
        force: bool,
    },
    /// Parse a config, resolve its defaults, and print the result
    Validate {
        /// Experiment config file (TOML)
        config: PathBuf,
    },
    /// Like `run`, but also write per-sample score records
    DumpScores {
        /// Experiment config file (TOML)
        config: PathBuf,
        /// Output directory; overrides `run.out_dir`
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overwrite outputs left by a previous run
        #[arg(long)]
        force: bool,
    },
}

/// Parses arguments and executes the chosen subcommand.
///
/// Returns the process exit code: 0 on success, 1 on any runtime failure
/// (with a diagnostic on stderr), 2 on a usage error.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; clap reports 0 for them.
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Run { config, out, force } => cmd_run(&config, out, force, false),
        Command::DumpScores { config, out, force } => cmd_run(&config, out, force, true),
        Command::Compare { configs, out, force } => cmd_compare(&configs, out, force),
        Command::Validate { config } => cmd_validate(&config),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn cmd_validate(path: &Path) -> Result<()> {
    let config = parse_config(path)?;
    print!("{}", config.to_toml_string());
    Ok(())
}

fn cmd_run(path: &Path, out: Option<PathBuf>, force: bool, dump_scores: bool) -> Result<()> {
    let config = parse_config(path)?;
    let out = resolve_out_dir(out, &config)?;
    let dump = dump_scores || config.run.dump_scores;
    let summary = execute_run(&config, &config_name(path), &out, force, dump)?;
    print!("{}", render_table(std::slice::from_ref(&summary)));
    Ok(())
}

fn cmd_compare(paths: &[PathBuf], out: Option<PathBuf>, force: bool) -> Result<()> {
    let mut experiments = Vec::with_capacity(paths.len());
    for path in paths {
        experiments.push((config_name(path), parse_config(path)?));
    }
    let seeds = &experiments[0].1.run.seeds;
    for (name, config) in &experiments[1..] {
        if &config.run.seeds != seeds {
            return Err(Error::Config(format!(
                "compare needs identical run.seeds everywhere, but {name} lists {:?} \
                 while {} lists {seeds:?}",
                config.run.seeds, experiments[0].0
            )));
        }
    }
    for (i, (name, _)) in experiments.iter().enumerate() {
        if experiments[i + 1..].iter().any(|(other, _)| other == name) {
            return Err(Error::Config(format!(
                "config name {name:?} appears twice; rename one file"
            )));
        }
    }

    let out = resolve_out_dir(out, &experiments[0].1)?;
    fs::create_dir_all(&out)?;
    let table_path = out.join("summary.txt");
    let json_path = out.join("summary.json");
    if !force {
        for p in [&table_path, &json_path] {
            if p.exists() {
                return Err(Error::OutputExists(p.clone()));
            }
        }
    }

    let mut summaries = Vec::with_capacity(experiments.len());
    for (name, config) in &experiments {
        let summary =
            execute_run(config, name, &out.join(name), force, config.run.dump_scores)?;
        summaries.push(summary);
    }
    let table = render_table(&summaries);
    fs::write(&table_path, &table)?;
    let json =
        serde_json::to_string_pretty(&summaries).map_err(|e| Error::Report(e.to_string()))?;
    fs::write(&json_path, json + "\n")?;
    print!("{table}");
    Ok(())
}

/// Runs every seed of one experiment, writing metrics, checkpoints, and the
/// summary under `out`.
fn execute_run(
    config: &ExperimentConfig,
    name: &str,
    out: &Path,
    force: bool,
    dump_scores: bool,
) -> Result<ExperimentSummary> {
    fs::create_dir_all(out)?;
    if !force {
        let mut targets = vec![out.join("summary.json")];
        for &seed in &config.run.seeds {
            targets.push(metrics_path(out, seed));
            targets.push(params_path(out, seed));
            if dump_scores {
                targets.push(scores_path(out, seed));
            }
        }
        for t in &targets {
            if t.exists() {
                return Err(Error::OutputExists(t.clone()));
            }
        }
    }

    let mut histories = Vec::with_capacity(config.run.seeds.len());
    for &seed in &config.run.seeds {
        log::info!(
            "{name}: seed {seed}, {} clients, {} rounds, algorithm {}",
            config.federation.clients,
            config.federation.rounds,
            algorithm_label(config),
        );
        let (train, test) = config.load_data(seed)?;
        let partitions = partition(&train, &config.partition_spec(seed))?;
        let arch = config.architecture(&train)?;
        let federation = config.federation_config(seed);

        let mut sink = MetricsSink::create(out, seed, dump_scores)?;
        let record = run_experiment(&federation, &arch, &train, &partitions, &test, &mut sink)?;
        checkpoint::write_params(&params_path(out, seed), &record.final_params)?;
        log::info!(
            "{name}: seed {seed} finished, last-{} mean accuracy {:.4}",
            record.summary.window,
            record.summary.mean_last_accuracy
        );
        histories.push((seed, record.reports));
    }

    let summary = experiment_summary(name, &algorithm_label(config), &histories)?;
    emit_report(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Streams round metrics (and optionally score records) to disk as they
/// are produced.
struct MetricsSink {
    metrics: BufWriter<File>,
    scores: Option<BufWriter<File>>,
}

impl MetricsSink {
    fn create(out: &Path, seed: u64, dump_scores: bool) -> Result<Self> {
        let metrics = BufWriter::new(File::create(metrics_path(out, seed))?);
        let scores = if dump_scores {
            Some(BufWriter::new(File::create(scores_path(out, seed))?))
        } else {
            None
        };
        Ok(MetricsSink { metrics, scores })
    }
}

impl RoundObserver for MetricsSink {
    fn on_round(&mut self, report: &RoundReport) -> Result<()> {
        let line =
            serde_json::to_string(report).map_err(|e| Error::Report(e.to_string()))?;
        writeln!(self.metrics, "{line}")?;
        self.metrics.flush()?;
        log::debug!(
            "round {} ({:?}): accuracy {:.4}, train loss {:.4}",
            report.round,
            report.stage,
            report.test_accuracy,
            report.mean_train_loss
        );
        Ok(())
    }

    fn wants_scores(&self) -> bool {
        self.scores.is_some()
    }

    fn on_scores(&mut self, round: usize, client: usize, table: &SampleScoreTable) -> Result<()> {
        if let Some(w) = &mut self.scores {
            for record in ScoreRecord::from_table(round, client, table) {
                let line = serde_json::to_string(&record)
                    .map_err(|e| Error::Report(e.to_string()))?;
                writeln!(w, "{line}")?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

fn metrics_path(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("metrics_seed{seed}.jsonl"))
}

fn scores_path(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("scores_seed{seed}.jsonl"))
}

fn params_path(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("params_seed{seed}.pv"))
}

fn resolve_out_dir(flag: Option<PathBuf>, config: &ExperimentConfig) -> Result<PathBuf> {
    flag.or_else(|| config.run.out_dir.clone()).ok_or_else(|| {
        Error::Config("no output directory: pass --out or set run.out_dir".into())
    })
}

fn config_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".to_string())
}

fn algorithm_label(config: &ExperimentConfig) -> String {
    match config.federation.algorithm {
        AlgorithmKind::FedAvg => "fedavg".to_string(),
        AlgorithmKind::FedProx => {
            format!("fedprox(mu={})", config.federation.mu.expect("resolved"))
        }
        AlgorithmKind::FedBss => {
            format!("fedbss({})", config.federation.variant.expect("resolved"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn write_config(dir: &Path, file: &str, algorithm: &str, extra: &str) -> PathBuf {
        let text = format!(
            "[dataset]\nsource = \"synthetic\"\nclasses = 3\ntrain_per_class = 8\n\
             test_per_class = 4\ndim = 4\nspread = 0.5\n\
             [model]\nkind = \"softmax\"\n\
             [federation]\nalgorithm = \"{algorithm}\"\nclients = 3\nparticipation = 1.0\n\
             rounds = 3\nwarmup_rounds = 1\nlocal_epochs = 2\nbatch_size = 8\n\
             [optimizer]\nlearning_rate = 0.05\n\
             [run]\nseeds = [1, 2]\n{extra}"
        );
        let path = dir.join(file);
        fs::write(&path, text).unwrap();
        path
    }

    fn cli(args: &[&str]) -> i32 {
        run_cli(std::iter::once("fedbss").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(cli(&[]), 2);
        assert_eq!(cli(&["frobnicate"]), 2);
        assert_eq!(cli(&["run"]), 2);
        assert_eq!(cli(&["compare", "only-one.toml"]), 2);
    }

    #[test]
    fn validate_succeeds_without_writing_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "exp.toml", "fedavg", "");
        assert_eq!(cli(&["validate", cfg.to_str().unwrap()]), 0);
        let entries: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(entries.len(), 1, "validate must not create files");
    }

    #[test]
    fn broken_configs_exit_one() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.toml");
        fs::write(&bad, "[dataset]\nsource = \"synthetic\"\n").unwrap(); // no federation
        assert_eq!(cli(&["validate", bad.to_str().unwrap()]), 1);
        assert_eq!(cli(&["validate", dir.path().join("absent.toml").to_str().unwrap()]), 1);
    }

    #[test]
    fn run_writes_metrics_checkpoints_and_summary() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "exp.toml", "fedavg", "");
        let out = dir.path().join("out");
        assert_eq!(cli(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 0);

        for seed in [1u64, 2] {
            let metrics = fs::read_to_string(metrics_path(&out, seed)).unwrap();
            let lines: Vec<&str> = metrics.lines().collect();
            assert_eq!(lines.len(), 3, "one record per round");
            for line in lines {
                let v: Value = serde_json::from_str(line).unwrap();
                let obj = v.as_object().unwrap();
                let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
                keys.sort_unstable();
                assert_eq!(
                    keys,
                    ["accuracy", "mean_split_fraction", "mean_train_loss", "round", "stage", "wall_ms"]
                );
            }
            assert!(params_path(&out, seed).exists());
            assert!(!scores_path(&out, seed).exists());
        }
        let summary: ExperimentSummary =
            serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary.name, "exp");
        assert_eq!(summary.algorithm, "fedavg");
        assert_eq!(summary.seeds.len(), 2);
        assert!(summary.seeds.iter().all(|s| s.partial_window && s.window == 3));
    }

    #[test]
    fn rerunning_refuses_until_forced() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "exp.toml", "fedavg", "");
        let out = dir.path().join("out");
        let args = ["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
        assert_eq!(cli(&args), 0);
        assert_eq!(cli(&args), 1, "must refuse to overwrite");
        assert_eq!(cli(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--force"]), 0);
    }

    #[test]
    fn dump_scores_writes_score_records_for_progressive_rounds() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "exp.toml", "fedbss", "");
        let out = dir.path().join("out");
        assert_eq!(
            cli(&["dump-scores", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]),
            0
        );
        for seed in [1u64, 2] {
            let scores = fs::read_to_string(scores_path(&out, seed)).unwrap();
            let records: Vec<ScoreRecord> = scores
                .lines()
                .map(|l| serde_json::from_str(l).unwrap())
                .collect();
            assert!(!records.is_empty());
            // Warmup is round 1; scores only exist afterwards.
            assert!(records.iter().all(|r| r.round > 1 && r.round <= 3));
            assert!(records.iter().all(|r| r.loss.is_finite() && r.uncertainty.is_finite()));
        }
    }

    #[test]
    fn compare_tabulates_both_experiments() {
        let dir = tempfile::tempdir().unwrap();
        let avg = write_config(dir.path(), "avg.toml", "fedavg", "");
        let bss = write_config(dir.path(), "bss.toml", "fedbss", "");
        let out = dir.path().join("cmp");
        assert_eq!(
            cli(&[
                "compare",
                avg.to_str().unwrap(),
                bss.to_str().unwrap(),
                "--out",
                out.to_str().unwrap()
            ]),
            0
        );
        let table = fs::read_to_string(out.join("summary.txt")).unwrap();
        assert!(table.contains("avg") && table.contains("bss"), "table:\n{table}");
        let summaries: Vec<ExperimentSummary> =
            serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summaries.len(), 2);
        assert!(out.join("avg").join("metrics_seed1.jsonl").exists());
        assert!(out.join("bss").join("metrics_seed2.jsonl").exists());
        assert!(out.join("bss").join("summary.json").exists());
    }

    #[test]
    fn compare_requires_matching_seeds() {
        let dir = tempfile::tempdir().unwrap();
        let a = write_config(dir.path(), "a.toml", "fedavg", "");
        let text = fs::read_to_string(&a).unwrap().replace("seeds = [1, 2]", "seeds = [7]");
        let b = dir.path().join("b.toml");
        fs::write(&b, text).unwrap();
        let out = dir.path().join("cmp");
        assert_eq!(
            cli(&["compare", a.to_str().unwrap(), b.to_str().unwrap(), "--out", out.to_str().unwrap()]),
            1
        );
    }

    #[test]
    fn run_without_an_output_directory_fails_cleanly() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "exp.toml", "fedavg", "");
        assert_eq!(cli(&["run", cfg.to_str().unwrap()]), 1);

        // With run.out_dir set in the config, no flag is needed.
        let out = dir.path().join("from-config");
        let cfg = write_config(
            dir.path(),
            "exp2.toml",
            "fedavg",
            &format!("out_dir = {:?}\n", out.to_str().unwrap()),
        );
        assert_eq!(cli(&["run", cfg.to_str().unwrap()]), 0);
        assert!(out.join("summary.json").exists());
    }
}
