//! The federated training loop: sample clients, train locally, aggregate,
//! evaluate.
//!
//! Rounds run strictly in sequence; within a round, the selected clients
//! train in parallel. Every random decision derives from the experiment
//! seed through its own stream, so results are bit-reproducible on one
//! platform regardless of how the parallel clients are scheduled.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{verify_partition, ClientPartition, Dataset};
use crate::error::{Error, Result};
use crate::federation::{
    aggregate_mean, aggregate_weighted, evaluate_accuracy, local_train_fedbss,
    local_train_fedprox, local_train_plain, sample_clients, Algorithm, FederationConfig,
    LocalContext, LocalOutcome,
};
use crate::nn::{Architecture, Model, ParamVector};
use crate::selection::SampleScoreTable;

/// Which phase of the two-stage schedule a round belongs to.
///
/// Rounds up to the configured warmup count are [`Stage::Warmup`]; the rest
/// are [`Stage::Progressive`]. The label applies to every algorithm, but
/// only the bias-aware trainer changes behavior between stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    /// Plain local training for the bias-aware algorithm (stage 1).
    Warmup,
    /// The configured algorithm's own trainer (stage 2).
    Progressive,
}

/// Per-round metrics. Serialized (one object per line) these form the
/// run's metrics log; the participant list is internal and not emitted.
#[derive(Debug, Clone, Serialize)]
pub struct RoundReport {
    /// Round number, 1-based.
    pub round: usize,
    /// Warmup or progressive.
    pub stage: Stage,
    /// Accuracy of the aggregated global model on the held-out test set.
    #[serde(rename = "accuracy")]
    pub test_accuracy: f64,
    /// Mean over participants of their mean per-sample training loss.
    pub mean_train_loss: f64,
    /// Mean over participants of the fraction of their samples classified
    /// as unbiased; present only in progressive rounds of the bias-aware
    /// algorithm.
    pub mean_split_fraction: Option<f64>,
    /// Wall-clock duration of the round in milliseconds. Not covered by
    /// any determinism guarantee.
    pub wall_ms: u64,
    /// Clients that participated this round, ascending.
    #[serde(skip_serializing)]
    pub client_ids: Vec<usize>,
}

/// Mean and spread of accuracy over the final rounds of a run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RunSummary {
    /// Total rounds in the run.
    pub rounds: usize,
    /// Number of final rounds the statistics cover (at most 10).
    pub window: usize,
    /// Mean test accuracy over the window.
    pub mean_last_accuracy: f64,
    /// Sample standard deviation (N−1) over the window; zero for a
    /// single-round window.
    pub std_last_accuracy: f64,
}

/// Callbacks invoked after each round, in round order.
///
/// The default implementations do nothing; implement [`wants_scores`] to
/// ask the bias-aware trainer to keep (and deliver) its per-client score
/// tables, which are otherwise discarded to save memory.
///
/// [`wants_scores`]: RoundObserver::wants_scores
pub trait RoundObserver {
    /// Called once per round after aggregation and evaluation.
    fn on_round(&mut self, report: &RoundReport) -> Result<()> {
        let _ = report;
        Ok(())
    }

    /// Whether per-client score tables should be collected.
    fn wants_scores(&self) -> bool {
        false
    }

    /// Called once per participating client in progressive bias-aware
    /// rounds, before [`on_round`], when [`wants_scores`] returns true.
    ///
    /// [`on_round`]: RoundObserver::on_round
    /// [`wants_scores`]: RoundObserver::wants_scores
    fn on_scores(&mut self, round: usize, client: usize, table: &SampleScoreTable) -> Result<()> {
        let _ = (round, client, table);
        Ok(())
    }
}

/// The "ignore everything" observer.
impl RoundObserver for () {}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunRecord {
    /// One report per round, in round order.
    pub reports: Vec<RoundReport>,
    /// Last-rounds accuracy statistics.
    pub summary: RunSummary,
    /// The final global parameters.
    pub final_params: ParamVector<f32>,
}

fn check_dataset(arch: &Architecture, data: &Dataset, what: &str) -> Result<()> {
    if data.feature_shape() != arch.input_shape() {
        return Err(Error::Config(format!(
            "{what} feature shape {:?} does not match model input {:?}",
            data.feature_shape(),
            arch.input_shape()
        )));
    }
    if data.num_classes() > arch.num_classes() {
        return Err(Error::Config(format!(
            "{what} has {} classes but the model outputs {}",
            data.num_classes(),
            arch.num_classes()
        )));
    }
    Ok(())
}

/// Runs a full federated experiment and returns its reports, summary, and
/// final global parameters.
///
/// All configuration problems surface as errors before any training
/// starts. The observer sees each round's report as soon as the round
/// finishes, so metrics can be streamed while the run is in flight.
pub fn run_experiment(
    config: &FederationConfig,
    arch: &Architecture,
    train: &Dataset,
    partitions: &[ClientPartition],
    test: &Dataset,
    observer: &mut dyn RoundObserver,
) -> Result<RunRecord> {
    config.validate()?;
    check_dataset(arch, train, "training set")?;
    check_dataset(arch, test, "test set")?;
    if partitions.len() != config.n_clients {
        return Err(Error::Config(format!(
            "config names {} clients but {} partitions were supplied",
            config.n_clients,
            partitions.len()
        )));
    }
    verify_partition(train.len(), partitions)?;

    let mut global = Model::<f32>::init(arch.clone(), config.seed).into_params();
    let mut reports = Vec::with_capacity(config.total_rounds());

    for round in 1..=config.total_rounds() {
        let started = Instant::now();
        let progressive = round > config.rounds_warmup;
        let stage = if progressive { Stage::Progressive } else { Stage::Warmup };
        let selected = sample_clients(
            config.n_clients,
            config.participation,
            config.seed,
            round,
        );

        let collect_scores =
            progressive && observer.wants_scores() && matches!(config.algorithm, Algorithm::FedBss { .. });
        let outcomes: Vec<LocalOutcome> = selected
            .par_iter()
            .map(|&client| {
                let ctx = LocalContext {
                    data: train,
                    partition: &partitions[client],
                    arch,
                    round,
                    seed: config.seed,
                    epochs: config.local_epochs,
                    batch_size: config.batch_size,
                    optimizer: config.optimizer,
                    collect_scores,
                    collect_trace: false,
                };
                match (config.algorithm, progressive) {
                    (Algorithm::FedProx { mu }, _) => local_train_fedprox(&global, mu, &ctx),
                    (Algorithm::FedBss { variant }, true) => {
                        local_train_fedbss(&global, variant, &ctx)
                    }
                    _ => local_train_plain(&global, &ctx),
                }
            })
            .collect::<Result<_>>()?;

        let params: Vec<ParamVector<f32>> =
            outcomes.iter().map(|o| o.params.clone()).collect();
        global = if config.weighted_aggregation {
            let counts: Vec<usize> = outcomes.iter().map(|o| o.samples).collect();
            aggregate_weighted(&params, &counts)?
        } else {
            aggregate_mean(&params)?
        };

        let model = Model::from_params(arch.clone(), global.clone())?;
        let test_accuracy = evaluate_accuracy(&model, test)?;
        let mean_train_loss =
            outcomes.iter().map(|o| o.mean_loss).sum::<f64>() / outcomes.len() as f64;
        let splits: Vec<f64> = outcomes
            .iter()
            .filter_map(|o| o.split.map(|s| s.unbiased_fraction()))
            .collect();
        let mean_split_fraction =
            (!splits.is_empty()).then(|| splits.iter().sum::<f64>() / splits.len() as f64);

        if collect_scores {
            for (client, outcome) in selected.iter().zip(&outcomes) {
                if let Some(table) = &outcome.scores {
                    observer.on_scores(round, *client, table)?;
                }
            }
        }
        let report = RoundReport {
            round,
            stage,
            test_accuracy,
            mean_train_loss,
            mean_split_fraction,
            wall_ms: started.elapsed().as_millis() as u64,
            client_ids: selected,
        };
        observer.on_round(&report)?;
        reports.push(report);
    }

    let summary = summarize(&reports);
    Ok(RunRecord { reports, summary, final_params: global })
}

/// Mean and sample standard deviation of accuracy over the last
/// `min(10, rounds)` rounds.
pub fn summarize(reports: &[RoundReport]) -> RunSummary {
    let window = reports.len().min(10);
    let tail = &reports[reports.len() - window..];
    let accs: Vec<f64> = tail.iter().map(|r| r.test_accuracy).collect();
    let (mean, std) = crate::util::mean_and_sample_std(&accs);
    RunSummary {
        rounds: reports.len(),
        window,
        mean_last_accuracy: mean,
        std_last_accuracy: std,
    }
}
