//! The simulated federation: configuration, client sampling, local
//! trainers, aggregation, evaluation, and the round loop.

mod aggregate;
mod config;
mod evaluate;
mod experiment;
mod sampling;
mod trainer;

pub use aggregate::{aggregate_mean, aggregate_weighted};
pub use config::{Algorithm, FederationConfig};
pub use evaluate::evaluate_accuracy;
pub use experiment::{
    run_experiment, summarize, RoundObserver, RoundReport, RunRecord, RunSummary, Stage,
};
pub use sampling::sample_clients;
pub use trainer::{
    local_train_fedbss, local_train_fedprox, local_train_plain, LocalContext, LocalOutcome,
    SplitSummary,
};
