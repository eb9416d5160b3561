//! Federated learning with bias-aware sample selection.
//!
//! A self-contained, CPU-only simulator for federated training on Non-IID
//! data. Alongside the FedAvg and FedProx baselines it implements a
//! two-stage selection algorithm: after a plain warmup stage, every
//! participating client scores its samples with the freshly received global
//! model, splits them into an "unbiased" low-loss head and a "biased" tail
//! at the point of maximum prediction uncertainty, and admits the tail only
//! progressively over the local epochs of the round. On label-skewed
//! partitions (and especially under label noise) this keeps the early,
//! most influential epochs of each round on samples the global model
//! already agrees with.
//!
//! Everything is deterministic: a single master seed derives independent,
//! order-insensitive streams for initialization, partitioning, client
//! sampling, shuffling, and data synthesis, so any run — including parallel
//! client training — reproduces bit-for-bit.
//!
//! # Where to start
//!
//! The `examples/` directory is the guided tour; each file is runnable on
//! its own and finishes in seconds:
//!
//! * `quickstart` — synthetic data to trained federation in ~50 lines.
//! * `partitioning` — Dirichlet and shards label skew, visualised.
//! * `sample_selection` — one client's score table, split point, and
//!   per-epoch admission schedule.
//! * `label_noise` — corrupted labels landing in the biased tail.
//! * `compare_algorithms` — paired-seed FedAvg / FedProx / selection runs.
//! * `metrics_stream` — streaming per-round metrics with an observer.
//! * `checkpoints` — persisting and restoring global parameters.
//! * `mnist_idx` — loading real MNIST-format IDX files.
//!
//! The same machinery is scriptable from TOML through the thin `fedbss`
//! binary (`run`, `compare`, `validate`, `dump-scores`); see [`cli`] for
//! the full configuration reference.
//!
//! # Library layout
//!
//! * [`nn`] — tensors, dense/conv models, softmax cross-entropy, SGD with
//!   momentum and weight decay, parameter checkpoints.
//! * [`data`] — synthetic Gaussian mixtures, IDX loading, Dirichlet and
//!   shards partitioning, symmetric label noise.
//! * [`selection`] — per-sample scoring, the uncertainty split, and the
//!   progressive admission schedules.
//! * [`federation`] — local trainers, parameter aggregation, client
//!   sampling, evaluation, and the round loop.
//! * [`cli`] — config parsing, experiment orchestration, reports.
//!
//! ```no_run
//! use fedbss::data::{gaussian_mixture_split, partition, PartitionSpec};
//! use fedbss::federation::{run_experiment, Algorithm, FederationConfig};
//! use fedbss::nn::{Architecture, SgdConfig};
//! use fedbss::selection::SelectionVariant;
//!
//! # fn main() -> fedbss::Result<()> {
//! let (train, test) = gaussian_mixture_split(5, 80, 20, 8, 0.8, 42)?;
//! let parts = partition(&train, &PartitionSpec::dirichlet(8, 0.1, 42))?;
//! let arch = Architecture::mlp(train.feature_shape(), 32, train.num_classes())?;
//! let config = FederationConfig {
//!     n_clients: 8,
//!     participation: 0.5,
//!     rounds_warmup: 4,
//!     rounds_progressive: 8,
//!     local_epochs: 3,
//!     batch_size: 16,
//!     optimizer: SgdConfig::plain(0.1),
//!     algorithm: Algorithm::FedBss { variant: SelectionVariant::Cosine },
//!     weighted_aggregation: false,
//!     seed: 42,
//! };
//! let record = run_experiment(&config, &arch, &train, &parts, &test, &mut ())?;
//! println!("final accuracy {:.4}", record.summary.mean_last_accuracy);
//! # Ok(())
//! # }
//! ```

pub mod cli;
pub mod data;
pub mod error;
pub mod federation;
pub mod nn;
pub mod rng;
pub mod selection;
mod util;

pub use error::{Error, Result};
