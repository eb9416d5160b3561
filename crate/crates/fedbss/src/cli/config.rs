//! Experiment configuration: a strict, fully-defaulted TOML format.
//!
//! A config file has up to six sections. Only `[dataset]` (its `source`
//! key) and `[federation]` (its `algorithm` key) are required; every other
//! key falls back to a documented default, and parsing resolves all
//! defaults so the echoed config states exactly what the run will do.
//! Unknown keys are fatal: a typo must never silently change an experiment.
//!
//! ```toml
//! [dataset]
//! source = "synthetic"     # "synthetic" | "idx"
//! # synthetic source (defaults shown):
//! classes = 10             # mixture components / label count
//! train_per_class = 600    # training samples per class
//! test_per_class = 100     # held-out samples per class
//! dim = 16                 # feature dimension
//! spread = 0.35            # within-class standard deviation
//! # idx source (all four keys required):
//! # train_images = "data/train-images.idx"
//! # train_labels = "data/train-labels.idx"
//! # test_images  = "data/test-images.idx"
//! # test_labels  = "data/test-labels.idx"
//! noise_ratio = 0.0        # fraction of training labels flipped
//!
//! [partition]
//! scheme = "dirichlet"     # "dirichlet" | "shards"
//! alpha = 0.1              # dirichlet concentration (dirichlet only)
//! # shards_per_client = 2  # shards per client (shards only)
//!
//! [model]
//! kind = "mlp"             # "softmax" | "mlp" | "cnn"
//! hidden = 64              # hidden width (mlp only)
//!
//! [federation]
//! algorithm = "fedavg"     # "fedavg" | "fedprox" | "fedbss"  (required)
//! # mu = 0.01              # proximal coefficient (fedprox only)
//! # variant = "cosine"     # "filter" | "linear" | "cosine" (fedbss only)
//! clients = 100
//! participation = 0.1      # fraction of clients sampled per round
//! rounds = 200             # total rounds (warmup included)
//! warmup_rounds = 50
//! local_epochs = 10
//! batch_size = 64
//! weighted_aggregation = false
//!
//! [optimizer]
//! learning_rate = 1e-3
//! momentum = 1e-4
//! weight_decay = 1e-5
//!
//! [run]
//! seeds = [0]              # one full experiment per seed
//! # out_dir = "runs/exp"   # output directory (or pass --out)
//! dump_scores = false      # also write per-sample score records
//! ```
//!
//! Each seed is a completely independent experiment: it keys the synthetic
//! data draw, label noise, partitioning, model initialization, client
//! sampling, and shuffling. Two configs that share a seed therefore train
//! on identical data and partitions, which is what makes paired algorithm
//! comparisons meaningful.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{
    gaussian_mixture_split, inject_label_noise, load_idx, Dataset, PartitionSpec,
};
use crate::error::{Error, Result};
use crate::federation::{Algorithm, FederationConfig};
use crate::nn::{Architecture, SgdConfig};
use crate::selection::SelectionVariant;

/// Where training and test data come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetSource {
    /// A seeded Gaussian mixture generated in memory.
    Synthetic,
    /// Image/label file pairs in the classic big-endian IDX format.
    Idx,
}

/// The `[dataset]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    /// Data origin; determines which of the other keys apply.
    pub source: DatasetSource,
    /// Mixture classes (synthetic).
    #[serde(default = "default_classes")]
    pub classes: usize,
    /// Training samples per class (synthetic).
    #[serde(default = "default_train_per_class")]
    pub train_per_class: usize,
    /// Test samples per class (synthetic).
    #[serde(default = "default_test_per_class")]
    pub test_per_class: usize,
    /// Feature dimension (synthetic).
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Within-class standard deviation (synthetic).
    #[serde(default = "default_spread")]
    pub spread: f64,
    /// Training images file (idx).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_images: Option<PathBuf>,
    /// Training labels file (idx).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_labels: Option<PathBuf>,
    /// Test images file (idx).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_images: Option<PathBuf>,
    /// Test labels file (idx).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_labels: Option<PathBuf>,
    /// Fraction of training labels symmetrically flipped.
    #[serde(default)]
    pub noise_ratio: f64,
}

fn default_classes() -> usize {
    10
}
fn default_train_per_class() -> usize {
    600
}
fn default_test_per_class() -> usize {
    100
}
fn default_dim() -> usize {
    16
}
fn default_spread() -> f64 {
    0.35
}

/// How samples are split across clients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    /// Per-class Dirichlet proportions (label-distribution skew).
    Dirichlet,
    /// Label-sorted shards (extreme skew).
    Shards,
}

/// The `[partition]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSection {
    /// Partitioning scheme.
    #[serde(default = "default_scheme")]
    pub scheme: PartitionKind,
    /// Dirichlet concentration; smaller is more heterogeneous.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Shards dealt to each client.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shards_per_client: Option<usize>,
}

fn default_scheme() -> PartitionKind {
    PartitionKind::Dirichlet
}

impl Default for PartitionSection {
    fn default() -> Self {
        PartitionSection {
            scheme: default_scheme(),
            alpha: None,
            shards_per_client: None,
        }
    }
}

/// Network architecture families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Linear layer plus softmax.
    Softmax,
    /// One hidden ReLU layer.
    Mlp,
    /// Small convolutional network for image grids.
    Cnn,
}

/// The `[model]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// Architecture family.
    #[serde(default = "default_model_kind")]
    pub kind: ModelKind,
    /// Hidden width (mlp only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<usize>,
}

fn default_model_kind() -> ModelKind {
    ModelKind::Mlp
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection { kind: default_model_kind(), hidden: None }
    }
}

/// Local training algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    /// Plain local SGD, mean aggregation.
    FedAvg,
    /// FedAvg plus a proximal pull toward the global model.
    FedProx,
    /// Two-stage bias-aware sample selection.
    FedBss,
}

/// The `[federation]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FederationSection {
    /// Local training algorithm (required).
    pub algorithm: AlgorithmKind,
    /// Proximal coefficient (fedprox only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Selection schedule (fedbss only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<SelectionVariant>,
    /// Total clients.
    #[serde(default = "default_clients")]
    pub clients: usize,
    /// Fraction of clients sampled each round.
    #[serde(default = "default_participation")]
    pub participation: f64,
    /// Total rounds, warmup included.
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    /// Rounds of plain training before selection begins.
    #[serde(default = "default_warmup_rounds")]
    pub warmup_rounds: usize,
    /// Local epochs per client per round.
    #[serde(default = "default_local_epochs")]
    pub local_epochs: usize,
    /// Local mini-batch size.
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    /// Weight aggregation by client sample count instead of a plain mean.
    #[serde(default)]
    pub weighted_aggregation: bool,
}

fn default_clients() -> usize {
    100
}
fn default_participation() -> f64 {
    0.1
}
fn default_rounds() -> usize {
    200
}
fn default_warmup_rounds() -> usize {
    50
}
fn default_local_epochs() -> usize {
    10
}
fn default_batch_size() -> usize {
    64
}

/// Default proximal coefficient when `[federation] algorithm = "fedprox"`
/// does not set `mu`.
pub const DEFAULT_MU: f64 = 0.01;

/// The `[optimizer]` section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    /// SGD step size.
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    /// Momentum coefficient.
    #[serde(default = "default_momentum")]
    pub momentum: f64,
    /// L2 weight decay coefficient.
    #[serde(default = "default_weight_decay")]
    pub weight_decay: f64,
}

fn default_learning_rate() -> f64 {
    1e-3
}
fn default_momentum() -> f64 {
    1e-4
}
fn default_weight_decay() -> f64 {
    1e-5
}

impl Default for OptimizerSection {
    fn default() -> Self {
        OptimizerSection {
            learning_rate: default_learning_rate(),
            momentum: default_momentum(),
            weight_decay: default_weight_decay(),
        }
    }
}

/// The `[run]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Experiment seeds; one full run per seed.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Output directory; the `--out` flag overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Also write per-sample score records during progressive rounds.
    #[serde(default)]
    pub dump_scores: bool,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { seeds: default_seeds(), out_dir: None, dump_scores: false }
    }
}

/// A fully parsed, resolved, and validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Data origin and preprocessing.
    pub dataset: DatasetSection,
    /// Client data split.
    #[serde(default)]
    pub partition: PartitionSection,
    /// Network architecture.
    #[serde(default)]
    pub model: ModelSection,
    /// Federation structure and algorithm.
    pub federation: FederationSection,
    /// Local SGD hyper-parameters.
    #[serde(default)]
    pub optimizer: OptimizerSection,
    /// Seeds and outputs.
    #[serde(default)]
    pub run: RunSection,
}

fn key_err(key: &str, problem: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {problem}"))
}

impl ExperimentConfig {
    /// Parses a TOML string, resolves every default, and validates.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.resolve()?;
        config.validate()?;
        Ok(config)
    }

    /// Serializes the resolved config back to TOML. Re-parsing the echo
    /// yields an identical config.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("resolved config serializes")
    }

    /// Fills in the cross-field defaults that depend on other keys.
    fn resolve(&mut self) -> Result<()> {
        match self.partition.scheme {
            PartitionKind::Dirichlet => {
                self.partition.alpha.get_or_insert(0.1);
            }
            PartitionKind::Shards => {
                self.partition.shards_per_client.get_or_insert(2);
            }
        }
        if self.model.kind == ModelKind::Mlp {
            self.model.hidden.get_or_insert(64);
        }
        match self.federation.algorithm {
            AlgorithmKind::FedProx => {
                self.federation.mu.get_or_insert(DEFAULT_MU);
            }
            AlgorithmKind::FedBss => {
                self.federation.variant.get_or_insert(SelectionVariant::Cosine);
            }
            AlgorithmKind::FedAvg => {}
        }
        Ok(())
    }

    /// Checks every invariant, reporting the first violated key.
    pub fn validate(&self) -> Result<()> {
        let d = &self.dataset;
        match d.source {
            DatasetSource::Synthetic => {
                if d.classes < 2 {
                    return Err(key_err("dataset.classes", "need at least 2 classes"));
                }
                if d.train_per_class == 0 {
                    return Err(key_err("dataset.train_per_class", "must be at least 1"));
                }
                if d.test_per_class == 0 {
                    return Err(key_err("dataset.test_per_class", "must be at least 1"));
                }
                if d.dim == 0 {
                    return Err(key_err("dataset.dim", "must be at least 1"));
                }
                if !(d.spread.is_finite() && d.spread > 0.0) {
                    return Err(key_err("dataset.spread", "must be positive and finite"));
                }
                for (key, path) in [
                    ("dataset.train_images", &d.train_images),
                    ("dataset.train_labels", &d.train_labels),
                    ("dataset.test_images", &d.test_images),
                    ("dataset.test_labels", &d.test_labels),
                ] {
                    if path.is_some() {
                        return Err(key_err(key, "only applies when source = \"idx\""));
                    }
                }
            }
            DatasetSource::Idx => {
                for (key, path) in [
                    ("dataset.train_images", &d.train_images),
                    ("dataset.train_labels", &d.train_labels),
                    ("dataset.test_images", &d.test_images),
                    ("dataset.test_labels", &d.test_labels),
                ] {
                    if path.is_none() {
                        return Err(key_err(key, "required when source = \"idx\""));
                    }
                }
            }
        }
        if !(0.0..=1.0).contains(&d.noise_ratio) || d.noise_ratio.is_nan() {
            return Err(key_err("dataset.noise_ratio", "must lie in [0, 1]"));
        }

        let p = &self.partition;
        match p.scheme {
            PartitionKind::Dirichlet => {
                let alpha = p.alpha.expect("resolved");
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(key_err("partition.alpha", "must be positive and finite"));
                }
                if p.shards_per_client.is_some() {
                    return Err(key_err(
                        "partition.shards_per_client",
                        "only applies when scheme = \"shards\"",
                    ));
                }
            }
            PartitionKind::Shards => {
                if p.shards_per_client.expect("resolved") == 0 {
                    return Err(key_err("partition.shards_per_client", "must be at least 1"));
                }
                if p.alpha.is_some() {
                    return Err(key_err(
                        "partition.alpha",
                        "only applies when scheme = \"dirichlet\"",
                    ));
                }
            }
        }

        let m = &self.model;
        match m.kind {
            ModelKind::Mlp => {
                if m.hidden.expect("resolved") == 0 {
                    return Err(key_err("model.hidden", "must be at least 1"));
                }
            }
            ModelKind::Softmax | ModelKind::Cnn => {
                if m.hidden.is_some() {
                    return Err(key_err("model.hidden", "only applies when kind = \"mlp\""));
                }
            }
        }

        let f = &self.federation;
        if f.clients == 0 {
            return Err(key_err("federation.clients", "must be at least 1"));
        }
        if !(f.participation > 0.0 && f.participation <= 1.0) {
            return Err(key_err("federation.participation", "must lie in (0, 1]"));
        }
        if f.rounds == 0 {
            return Err(key_err("federation.rounds", "must be at least 1"));
        }
        if f.warmup_rounds > f.rounds {
            return Err(key_err(
                "federation.warmup_rounds",
                format!("exceeds the {} total rounds", f.rounds),
            ));
        }
        if f.local_epochs == 0 {
            return Err(key_err("federation.local_epochs", "must be at least 1"));
        }
        if f.batch_size == 0 {
            return Err(key_err("federation.batch_size", "must be at least 1"));
        }
        match f.algorithm {
            AlgorithmKind::FedAvg => {
                if f.mu.is_some() {
                    return Err(key_err("federation.mu", "only applies when algorithm = \"fedprox\""));
                }
                if f.variant.is_some() {
                    return Err(key_err(
                        "federation.variant",
                        "only applies when algorithm = \"fedbss\"",
                    ));
                }
            }
            AlgorithmKind::FedProx => {
                let mu = f.mu.expect("resolved");
                if !(mu.is_finite() && mu >= 0.0) {
                    return Err(key_err("federation.mu", "must be non-negative and finite"));
                }
                if f.variant.is_some() {
                    return Err(key_err(
                        "federation.variant",
                        "only applies when algorithm = \"fedbss\"",
                    ));
                }
            }
            AlgorithmKind::FedBss => {
                if f.mu.is_some() {
                    return Err(key_err("federation.mu", "only applies when algorithm = \"fedprox\""));
                }
            }
        }

        let o = &self.optimizer;
        if !(o.learning_rate.is_finite() && o.learning_rate >= 0.0) {
            return Err(key_err("optimizer.learning_rate", "must be non-negative and finite"));
        }
        if !(o.momentum.is_finite() && (0.0..1.0).contains(&o.momentum)) {
            return Err(key_err("optimizer.momentum", "must lie in [0, 1)"));
        }
        if !(o.weight_decay.is_finite() && o.weight_decay >= 0.0) {
            return Err(key_err("optimizer.weight_decay", "must be non-negative and finite"));
        }

        if self.run.seeds.is_empty() {
            return Err(key_err("run.seeds", "need at least one seed"));
        }
        let mut seen = self.run.seeds.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.run.seeds.len() {
            return Err(key_err("run.seeds", "seeds must be unique"));
        }
        Ok(())
    }

    /// The federation configuration for one seed.
    pub fn federation_config(&self, seed: u64) -> FederationConfig {
        let f = &self.federation;
        let algorithm = match f.algorithm {
            AlgorithmKind::FedAvg => Algorithm::FedAvg,
            AlgorithmKind::FedProx => Algorithm::FedProx { mu: f.mu.expect("resolved") },
            AlgorithmKind::FedBss => {
                Algorithm::FedBss { variant: f.variant.expect("resolved") }
            }
        };
        FederationConfig {
            n_clients: f.clients,
            participation: f.participation,
            rounds_warmup: f.warmup_rounds,
            rounds_progressive: f.rounds - f.warmup_rounds,
            local_epochs: f.local_epochs,
            batch_size: f.batch_size,
            optimizer: SgdConfig {
                learning_rate: self.optimizer.learning_rate as f32,
                momentum: self.optimizer.momentum as f32,
                weight_decay: self.optimizer.weight_decay as f32,
            },
            algorithm,
            weighted_aggregation: f.weighted_aggregation,
            seed,
        }
    }

    /// The partitioning request for one seed.
    pub fn partition_spec(&self, seed: u64) -> PartitionSpec {
        match self.partition.scheme {
            PartitionKind::Dirichlet => PartitionSpec::dirichlet(
                self.federation.clients,
                self.partition.alpha.expect("resolved"),
                seed,
            ),
            PartitionKind::Shards => PartitionSpec::shards(
                self.federation.clients,
                self.partition.shards_per_client.expect("resolved"),
                seed,
            ),
        }
    }

    /// Loads (or generates) the train/test pair for one seed, with label
    /// noise already applied to the training labels.
    pub fn load_data(&self, seed: u64) -> Result<(Dataset, Dataset)> {
        let d = &self.dataset;
        let (train, test) = match d.source {
            DatasetSource::Synthetic => gaussian_mixture_split(
                d.classes,
                d.train_per_class,
                d.test_per_class,
                d.dim,
                d.spread,
                seed,
            )?,
            DatasetSource::Idx => {
                let train = load_idx(
                    d.train_images.as_ref().expect("validated"),
                    d.train_labels.as_ref().expect("validated"),
                )?;
                let test = load_idx(
                    d.test_images.as_ref().expect("validated"),
                    d.test_labels.as_ref().expect("validated"),
                )?;
                align_classes(train, test)?
            }
        };
        let train = if d.noise_ratio > 0.0 {
            inject_label_noise(&train, d.noise_ratio, seed)?
        } else {
            train
        };
        Ok((train, test))
    }

    /// Builds the architecture for the loaded training data.
    pub fn architecture(&self, train: &Dataset) -> Result<Architecture> {
        let shape = train.feature_shape();
        let classes = train.num_classes();
        match self.model.kind {
            ModelKind::Softmax => Architecture::softmax_regression(shape, classes),
            ModelKind::Mlp => {
                Architecture::mlp(shape, self.model.hidden.expect("resolved"), classes)
            }
            ModelKind::Cnn => Architecture::small_cnn(shape, classes),
        }
    }
}

/// Rebuilds two datasets over the union of their label ranges, so a model
/// sized for one can score the other.
fn align_classes(train: Dataset, test: Dataset) -> Result<(Dataset, Dataset)> {
    let classes = train.num_classes().max(test.num_classes());
    let retag = |d: Dataset| -> Result<Dataset> {
        if d.num_classes() == classes {
            Ok(d)
        } else {
            Dataset::new(d.samples().clone(), d.labels().to_vec(), classes)
        }
    };
    Ok((retag(train)?, retag(test)?))
}

/// Reads and fully resolves a config file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_toml_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[dataset]\nsource = \"synthetic\"\n[federation]\nalgorithm = \"fedavg\"\n";

    #[test]
    fn minimal_config_resolves_paper_defaults() {
        let c = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(c.federation.clients, 100);
        assert_eq!(c.federation.participation, 0.1);
        assert_eq!(c.federation.local_epochs, 10);
        assert_eq!(c.federation.batch_size, 64);
        assert_eq!(c.federation.rounds, 200);
        assert_eq!(c.federation.warmup_rounds, 50);
        assert_eq!(c.optimizer.learning_rate, 1e-3);
        assert_eq!(c.optimizer.momentum, 1e-4);
        assert_eq!(c.optimizer.weight_decay, 1e-5);
        assert_eq!(c.partition.scheme, PartitionKind::Dirichlet);
        assert_eq!(c.partition.alpha, Some(0.1));
        assert_eq!(c.model.kind, ModelKind::Mlp);
        assert_eq!(c.model.hidden, Some(64));
        assert_eq!(c.run.seeds, vec![0]);
        assert!(!c.run.dump_scores);
    }

    #[test]
    fn echo_round_trips_exactly() {
        let sources = [
            MINIMAL.to_string(),
            format!("{MINIMAL}[optimizer]\nlearning_rate = 0.05\n"),
            "[dataset]\nsource = \"synthetic\"\nclasses = 3\nnoise_ratio = 0.25\n\
             [partition]\nscheme = \"shards\"\n\
             [model]\nkind = \"softmax\"\n\
             [federation]\nalgorithm = \"fedbss\"\nclients = 7\n\
             [run]\nseeds = [3, 5]\ndump_scores = true\n"
                .to_string(),
        ];
        for src in sources {
            let parsed = ExperimentConfig::from_toml_str(&src).unwrap();
            let echoed = parsed.to_toml_string();
            let reparsed = ExperimentConfig::from_toml_str(&echoed).unwrap();
            assert_eq!(parsed, reparsed, "round-trip changed the config:\n{echoed}");
        }
    }

    #[test]
    fn unknown_keys_are_fatal() {
        let bad = format!("{MINIMAL}[run]\nseedz = [1]\n");
        let err = ExperimentConfig::from_toml_str(&bad).unwrap_err().to_string();
        assert!(err.contains("seedz"), "error did not name the key: {err}");

        let bad = "[dataset]\nsource = \"synthetic\"\nshape = 7\n[federation]\nalgorithm = \"fedavg\"\n";
        assert!(ExperimentConfig::from_toml_str(bad).is_err());
    }

    #[test]
    fn invalid_values_name_their_key() {
        let cases = [
            ("[partition]\nalpha = -1.0", "partition.alpha"),
            ("[partition]\nscheme = \"shards\"\nshards_per_client = 0", "partition.shards_per_client"),
            ("[run]\nseeds = []", "run.seeds"),
            ("[run]\nseeds = [1, 1]", "run.seeds"),
            ("[optimizer]\nmomentum = 1.0", "optimizer.momentum"),
            ("[model]\nkind = \"mlp\"\nhidden = 0", "model.hidden"),
        ];
        for (snippet, key) in cases {
            let text = format!("{MINIMAL}{snippet}\n");
            let err = ExperimentConfig::from_toml_str(&text).unwrap_err().to_string();
            assert!(err.contains(key), "expected {key} in error, got: {err}");
        }
        // Bad value inside the dataset section itself.
        let text = "[dataset]\nsource = \"synthetic\"\nnoise_ratio = 1.5\n[federation]\nalgorithm = \"fedavg\"\n";
        let err = ExperimentConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("dataset.noise_ratio"), "{err}");
    }

    #[test]
    fn cross_field_rules_are_enforced() {
        // mu with fedavg
        let text = "[dataset]\nsource = \"synthetic\"\n[federation]\nalgorithm = \"fedavg\"\nmu = 0.1\n";
        let err = ExperimentConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("federation.mu"), "{err}");

        // variant with fedprox
        let text = "[dataset]\nsource = \"synthetic\"\n[federation]\nalgorithm = \"fedprox\"\nvariant = \"cosine\"\n";
        let err = ExperimentConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("federation.variant"), "{err}");

        // idx paths with synthetic source
        let text = "[dataset]\nsource = \"synthetic\"\ntrain_images = \"x.idx\"\n[federation]\nalgorithm = \"fedavg\"\n";
        let err = ExperimentConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("dataset.train_images"), "{err}");

        // idx source missing paths
        let text = "[dataset]\nsource = \"idx\"\n[federation]\nalgorithm = \"fedavg\"\n";
        let err = ExperimentConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("dataset.train_images"), "{err}");

        // warmup exceeding total rounds
        let text = "[dataset]\nsource = \"synthetic\"\n[federation]\nalgorithm = \"fedavg\"\nrounds = 5\nwarmup_rounds = 6\n";
        let err = ExperimentConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("federation.warmup_rounds"), "{err}");

        // hidden with cnn
        let text = "[dataset]\nsource = \"synthetic\"\n[model]\nkind = \"cnn\"\nhidden = 3\n[federation]\nalgorithm = \"fedavg\"\n";
        let err = ExperimentConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("model.hidden"), "{err}");
    }

    #[test]
    fn fedprox_and_fedbss_resolve_their_defaults() {
        let text = "[dataset]\nsource = \"synthetic\"\n[federation]\nalgorithm = \"fedprox\"\n";
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(c.federation.mu, Some(DEFAULT_MU));
        match c.federation_config(0).algorithm {
            Algorithm::FedProx { mu } => assert_eq!(mu, DEFAULT_MU),
            other => panic!("wrong algorithm {other:?}"),
        }

        let text = "[dataset]\nsource = \"synthetic\"\n[federation]\nalgorithm = \"fedbss\"\n";
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(c.federation.variant, Some(SelectionVariant::Cosine));
    }

    #[test]
    fn conversions_build_consistent_library_types() {
        let text = "[dataset]\nsource = \"synthetic\"\nclasses = 3\ntrain_per_class = 5\n\
                    test_per_class = 2\ndim = 4\n\
                    [federation]\nalgorithm = \"fedavg\"\nclients = 4\nrounds = 3\nwarmup_rounds = 1\n";
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        let fc = c.federation_config(9);
        assert_eq!(fc.seed, 9);
        assert_eq!(fc.total_rounds(), 3);
        assert_eq!(fc.rounds_progressive, 2);
        fc.validate().unwrap();

        let spec = c.partition_spec(9);
        assert_eq!(spec.n_clients, 4);
        spec.validate().unwrap();

        let (train, test) = c.load_data(9).unwrap();
        assert_eq!(train.len(), 15);
        assert_eq!(test.len(), 6);
        let arch = c.architecture(&train).unwrap();
        assert_eq!(arch.input_shape(), &[4]);
        assert_eq!(arch.num_classes(), 3);

        // Identical seed, identical data.
        let (train2, _) = c.load_data(9).unwrap();
        assert_eq!(train.labels(), train2.labels());
    }
}
