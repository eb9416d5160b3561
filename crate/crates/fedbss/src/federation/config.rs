//! Federation-level configuration.

use crate::error::{Error, Result};
use crate::nn::SgdConfig;
use crate::selection::SelectionVariant;
use crate::util::ceil_count;

/// Which algorithm drives local training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    /// Plain local SGD in every round.
    FedAvg,
    /// Plain local SGD plus a proximal pull toward the global parameters,
    /// applied in every round (the algorithm has no stage structure).
    FedProx {
        /// Proximal coefficient; must be non-negative and finite.
        mu: f64,
    },
    /// Two-stage training: plain SGD during warmup, bias-aware progressive
    /// sample selection afterwards.
    FedBss {
        /// Admission schedule for biased samples.
        variant: SelectionVariant,
    },
}

impl Algorithm {
    /// Short lowercase name (matches the config-file vocabulary).
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::FedAvg => "fedavg",
            Algorithm::FedProx { .. } => "fedprox",
            Algorithm::FedBss { .. } => "fedbss",
        }
    }
}

/// Everything the round loop needs to know.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FederationConfig {
    /// Total number of clients.
    pub n_clients: usize,
    /// Fraction of clients drawn each round, in `(0, 1]`.
    pub participation: f64,
    /// Warmup rounds (stage 1): every algorithm trains on all samples.
    pub rounds_warmup: usize,
    /// Progressive rounds (stage 2): the configured algorithm's own trainer.
    pub rounds_progressive: usize,
    /// Local epochs per client per round.
    pub local_epochs: usize,
    /// Mini-batch size for local SGD.
    pub batch_size: usize,
    /// Local optimizer hyper-parameters.
    pub optimizer: SgdConfig<f32>,
    /// Local training algorithm.
    pub algorithm: Algorithm,
    /// When true, aggregation weights clients by sample count instead of the
    /// default unweighted mean over selected clients.
    pub weighted_aggregation: bool,
    /// Master seed; every random decision in the run derives from it.
    pub seed: u64,
}

impl FederationConfig {
    /// Validates all invariants, returning the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.n_clients == 0 {
            return Err(Error::Config("n_clients must be at least 1".into()));
        }
        if !(self.participation > 0.0 && self.participation <= 1.0) {
            return Err(Error::Config(format!(
                "participation must lie in (0, 1], got {}",
                self.participation
            )));
        }
        if self.rounds_warmup + self.rounds_progressive == 0 {
            return Err(Error::Config("total rounds must be at least 1".into()));
        }
        if self.local_epochs == 0 {
            return Err(Error::Config("local_epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        self.optimizer.validate()?;
        if let Algorithm::FedProx { mu } = self.algorithm {
            if !(mu.is_finite() && mu >= 0.0) {
                return Err(Error::Config(format!(
                    "fedprox mu must be non-negative and finite, got {mu}"
                )));
            }
        }
        Ok(())
    }

    /// Number of clients drawn each round: `ceil(participation · N)`,
    /// clamped into `[1, N]`.
    pub fn participants_per_round(&self) -> usize {
        ceil_count(self.participation * self.n_clients as f64).clamp(1, self.n_clients)
    }

    /// Warmup plus progressive rounds.
    pub fn total_rounds(&self) -> usize {
        self.rounds_warmup + self.rounds_progressive
    }
}
