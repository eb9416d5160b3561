//! Progressive inclusion schedule.
//!
//! Within one round a client trains for `e_total` local epochs. Every epoch
//! always sees the full unbiased set; biased samples are admitted gradually,
//! lowest loss first, so that the model learns easy and trusted samples
//! before hard and possibly mislabelled ones. The default pace is a cosine
//! ramp (slow start, fast middle, slow finish); a linear ramp and a pure
//! filter (never admit biased samples) exist for comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selection::score::SampleScoreTable;
use crate::util::floor_count;

/// How biased samples are admitted across local epochs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionVariant {
    /// Drop biased samples entirely, every epoch.
    Filter,
    /// Admit biased samples linearly in the epoch index.
    Linear,
    /// Admit biased samples along the cosine ramp (the default).
    Cosine,
}

impl std::fmt::Display for SelectionVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SelectionVariant::Filter => "filter",
            SelectionVariant::Linear => "linear",
            SelectionVariant::Cosine => "cosine",
        })
    }
}

/// The samples one local epoch trains on.
///
/// Always contains the full unbiased set; the biased tail grows with the
/// epoch (under the cosine/linear variants) until, at `epoch == epoch_total`,
/// it covers the whole client.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochTrainingSet {
    /// Selected sample indices, in ascending loss order.
    pub indices: Vec<usize>,
    /// 1-based epoch this set belongs to.
    pub epoch: usize,
    /// Total local epochs in the round.
    pub epoch_total: usize,
    /// Schedule coefficient used: the admitted fraction of the biased set.
    pub alpha: f64,
}

/// The cosine ramp `(1 − cos(π · e / e_total)) / 2`.
///
/// Monotone non-decreasing in `e`, with `schedule_alpha(0, n) = 0` and
/// `schedule_alpha(n, n) = 1` exactly.
pub fn schedule_alpha(e: usize, e_total: usize) -> Result<f64> {
    if e_total == 0 || e > e_total {
        return Err(Error::Schedule { epoch: e, total: e_total });
    }
    if e == 0 {
        return Ok(0.0);
    }
    if e == e_total {
        return Ok(1.0);
    }
    Ok((1.0 - (std::f64::consts::PI * e as f64 / e_total as f64).cos()) / 2.0)
}

/// Builds the training set for epoch `e` of `e_total` under the cosine ramp.
///
/// The epoch range is mapped onto the ramp as `schedule_alpha(e − 1,
/// e_total − 1)`, so the first epoch trains on the unbiased set alone and the
/// final epoch on every sample. A single-epoch round (`e_total == 1`) uses
/// everything at once.
pub fn epoch_training_set(table: &SampleScoreTable, e: usize, e_total: usize) -> Result<EpochTrainingSet> {
    strategy_variant(table, e, e_total, SelectionVariant::Cosine)
}

/// Builds the training set for epoch `e` of `e_total` under `variant`.
///
/// All variants keep the full unbiased set and admit a prefix of the biased
/// set in ascending loss order; they differ only in how fast the admitted
/// fraction grows. See [`epoch_training_set`] for the cosine epoch mapping;
/// the linear ramp uses `(e − 1) / (e_total − 1)` and the filter admits
/// nothing.
pub fn strategy_variant(
    table: &SampleScoreTable,
    e: usize,
    e_total: usize,
    variant: SelectionVariant,
) -> Result<EpochTrainingSet> {
    if e == 0 || e_total == 0 || e > e_total {
        return Err(Error::Schedule { epoch: e, total: e_total });
    }
    let alpha = match variant {
        SelectionVariant::Filter => 0.0,
        // With a single epoch there is no ramp to spread over: train on
        // everything immediately.
        SelectionVariant::Linear | SelectionVariant::Cosine if e_total == 1 => 1.0,
        SelectionVariant::Linear => (e - 1) as f64 / (e_total - 1) as f64,
        SelectionVariant::Cosine => schedule_alpha(e - 1, e_total - 1)?,
    };
    let admitted = floor_count(alpha * table.biased().len() as f64);
    let included = table.unbiased().len() + admitted;
    let indices = table.entries()[..included].iter().map(|s| s.sample).collect();
    Ok(EpochTrainingSet {
        indices,
        epoch: e,
        epoch_total: e_total,
        alpha,
    })
}
