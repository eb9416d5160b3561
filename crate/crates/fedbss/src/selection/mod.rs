//! Bias-aware sample selection.
//!
//! The selection pipeline runs once per client per progressive round:
//!
//! 1. [`score_samples`] — evaluate the received global model on the client's
//!    samples, recording loss and uncertainty per sample.
//! 2. [`split_point`] — sort by loss; the sorted position with maximum
//!    uncertainty splits the samples into an unbiased head and a biased tail.
//! 3. [`epoch_training_set`] — per local epoch, train on the unbiased head
//!    plus a growing lowest-loss prefix of the biased tail, paced by the
//!    cosine ramp [`schedule_alpha`] (or a [`SelectionVariant`] alternative).

pub mod schedule;
pub mod score;

pub use schedule::{
    epoch_training_set, schedule_alpha, strategy_variant, EpochTrainingSet, SelectionVariant,
};
pub use score::{score_samples, split_point, uncertainty, SampleScoreTable, ScoreEntry, ScoreRecord};
