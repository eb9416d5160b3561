//! Per-sample scoring under the global model.
//!
//! At the start of a progressive round each client evaluates the freshly
//! received global model on every local sample — forward pass only — and
//! records two numbers per sample: the cross-entropy loss and an uncertainty
//! score `1 − (max p − min p)` over the softmax probabilities. The samples
//! are then sorted by loss, and the sorted position with the highest
//! uncertainty becomes the *classification point*: samples at or below it
//! count as unbiased (the model is confident and right-ish about them),
//! samples above it as biased (suspiciously hard, possibly mislabelled).

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::nn::{cross_entropy, Model, Real};

/// Score of a single sample under the global model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreEntry {
    /// Index of the sample in the parent dataset.
    pub sample: usize,
    /// Cross-entropy of the global model on this sample.
    pub loss: f64,
    /// `1 − (max p − min p)`; 1 means a uniform prediction, near 0 a
    /// one-hot prediction.
    pub uncertainty: f64,
}

/// Loss-sorted score entries plus the classification point.
///
/// Invariants (checked at construction): entries non-empty, losses finite and
/// sorted non-decreasing (equal losses keep their pre-sort order),
/// uncertainties in `[0, 1]`, and `split_pos < len`. Entries at positions
/// `0..=split_pos` are the unbiased set; the rest are the biased set.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleScoreTable {
    entries: Vec<ScoreEntry>,
    split_pos: usize,
}

impl SampleScoreTable {
    /// Builds a table from unordered entries: stable-sorts by loss and
    /// places the classification point via [`split_point`].
    pub fn from_entries(mut entries: Vec<ScoreEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Config("a score table needs at least one entry".into()));
        }
        for e in &entries {
            if !e.loss.is_finite() {
                return Err(Error::Config(format!(
                    "sample {} has non-finite loss {}",
                    e.sample, e.loss
                )));
            }
            if !(0.0..=1.0).contains(&e.uncertainty) {
                return Err(Error::Config(format!(
                    "sample {} has uncertainty {} outside [0, 1]",
                    e.sample, e.uncertainty
                )));
            }
        }
        // Stable sort: equal losses keep their incoming order, which keeps
        // tables reproducible across runs.
        entries.sort_by(|a, b| a.loss.partial_cmp(&b.loss).expect("losses are finite"));
        let split_pos = split_point(&entries);
        Ok(SampleScoreTable { entries, split_pos })
    }

    /// Entries in ascending loss order.
    pub fn entries(&self) -> &[ScoreEntry] {
        &self.entries
    }

    /// Position of the classification point within the sorted order.
    pub fn split_pos(&self) -> usize {
        self.split_pos
    }

    /// Number of scored samples.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when the table is empty (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The unbiased entries: sorted positions `0..=split_pos`.
    pub fn unbiased(&self) -> &[ScoreEntry] {
        &self.entries[..=self.split_pos]
    }

    /// The biased entries: sorted positions after the classification point.
    pub fn biased(&self) -> &[ScoreEntry] {
        &self.entries[self.split_pos + 1..]
    }
}

/// Returns the sorted position with the maximum uncertainty; ties break to
/// the smallest position (lowest loss).
///
/// # Panics
/// If `entries` is empty.
pub fn split_point(entries: &[ScoreEntry]) -> usize {
    assert!(!entries.is_empty(), "split_point over no entries");
    let mut best = 0;
    for (i, e) in entries.iter().enumerate().skip(1) {
        if e.uncertainty > entries[best].uncertainty {
            best = i;
        }
    }
    best
}

/// Uncertainty of one probability row: `1 − (max p − min p)`.
///
/// For any probability vector the result lies in `[0, 1]`: 1 exactly when
/// the distribution is uniform, approaching 0 as it approaches one-hot.
pub fn uncertainty<T: Real>(probs: &[T]) -> f64 {
    assert!(!probs.is_empty(), "uncertainty of empty probability row");
    let mut max = probs[0].to_f64();
    let mut min = max;
    for &p in &probs[1..] {
        let p = p.to_f64();
        if p > max {
            max = p;
        }
        if p < min {
            min = p;
        }
    }
    1.0 - (max - min)
}

/// Scores `indices` of `data` under `model` and builds the sorted table.
///
/// Evaluation only: the model is never mutated (it is taken by shared
/// reference and the forward pass allocates its own scratch). Deterministic
/// in all inputs.
pub fn score_samples(model: &Model<f32>, data: &Dataset, indices: &[usize]) -> Result<SampleScoreTable> {
    if indices.is_empty() {
        return Err(Error::Config("cannot score an empty sample set".into()));
    }
    let mut entries = Vec::with_capacity(indices.len());
    for chunk in indices.chunks(256) {
        let (batch, labels) = data.gather(chunk);
        let probs = model.predict_proba(&batch)?;
        for (row, (&sample, &label)) in chunk.iter().zip(&labels).enumerate() {
            let p = probs.row(row);
            entries.push(ScoreEntry {
                sample,
                loss: cross_entropy(p, label)?,
                uncertainty: uncertainty(p),
            });
        }
    }
    SampleScoreTable::from_entries(entries)
}

/// One line of a score dump: everything needed to reconstruct a client's
/// table for one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    /// Federation round the table was computed in.
    pub round: usize,
    /// Client that owns the sample.
    pub client: usize,
    /// Sample index into the parent dataset.
    pub sample: usize,
    /// Loss under the round's global model.
    pub loss: f64,
    /// Uncertainty under the round's global model.
    pub uncertainty: f64,
    /// True when the sample fell above the classification point.
    pub biased: bool,
}

impl ScoreRecord {
    /// Flattens a table into dump records, in ascending loss order.
    pub fn from_table(round: usize, client: usize, table: &SampleScoreTable) -> Vec<ScoreRecord> {
        table
            .entries()
            .iter()
            .enumerate()
            .map(|(pos, e)| ScoreRecord {
                round,
                client,
                sample: e.sample,
                loss: e.loss,
                uncertainty: e.uncertainty,
                biased: pos > table.split_pos(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Architecture, Tensor};

    fn entry(sample: usize, loss: f64, uncertainty: f64) -> ScoreEntry {
        ScoreEntry { sample, loss, uncertainty }
    }

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    /// Fixed softmax-regression model shared by the scoring oracle tests.
    fn oracle_model() -> Model<f32> {
        let arch = Architecture::softmax_regression(&[2], 3).unwrap();
        let mut params = arch.param_template::<f32>();
        params
            .copy_from_flat(&[0.9, -0.4, -0.3, 0.6, 0.2, 0.2, 0.1, 0.0, -0.1])
            .unwrap();
        Model::from_params(arch, params).unwrap()
    }

    fn oracle_data() -> Dataset {
        let samples = Tensor::new(
            vec![5, 2],
            vec![1.5, 0.2, -0.8, 1.1, 0.3, -0.9, 2.0, 2.0, -1.0, -1.0],
        )
        .unwrap();
        Dataset::new(samples, vec![0, 1, 2, 0, 1], 3).unwrap()
    }

    #[test]
    fn scoring_matches_independent_oracle() {
        // Expected values computed by a separate script implementing
        // softmax, cross-entropy, the uncertainty formula, and a stable
        // loss sort from scratch.
        let table = score_samples(&oracle_model(), &oracle_data(), &[0, 1, 2, 3, 4]).unwrap();

        let expected_losses = [
            (0, 0.409_269_050_9),
            (1, 0.426_238_673_2),
            (3, 0.822_793_218_7),
            (4, 1.001_942_848_2),
            (2, 1.446_768_362_1),
        ];
        let expected_uncertainty = [
            0.457_191_095_6,
            0.439_014_502_7,
            0.827_187_026_7,
            0.933_444_204_2,
            0.547_682_603_9,
        ];
        assert_eq!(table.len(), 5);
        for (i, ((sample, loss), unc)) in expected_losses.iter().zip(expected_uncertainty).enumerate() {
            assert_eq!(table.entries()[i].sample, *sample);
            assert_close(table.entries()[i].loss, *loss, 1e-5);
            assert_close(table.entries()[i].uncertainty, unc, 1e-5);
        }
        // Sample 4 has the highest uncertainty and sits at sorted position 3.
        assert_eq!(table.split_pos(), 3);
        assert_eq!(table.unbiased().len(), 4);
        assert_eq!(table.biased().len(), 1);
        assert_eq!(table.biased()[0].sample, 2);
    }

    #[test]
    fn zero_model_scores_uniform() {
        let arch = Architecture::softmax_regression(&[2], 3).unwrap();
        let model = Model::from_params(arch.clone(), arch.param_template()).unwrap();
        let table = score_samples(&model, &oracle_data(), &[0, 1, 2, 3, 4]).unwrap();
        for e in table.entries() {
            assert_close(e.loss, (3.0f64).ln(), 1e-6);
            assert_eq!(e.uncertainty, 1.0);
        }
        // All uncertainties tie, so the split point sits at the lowest loss.
        assert_eq!(table.split_pos(), 0);
    }

    #[test]
    fn uncertainty_formula_direct() {
        assert_close(uncertainty(&[0.7f64, 0.2, 0.1]), 0.4, 1e-12);
        assert_close(uncertainty(&[0.25f64; 4]), 1.0, 1e-12);
        assert_close(uncertainty(&[0.999f64, 0.001]), 0.002, 1e-12);
    }

    #[test]
    fn scoring_is_read_only() {
        let model = oracle_model();
        let before = model.params().clone();
        let _ = score_samples(&model, &oracle_data(), &[0, 1, 2, 3, 4]).unwrap();
        assert!(model.params().bit_identical(&before));
    }

    #[test]
    fn scoring_is_deterministic_and_subset_aware() {
        let model = oracle_model();
        let data = oracle_data();
        let a = score_samples(&model, &data, &[0, 2, 4]).unwrap();
        let b = score_samples(&model, &data, &[0, 2, 4]).unwrap();
        assert_eq!(a, b);
        let samples: Vec<usize> = a.entries().iter().map(|e| e.sample).collect();
        assert_eq!(samples.len(), 3);
        for s in samples {
            assert!([0, 2, 4].contains(&s));
        }
    }

    #[test]
    fn empty_selection_is_rejected() {
        assert!(score_samples(&oracle_model(), &oracle_data(), &[]).is_err());
    }

    #[test]
    fn split_point_examples() {
        let e = |u: f64| entry(0, 1.0, u);
        assert_eq!(split_point(&[e(0.2), e(0.9), e(0.4)]), 1);
        assert_eq!(split_point(&[e(0.5)]), 0);
        assert_eq!(split_point(&[e(0.3), e(0.3), e(0.3)]), 0);
    }

    #[test]
    fn from_entries_sorts_stably_and_validates() {
        // Two equal losses: sample 7 arrives before sample 3 and must stay
        // ahead after sorting.
        let table = SampleScoreTable::from_entries(vec![
            entry(5, 2.0, 0.5),
            entry(7, 1.0, 0.4),
            entry(3, 1.0, 0.6),
        ])
        .unwrap();
        let order: Vec<usize> = table.entries().iter().map(|e| e.sample).collect();
        assert_eq!(order, vec![7, 3, 5]);

        assert!(SampleScoreTable::from_entries(vec![]).is_err());
        assert!(SampleScoreTable::from_entries(vec![entry(0, f64::NAN, 0.5)]).is_err());
        assert!(SampleScoreTable::from_entries(vec![entry(0, 1.0, 1.5)]).is_err());
        assert!(SampleScoreTable::from_entries(vec![entry(0, 1.0, -0.1)]).is_err());
    }

    #[test]
    fn score_records_carry_the_biased_flag() {
        let table = SampleScoreTable::from_entries(vec![
            entry(10, 0.1, 0.2),
            entry(11, 0.2, 0.9),
            entry(12, 0.3, 0.4),
        ])
        .unwrap();
        assert_eq!(table.split_pos(), 1);
        let records = ScoreRecord::from_table(4, 2, &table);
        assert_eq!(records.len(), 3);
        assert!(records.iter().all(|r| r.round == 4 && r.client == 2));
        assert_eq!(
            records.iter().map(|r| r.biased).collect::<Vec<_>>(),
            vec![false, false, true]
        );
        assert_eq!(records[2].sample, 12);
    }
}
