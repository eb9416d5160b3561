//! In-memory labelled dataset.
//!
//! Samples are stored as one tensor whose first axis indexes samples; labels
//! are a parallel `Vec<usize>`. Datasets are immutable after construction —
//! transformations like label noise return new datasets — which is what lets
//! partitions refer to samples by index without defensive copies.

use crate::error::{Error, Result};
use crate::nn::Tensor;

/// Immutable labelled dataset over `f32` features.
///
/// Invariants, checked at construction: the sample tensor's first axis
/// matches the label count, every label is below `num_classes`, and
/// `num_classes >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Tensor<f32>,
    labels: Vec<usize>,
    num_classes: usize,
}

impl Dataset {
    /// Builds a dataset, validating labels against `num_classes`.
    pub fn new(samples: Tensor<f32>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if samples.shape().len() < 2 {
            return Err(Error::shape(
                "Dataset::new",
                "rank >= 2 (samples x features)",
                samples.shape(),
            ));
        }
        if samples.rows() != labels.len() {
            return Err(Error::shape(
                "Dataset::new",
                format!("{} labels", samples.rows()),
                format!("{} labels", labels.len()),
            ));
        }
        if num_classes < 2 {
            return Err(Error::Config(format!(
                "a classification dataset needs at least 2 classes, got {num_classes}"
            )));
        }
        for &l in &labels {
            if l >= num_classes {
                return Err(Error::LabelOutOfRange {
                    label: l,
                    classes: num_classes,
                });
            }
        }
        Ok(Dataset {
            samples,
            labels,
            num_classes,
        })
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// True when the dataset holds no samples.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Shape of one sample (without the leading sample axis).
    pub fn feature_shape(&self) -> &[usize] {
        &self.samples.shape()[1..]
    }

    /// Number of label classes.
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// All labels, indexed by sample.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// The full sample tensor.
    pub fn samples(&self) -> &Tensor<f32> {
        &self.samples
    }

    /// Label of one sample.
    ///
    /// # Panics
    /// If `i` is out of range.
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Copies the given samples into a batch tensor plus parallel labels.
    ///
    /// # Panics
    /// If any index is out of range.
    pub fn gather(&self, indices: &[usize]) -> (Tensor<f32>, Vec<usize>) {
        let mut shape = vec![indices.len()];
        shape.extend_from_slice(self.feature_shape());
        let row = self.samples.row_len();
        let mut data = Vec::with_capacity(indices.len() * row);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.samples.row(i));
            labels.push(self.labels[i]);
        }
        let batch = Tensor::new(shape, data).expect("shape computed from inputs");
        (batch, labels)
    }

    /// Per-class sample counts over a subset (or the whole set).
    pub fn label_histogram(&self, indices: &[usize]) -> Vec<usize> {
        let mut hist = vec![0usize; self.num_classes];
        for &i in indices {
            hist[self.labels[i]] += 1;
        }
        hist
    }

    /// Replaces the labels wholesale (used by noise injection). Length and
    /// range are re-validated.
    pub(crate) fn with_labels(&self, labels: Vec<usize>) -> Result<Self> {
        Dataset::new(self.samples.clone(), labels, self.num_classes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        let samples = Tensor::new(vec![4, 2], vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]).unwrap();
        Dataset::new(samples, vec![0, 1, 1, 2], 3).unwrap()
    }

    #[test]
    fn construction_validates_inputs() {
        let samples = Tensor::new(vec![2, 2], vec![0.0; 4]).unwrap();
        assert!(Dataset::new(samples.clone(), vec![0], 2).is_err());
        assert!(Dataset::new(samples.clone(), vec![0, 2], 2).is_err());
        assert!(Dataset::new(samples.clone(), vec![0, 0], 1).is_err());
        assert!(Dataset::new(samples, vec![0, 1], 2).is_ok());
        let flat = Tensor::new(vec![4], vec![0.0; 4]).unwrap();
        assert!(Dataset::new(flat, vec![0; 4], 2).is_err());
    }

    #[test]
    fn gather_preserves_order_and_repeats() {
        let d = toy();
        let (batch, labels) = d.gather(&[2, 0, 2]);
        assert_eq!(batch.shape(), &[3, 2]);
        assert_eq!(batch.row(0), &[4.0, 5.0]);
        assert_eq!(batch.row(1), &[0.0, 1.0]);
        assert_eq!(batch.row(2), &[4.0, 5.0]);
        assert_eq!(labels, vec![1, 0, 1]);
    }

    #[test]
    fn histogram_counts_subset() {
        let d = toy();
        assert_eq!(d.label_histogram(&[0, 1, 2, 3]), vec![1, 2, 1]);
        assert_eq!(d.label_histogram(&[1, 2]), vec![0, 2, 0]);
        assert_eq!(d.label_histogram(&[]), vec![0, 0, 0]);
    }
}
