//! Symmetric label-noise injection.
//!
//! Flips a seeded uniformly-random subset of labels to uniformly-random
//! *different* classes. The input dataset is untouched; callers get a new
//! dataset sharing nothing mutable with the original, so clean evaluation
//! data can never be corrupted by aliasing.

use rand::Rng;

use crate::data::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{stream, StreamKind};
use crate::util::floor_count;

/// Returns a copy of `dataset` with `floor(ratio * len)` labels flipped.
///
/// Each corrupted sample receives a label drawn uniformly from the other
/// `C - 1` classes, so a flip never maps a label to itself. `ratio` must lie
/// in `[0, 1]`; `ratio = 0` returns an identical dataset.
pub fn inject_label_noise(dataset: &Dataset, ratio: f64, seed: u64) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&ratio) || ratio.is_nan() {
        return Err(Error::Config(format!("noise ratio must lie in [0, 1], got {ratio}")));
    }
    let count = floor_count(ratio * dataset.len() as f64).min(dataset.len());
    let mut labels = dataset.labels().to_vec();
    if count > 0 {
        let classes = dataset.num_classes();
        let mut rng = stream(seed, StreamKind::Noise, &[]);
        let chosen = rand::seq::index::sample(&mut rng, dataset.len(), count);
        for i in chosen {
            // Uniform over the other classes: draw from C-1 slots and skip
            // past the current label.
            let r = rng.random_range(0..classes - 1);
            labels[i] = if r >= labels[i] { r + 1 } else { r };
        }
    }
    dataset.with_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synth::gaussian_mixture;

    fn flipped(a: &Dataset, b: &Dataset) -> usize {
        a.labels().iter().zip(b.labels()).filter(|(x, y)| x != y).count()
    }

    #[test]
    fn ratio_zero_changes_nothing() {
        let d = gaussian_mixture(3, 10, 2, 1.0, 0).unwrap();
        let noisy = inject_label_noise(&d, 0.0, 1).unwrap();
        assert_eq!(d, noisy);
    }

    #[test]
    fn ratio_one_two_classes_flips_everything() {
        let d = gaussian_mixture(2, 15, 2, 1.0, 0).unwrap();
        let noisy = inject_label_noise(&d, 1.0, 1).unwrap();
        assert_eq!(flipped(&d, &noisy), d.len());
        for (a, b) in d.labels().iter().zip(noisy.labels()) {
            assert_eq!(*b, 1 - *a);
        }
    }

    #[test]
    fn flip_count_is_exact() {
        let d = gaussian_mixture(5, 200, 2, 1.0, 0).unwrap();
        assert_eq!(d.len(), 1000);
        // 0.3 * 1000 must be exactly 300 despite its inexact representation.
        let noisy = inject_label_noise(&d, 0.3, 7).unwrap();
        assert_eq!(flipped(&d, &noisy), 300);
    }

    #[test]
    fn never_maps_to_itself_many_classes() {
        let d = gaussian_mixture(7, 40, 2, 1.0, 2).unwrap();
        let noisy = inject_label_noise(&d, 1.0, 5).unwrap();
        assert_eq!(flipped(&d, &noisy), d.len());
        for &l in noisy.labels() {
            assert!(l < 7);
        }
    }

    #[test]
    fn deterministic_per_seed_and_original_untouched() {
        let d = gaussian_mixture(4, 25, 2, 1.0, 3).unwrap();
        let before = d.clone();
        let a = inject_label_noise(&d, 0.5, 11).unwrap();
        let b = inject_label_noise(&d, 0.5, 11).unwrap();
        let c = inject_label_noise(&d, 0.5, 12).unwrap();
        assert_eq!(d, before);
        assert_eq!(a, b);
        assert_ne!(a.labels(), c.labels());
    }

    #[test]
    fn invalid_ratio_is_rejected() {
        let d = gaussian_mixture(2, 5, 2, 1.0, 0).unwrap();
        assert!(inject_label_noise(&d, -0.1, 0).is_err());
        assert!(inject_label_noise(&d, 1.1, 0).is_err());
        assert!(inject_label_noise(&d, f64::NAN, 0).is_err());
    }
}
