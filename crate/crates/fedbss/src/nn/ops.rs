//! Classification head: softmax, cross-entropy, argmax.
//!
//! These are the numerically delicate spots of the whole pipeline, so they
//! live in one place. The softmax subtracts the row maximum before
//! exponentiating (standard overflow guard) and then nudges any probability
//! that rounded to exactly 0 or 1 back into the open interval, so that the
//! log in the cross-entropy is always finite and downstream code can rely on
//! strictly positive probabilities.

use crate::error::{Error, Result};
use crate::nn::real::Real;

/// Numerically stable softmax over one logit row.
///
/// Every output lies strictly inside `(0, 1)`: after max-subtraction and
/// normalization, values that rounded to `0` are clamped to the smallest
/// positive normal and values that rounded to `>= 1` to the largest
/// representable value below one. The nudge is at most one ulp, so the row
/// still sums to one within normal rounding error.
///
/// # Panics
/// If `logits` is empty or contains a non-finite value.
pub fn softmax<T: Real>(logits: &[T]) -> Vec<T> {
    assert!(!logits.is_empty(), "softmax of empty logit row");
    let mut max = logits[0];
    for &z in &logits[1..] {
        if z > max {
            max = z;
        }
    }
    assert!(max.is_finite(), "softmax over non-finite logits");

    let mut out: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let mut sum = T::zero();
    for &e in &out {
        sum = sum + e;
    }
    // The max-shifted exponentials include one exact 1.0, so sum >= 1.
    let one = T::one();
    let below_one = one - T::epsilon() / (one + one);
    for p in &mut out {
        *p = *p / sum;
        if *p < T::min_positive_value() {
            *p = T::min_positive_value();
        } else if *p >= one {
            *p = below_one;
        }
    }
    out
}

/// Cross-entropy loss `-ln(p[label])` for one probability row.
///
/// Probabilities are expected to come from [`softmax`], so the picked entry
/// is strictly positive and the result is always finite. The log is taken in
/// `f64` regardless of the activation scalar so that accumulated sums do not
/// lose precision.
pub fn cross_entropy<T: Real>(probs: &[T], label: usize) -> Result<f64> {
    if label >= probs.len() {
        return Err(Error::LabelOutOfRange {
            label,
            classes: probs.len(),
        });
    }
    let p = probs[label].to_f64();
    debug_assert!(p > 0.0, "cross_entropy expects probabilities from softmax");
    Ok(-p.max(f64::MIN_POSITIVE).ln())
}

/// Index of the largest value; ties resolve to the lowest index.
///
/// # Panics
/// If `row` is empty.
pub fn argmax<T: Real>(row: &[T]) -> usize {
    assert!(!row.is_empty(), "argmax of empty row");
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        // Strict comparison keeps the earliest index on ties.
        if v > row[best] {
            best = i;
        }
    }
    best
}
