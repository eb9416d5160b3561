//! Server-side aggregation of client parameter vectors.
//!
//! Both aggregators accumulate in `f64` regardless of the parameter scalar
//! so the result is independent of client order (addition of promoted
//! values loses no precision for `f32` inputs, and the final division
//! happens once).

use crate::error::{Error, Result};
use crate::nn::{ParamVector, Real};

fn check_inputs<T: Real>(updates: &[ParamVector<T>]) -> Result<()> {
    let first = updates
        .first()
        .ok_or_else(|| Error::Config("aggregation needs at least one update".into()))?;
    for u in &updates[1..] {
        if !first.aligned_with(u) {
            return Err(Error::shape(
                "aggregate",
                "parameter vectors with identical layouts",
                "misaligned update",
            ));
        }
    }
    Ok(())
}

fn mean_with<T: Real>(
    updates: &[ParamVector<T>],
    weight: impl Fn(usize) -> f64,
) -> Result<ParamVector<T>> {
    check_inputs(updates)?;
    let mut acc = vec![0.0f64; updates[0].total_len()];
    let mut total = 0.0f64;
    for (k, u) in updates.iter().enumerate() {
        let w = weight(k);
        total += w;
        for (a, v) in acc.iter_mut().zip(u.iter_flat()) {
            *a += w * v.to_f64();
        }
    }
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Config(format!(
            "aggregation weights must sum to a positive finite value, got {total}"
        )));
    }
    let mut out = updates[0].clone();
    out.copy_from_flat(&acc.iter().map(|a| T::from_f64(*a / total)).collect::<Vec<_>>())?;
    Ok(out)
}

/// Unweighted mean of the given parameter vectors.
pub fn aggregate_mean<T: Real>(updates: &[ParamVector<T>]) -> Result<ParamVector<T>> {
    mean_with(updates, |_| 1.0)
}

/// Sample-count-weighted mean: update `k` contributes proportionally to
/// `counts[k]`.
pub fn aggregate_weighted<T: Real>(
    updates: &[ParamVector<T>],
    counts: &[usize],
) -> Result<ParamVector<T>> {
    if counts.len() != updates.len() {
        return Err(Error::Config(format!(
            "got {} updates but {} sample counts",
            updates.len(),
            counts.len()
        )));
    }
    mean_with(updates, |k| counts[k] as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{ParamKind, Segment, SegmentId, Tensor};

    fn vector_of(values: &[f32]) -> ParamVector<f32> {
        ParamVector::new(vec![Segment {
            id: SegmentId { layer: 0, kind: ParamKind::Weight },
            tensor: Tensor::new(vec![values.len()], values.to_vec()).unwrap(),
        }])
    }

    #[test]
    fn mean_of_two_vectors() {
        let a = vector_of(&[1.0, 3.0]);
        let b = vector_of(&[3.0, 5.0]);
        let m = aggregate_mean(&[a, b]).unwrap();
        assert_eq!(m.to_flat(), vec![2.0, 4.0]);
    }

    #[test]
    fn single_update_is_identity() {
        let a = vector_of(&[0.25, -7.5, 1e-3, 42.0]);
        let m = aggregate_mean(std::slice::from_ref(&a)).unwrap();
        assert!(m.bit_identical(&a));
    }

    #[test]
    fn identical_copies_average_to_themselves() {
        let a = vector_of(&[0.1, 0.2, 0.3, -0.4]);
        for k in [2usize, 3, 7] {
            let copies = vec![a.clone(); k];
            let m = aggregate_mean(&copies).unwrap();
            // k * x / k is exact in f64 for f32-representable x.
            assert!(m.bit_identical(&a), "mean of {k} copies drifted");
        }
    }

    #[test]
    fn means_match_independent_f64_computation() {
        let rows: [[f32; 6]; 10] = [
            [1.6662, -1.5748, 1.9457, 2.7945, 2.8356, -0.2793],
            [0.6543, 1.6532, 0.8497, 1.3321, -2.7898, -1.2093],
            [-2.6489, 2.1424, -0.7629, 1.0791, -1.4623, -0.9145],
            [-2.9435, -0.8500, 2.6946, -1.6926, -1.0837, 2.5066],
            [-2.8086, -2.6095, 0.7790, 2.2429, -2.9477, 1.4795],
            [1.8770, -2.5457, 0.9387, 0.0556, -0.1207, 2.7334],
            [-2.9999, -1.5181, 1.2734, -1.0525, -1.3380, 1.1727],
            [2.5113, -1.5331, -0.2515, -1.4820, -0.7240, 0.6272],
            [1.6343, -2.5925, 1.1165, 0.2896, -2.1721, -2.4075],
            [-1.5266, -2.0893, 2.5560, 1.0806, -1.5740, 0.4133],
        ];
        let updates: Vec<_> = rows.iter().map(|r| vector_of(r)).collect();
        let counts = [3usize, 1, 4, 1, 5, 9, 2, 6, 5, 3];

        let mean = aggregate_mean(&updates).unwrap();
        let expected = [
            -0.45844000577926636,
            -1.1517399549484253,
            1.113919973373413,
            0.46472999453544617,
            -1.1376700401306152,
            0.41221001744270325,
        ];
        for (got, want) in mean.iter_flat().zip(expected) {
            assert_eq!(got as f64, want);
        }

        let weighted = aggregate_weighted(&updates, &counts).unwrap();
        let expected_w = [
            0.19547437131404877,
            -1.609630823135376,
            0.8451641201972961,
            0.45505383610725403,
            -1.0164923667907715,
            0.6182180047035217,
        ];
        for (got, want) in weighted.iter_flat().zip(expected_w) {
            assert_eq!(got as f64, want);
        }
    }

    #[test]
    fn equal_counts_match_unweighted() {
        let a = vector_of(&[1.0, 2.0]);
        let b = vector_of(&[5.0, -2.0]);
        let m = aggregate_mean(&[a.clone(), b.clone()]).unwrap();
        let w = aggregate_weighted(&[a, b], &[4, 4]).unwrap();
        assert!(m.bit_identical(&w));
    }

    #[test]
    fn rejects_empty_mismatched_and_zero_weight_inputs() {
        let empty: Vec<ParamVector<f32>> = vec![];
        assert!(aggregate_mean(&empty).is_err());

        let a = vector_of(&[1.0, 2.0]);
        let b = vector_of(&[1.0, 2.0, 3.0, 4.0]);
        assert!(aggregate_mean(&[a.clone(), b]).is_err());

        assert!(aggregate_weighted(std::slice::from_ref(&a), &[1, 2]).is_err());
        assert!(aggregate_weighted(&[a.clone(), a], &[0, 0]).is_err());
    }
}
