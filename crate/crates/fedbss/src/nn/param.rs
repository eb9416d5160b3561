//! Flattened model parameters.
//!
//! Aggregation, optimizer steps, and checkpointing all treat a model as one
//! long vector of scalars. [`ParamVector`] keeps that view while remembering
//! which slice belongs to which layer, so the same buffer can be read back
//! into a structured model without bookkeeping at the call sites.

use crate::error::{Error, Result};
use crate::nn::real::Real;
use crate::nn::tensor::Tensor;

/// Role of one parameter tensor inside its layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Multiplicative weights (dense matrix or convolution kernels).
    Weight,
    /// Additive bias.
    Bias,
}

/// Identifies one parameter tensor: which layer it belongs to and its role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentId {
    /// Index of the owning layer in the architecture.
    pub layer: usize,
    /// Weight or bias.
    pub kind: ParamKind,
}

/// One named parameter tensor inside a [`ParamVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct Segment<T = f32> {
    /// Which layer/role this tensor fills.
    pub id: SegmentId,
    /// The parameter values.
    pub tensor: Tensor<T>,
}

/// Ordered collection of parameter segments; the flat view is the
/// concatenation of all segment data in order.
///
/// Two vectors are *aligned* when their segment ids and shapes match
/// position by position. All arithmetic requires alignment and reports
/// [`Error::ShapeMismatch`] otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector<T = f32> {
    segments: Vec<Segment<T>>,
}

impl<T: Real> ParamVector<T> {
    /// Builds a vector from pre-shaped segments.
    pub fn new(segments: Vec<Segment<T>>) -> Self {
        ParamVector { segments }
    }

    /// Segments in storage order.
    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    /// Mutable access to the segments (shapes must not be changed).
    pub fn segments_mut(&mut self) -> &mut [Segment<T>] {
        &mut self.segments
    }

    /// Total scalar count across all segments.
    pub fn total_len(&self) -> usize {
        self.segments.iter().map(|s| s.tensor.len()).sum()
    }

    /// A vector with the same layout and every value zero.
    pub fn zeros_like(&self) -> Self {
        ParamVector {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    id: s.id,
                    tensor: Tensor::zeros(s.tensor.shape().to_vec()),
                })
                .collect(),
        }
    }

    /// True when `other` has identical segment ids and shapes.
    pub fn aligned_with(&self, other: &Self) -> bool {
        self.segments.len() == other.segments.len()
            && self
                .segments
                .iter()
                .zip(&other.segments)
                .all(|(a, b)| a.id == b.id && a.tensor.shape() == b.tensor.shape())
    }

    fn layout_error(&self, context: &'static str, other: &Self) -> Error {
        Error::shape(
            context,
            self.segments
                .iter()
                .map(|s| (s.id, s.tensor.shape().to_vec()))
                .collect::<Vec<_>>(),
            other
                .segments
                .iter()
                .map(|s| (s.id, s.tensor.shape().to_vec()))
                .collect::<Vec<_>>(),
        )
    }

    /// Iterates over all scalars in flat order.
    pub fn iter_flat(&self) -> impl Iterator<Item = T> + '_ {
        self.segments.iter().flat_map(|s| s.tensor.data().iter().copied())
    }

    /// Copies all scalars into one flat `Vec` in segment order.
    pub fn to_flat(&self) -> Vec<T> {
        self.iter_flat().collect()
    }

    /// Reads one scalar by flat index.
    ///
    /// # Panics
    /// If `i >= total_len()`.
    pub fn flat_get(&self, i: usize) -> T {
        let (seg, off) = self.locate(i);
        self.segments[seg].tensor.data()[off]
    }

    /// Writes one scalar by flat index.
    ///
    /// # Panics
    /// If `i >= total_len()`.
    pub fn flat_set(&mut self, i: usize, v: T) {
        let (seg, off) = self.locate(i);
        self.segments[seg].tensor.data_mut()[off] = v;
    }

    fn locate(&self, mut i: usize) -> (usize, usize) {
        for (s, seg) in self.segments.iter().enumerate() {
            if i < seg.tensor.len() {
                return (s, i);
            }
            i -= seg.tensor.len();
        }
        panic!("flat index out of range");
    }

    /// Overwrites all values from a flat slice in segment order.
    pub fn copy_from_flat(&mut self, flat: &[T]) -> Result<()> {
        if flat.len() != self.total_len() {
            return Err(Error::shape(
                "ParamVector::copy_from_flat",
                format!("{} scalars", self.total_len()),
                format!("{} scalars", flat.len()),
            ));
        }
        let mut off = 0;
        for seg in &mut self.segments {
            let n = seg.tensor.len();
            seg.tensor.data_mut().copy_from_slice(&flat[off..off + n]);
            off += n;
        }
        Ok(())
    }

    /// Multiplies every value by `c`.
    pub fn scale(&mut self, c: T) {
        for seg in &mut self.segments {
            for v in seg.tensor.data_mut() {
                *v = *v * c;
            }
        }
    }

    /// `self += c * other`, element-wise over aligned vectors.
    pub fn add_scaled(&mut self, c: T, other: &Self) -> Result<()> {
        if !self.aligned_with(other) {
            return Err(self.layout_error("ParamVector::add_scaled", other));
        }
        for (dst, src) in self.segments.iter_mut().zip(&other.segments) {
            for (d, s) in dst.tensor.data_mut().iter_mut().zip(src.tensor.data()) {
                *d = *d + c * *s;
            }
        }
        Ok(())
    }

    /// `self += c * (a - b)`, element-wise over aligned vectors.
    ///
    /// Used for proximal gradient corrections without materializing the
    /// difference vector.
    pub fn add_scaled_diff(&mut self, c: T, a: &Self, b: &Self) -> Result<()> {
        if !self.aligned_with(a) {
            return Err(self.layout_error("ParamVector::add_scaled_diff", a));
        }
        if !self.aligned_with(b) {
            return Err(self.layout_error("ParamVector::add_scaled_diff", b));
        }
        for ((dst, sa), sb) in self.segments.iter_mut().zip(&a.segments).zip(&b.segments) {
            let (sa, sb) = (sa.tensor.data(), sb.tensor.data());
            for (i, d) in dst.tensor.data_mut().iter_mut().enumerate() {
                *d = *d + c * (sa[i] - sb[i]);
            }
        }
        Ok(())
    }

    /// Largest absolute difference against an aligned vector, in `f64`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if !self.aligned_with(other) {
            return Err(self.layout_error("ParamVector::max_abs_diff", other));
        }
        Ok(self
            .iter_flat()
            .zip(other.iter_flat())
            .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
            .fold(0.0, f64::max))
    }

    /// True when every scalar is finite.
    pub fn all_finite(&self) -> bool {
        self.segments.iter().all(|s| s.tensor.all_finite())
    }

    /// True when both vectors hold exactly the same bit patterns.
    pub fn bit_identical(&self, other: &Self) -> bool {
        self.aligned_with(other)
            && self
                .iter_flat()
                .zip(other.iter_flat())
                .all(|(a, b)| a.to_f64().to_bits() == b.to_f64().to_bits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ParamVector<f32> {
        ParamVector::new(vec![
            Segment {
                id: SegmentId { layer: 0, kind: ParamKind::Weight },
                tensor: Tensor::new(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap(),
            },
            Segment {
                id: SegmentId { layer: 0, kind: ParamKind::Bias },
                tensor: Tensor::new(vec![2], vec![5.0, 6.0]).unwrap(),
            },
        ])
    }

    #[test]
    fn flat_order_is_segment_order() {
        let p = sample();
        assert_eq!(p.total_len(), 6);
        assert_eq!(p.to_flat(), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(p.flat_get(4), 5.0);
    }

    #[test]
    fn flat_set_targets_the_right_segment() {
        let mut p = sample();
        p.flat_set(5, -1.0);
        assert_eq!(p.segments()[1].tensor.data(), &[5.0, -1.0]);
    }

    #[test]
    fn add_scaled_is_elementwise() {
        let mut p = sample();
        let q = sample();
        p.add_scaled(0.5, &q).unwrap();
        assert_eq!(p.to_flat(), vec![1.5, 3.0, 4.5, 6.0, 7.5, 9.0]);
    }

    #[test]
    fn add_scaled_diff_matches_expansion() {
        let mut p = sample();
        let mut a = sample();
        a.scale(3.0);
        let b = sample();
        // p + 0.5 * (3p - p) = 2p
        p.add_scaled_diff(0.5, &a, &b).unwrap();
        let mut expected = sample();
        expected.scale(2.0);
        assert_eq!(p, expected);
    }

    #[test]
    fn misaligned_vectors_are_rejected() {
        let mut p = sample();
        let q = ParamVector::new(vec![Segment {
            id: SegmentId { layer: 0, kind: ParamKind::Weight },
            tensor: Tensor::zeros(vec![3]),
        }]);
        assert!(!p.aligned_with(&q));
        assert!(p.add_scaled(1.0, &q).is_err());
        assert!(p.max_abs_diff(&q).is_err());
    }

    #[test]
    fn copy_from_flat_round_trips() {
        let mut p = sample();
        let flat = vec![9.0, 8.0, 7.0, 6.0, 5.0, 4.0];
        p.copy_from_flat(&flat).unwrap();
        assert_eq!(p.to_flat(), flat);
        assert!(p.copy_from_flat(&flat[..5]).is_err());
    }

    #[test]
    fn bit_identity_distinguishes_near_equal() {
        let p = sample();
        let mut q = sample();
        assert!(p.bit_identical(&q));
        let v = q.flat_get(0);
        q.flat_set(0, v + f32::EPSILON);
        assert!(!p.bit_identical(&q));
    }
}
