//! Scalar abstraction for network arithmetic.
//!
//! Training runs on `f32` for speed, but numerical validation (finite
//! difference checks against analytic gradients) needs `f64` headroom: with
//! `f32` the subtraction noise in a central difference is already of the same
//! order as the tolerance being checked. Making the network generic over
//! [`Real`] lets the same code path serve both without duplicating any math.

use std::fmt::{Debug, Display};

use num_traits::Float;

/// Floating-point scalar usable for network parameters and activations.
///
/// Implemented for `f32` (the default everywhere) and `f64`.
pub trait Real: Float + Debug + Display + Default + Send + Sync + 'static {
    /// Converts from `f64`, rounding to the nearest representable value.
    fn from_f64(v: f64) -> Self;

    /// Widens to `f64` exactly (both supported types embed into `f64`).
    fn to_f64(self) -> f64;
}

impl Real for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn to_f64(self) -> f64 {
        f64::from(self)
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(self) -> f64 {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert_eq!(<f32 as Real>::from_f64(0.5), 0.5f32);
        assert_eq!(Real::to_f64(0.25f32), 0.25f64);
        assert_eq!(<f64 as Real>::from_f64(0.1), 0.1f64);
    }
}
