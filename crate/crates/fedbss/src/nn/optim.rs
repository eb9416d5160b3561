//! SGD with momentum and weight decay.
//!
//! The update is the classic momentum form with L2 regularization folded into
//! the gradient:
//!
//! ```text
//! g   <- grad + weight_decay * params
//! buf <- momentum * buf + g
//! params <- params - learning_rate * buf
//! ```
//!
//! With `momentum = 0` and `weight_decay = 0` this reduces exactly to plain
//! SGD — including at the floating-point level, since the degenerate terms
//! multiply or add zeros without reordering the remaining operations.

use crate::error::{Error, Result};
use crate::nn::param::ParamVector;
use crate::nn::real::Real;

/// Hyper-parameters of the SGD update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdConfig<T = f32> {
    /// Step size; must be non-negative and finite. Zero makes training a
    /// deliberate no-op.
    pub learning_rate: T,
    /// Momentum coefficient in `[0, 1)`.
    pub momentum: T,
    /// L2 penalty coefficient; must be non-negative and finite.
    pub weight_decay: T,
}

impl<T: Real> SgdConfig<T> {
    /// Plain SGD with the given step size.
    pub fn plain(learning_rate: T) -> Self {
        SgdConfig {
            learning_rate,
            momentum: T::zero(),
            weight_decay: T::zero(),
        }
    }

    /// Validates ranges. A zero learning rate is allowed (it makes training
    /// a deliberate no-op, which tests rely on); negative rates are not.
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate >= T::zero()) {
            return Err(Error::Config(format!(
                "learning_rate must be non-negative and finite, got {}",
                self.learning_rate
            )));
        }
        if !(self.momentum >= T::zero() && self.momentum < T::one()) {
            return Err(Error::Config(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= T::zero()) {
            return Err(Error::Config(format!(
                "weight_decay must be non-negative and finite, got {}",
                self.weight_decay
            )));
        }
        Ok(())
    }
}

/// Mutable optimizer state: one momentum buffer aligned with the parameters
/// it updates.
#[derive(Debug, Clone)]
pub struct OptimizerState<T = f32> {
    config: SgdConfig<T>,
    buffers: ParamVector<T>,
}

impl<T: Real> OptimizerState<T> {
    /// Fresh state (zero momentum buffers) shaped like `template`.
    pub fn new(template: &ParamVector<T>, config: SgdConfig<T>) -> Result<Self> {
        config.validate()?;
        Ok(OptimizerState {
            config,
            buffers: template.zeros_like(),
        })
    }

    /// The configuration this state was built with.
    pub fn config(&self) -> &SgdConfig<T> {
        &self.config
    }

    /// Applies one update step in place.
    ///
    /// `params` and `grad` must both align with the state's buffers. The same
    /// `(params, grad)` sequence always produces the same parameter
    /// trajectory — there is no internal randomness.
    pub fn step(&mut self, params: &mut ParamVector<T>, grad: &ParamVector<T>) -> Result<()> {
        if !self.buffers.aligned_with(params) || !self.buffers.aligned_with(grad) {
            return Err(Error::shape(
                "OptimizerState::step",
                "params and grad aligned with optimizer buffers",
                "misaligned vectors",
            ));
        }
        let lr = self.config.learning_rate;
        let m = self.config.momentum;
        let wd = self.config.weight_decay;
        for ((buf_seg, p_seg), g_seg) in self
            .buffers
            .segments_mut()
            .iter_mut()
            .zip(params.segments_mut())
            .zip(grad.segments())
        {
            let g = g_seg.tensor.data();
            let p = p_seg.tensor.data_mut();
            for (i, b) in buf_seg.tensor.data_mut().iter_mut().enumerate() {
                *b = m * *b + (g[i] + wd * p[i]);
                p[i] = p[i] - lr * *b;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::param::{ParamKind, Segment, SegmentId};
    use crate::nn::tensor::Tensor;

    fn scalar_params(v: f32) -> ParamVector<f32> {
        ParamVector::new(vec![Segment {
            id: SegmentId { layer: 0, kind: ParamKind::Weight },
            tensor: Tensor::new(vec![1], vec![v]).unwrap(),
        }])
    }

    #[test]
    fn plain_sgd_single_step() {
        // params 1.0, grad 0.5, lr 0.1 -> 0.95, no momentum/decay involved.
        let mut p = scalar_params(1.0);
        let g = scalar_params(0.5);
        let mut opt = OptimizerState::new(&p, SgdConfig::plain(0.1)).unwrap();
        opt.step(&mut p, &g).unwrap();
        assert_eq!(p.flat_get(0), 0.95);
    }

    #[test]
    fn momentum_accumulates_across_steps() {
        // Constant gradient 1.0, lr 0.1, momentum 0.9:
        // step 1 moves by -0.1, step 2 by -0.19 (buffer 1.9).
        let mut p = scalar_params(0.0);
        let g = scalar_params(1.0);
        let cfg = SgdConfig {
            learning_rate: 0.1,
            momentum: 0.9,
            weight_decay: 0.0,
        };
        let mut opt = OptimizerState::new(&p, cfg).unwrap();
        opt.step(&mut p, &g).unwrap();
        assert!((p.flat_get(0) - (-0.1)).abs() < 1e-7);
        opt.step(&mut p, &g).unwrap();
        assert!((p.flat_get(0) - (-0.29)).abs() < 1e-7);
    }

    #[test]
    fn weight_decay_pulls_toward_zero() {
        // Zero gradient, wd 0.5, lr 0.1: effective gradient is 0.5 * p.
        let mut p = scalar_params(2.0);
        let g = scalar_params(0.0);
        let cfg = SgdConfig {
            learning_rate: 0.1,
            momentum: 0.0,
            weight_decay: 0.5,
        };
        let mut opt = OptimizerState::new(&p, cfg).unwrap();
        opt.step(&mut p, &g).unwrap();
        assert!((p.flat_get(0) - 1.9).abs() < 1e-7);
    }

    #[test]
    fn config_validation_rejects_bad_ranges() {
        assert!(SgdConfig::plain(0.0f32).validate().is_ok()); // no-op training
        assert!(SgdConfig::plain(-1.0f32).validate().is_err());
        assert!(SgdConfig::plain(f32::NAN).validate().is_err());
        assert!(SgdConfig {
            learning_rate: 0.1f32,
            momentum: 1.0,
            weight_decay: 0.0
        }
        .validate()
        .is_err());
        assert!(SgdConfig {
            learning_rate: 0.1f32,
            momentum: 0.0,
            weight_decay: -0.1
        }
        .validate()
        .is_err());
    }

    #[test]
    fn step_rejects_misaligned_vectors() {
        let mut p = scalar_params(1.0);
        let mut opt = OptimizerState::new(&p, SgdConfig::plain(0.1)).unwrap();
        let wrong = ParamVector::new(vec![Segment {
            id: SegmentId { layer: 1, kind: ParamKind::Bias },
            tensor: Tensor::zeros(vec![2]),
        }]);
        assert!(opt.step(&mut p, &wrong).is_err());
    }
}
