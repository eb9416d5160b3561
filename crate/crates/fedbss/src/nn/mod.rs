//! Minimal neural-network stack: tensors, layers, models, SGD, checkpoints.
//!
//! Everything is CPU-only, dependency-free, and deterministic. Models are
//! generic over the [`Real`] scalar — `f32` in production, `f64` where
//! numerical validation needs the headroom — and parameters live in a flat
//! [`ParamVector`] so the federated layer can average and ship them without
//! knowing anything about layer internals.

pub mod checkpoint;
pub mod layer;
pub mod model;
pub mod ops;
pub mod optim;
pub mod param;
pub mod real;
pub mod tensor;

pub use layer::{Activation, LayerSpec};
pub use model::{Architecture, Backprop, Model};
pub use ops::{argmax, cross_entropy, softmax};
pub use optim::{OptimizerState, SgdConfig};
pub use param::{ParamKind, ParamVector, Segment, SegmentId};
pub use real::Real;
pub use tensor::Tensor;
