//! Network architecture and the batched forward/backward driver.
//!
//! An [`Architecture`] is a validated chain of [`LayerSpec`]s with all
//! intermediate shapes resolved at construction. A [`Model`] binds an
//! architecture to one [`ParamVector`]; the split keeps the federated code
//! free to ship parameter vectors around and re-attach them to the shared
//! architecture on arrival.

use crate::error::{Error, Result};
use crate::nn::layer::{Activation, LayerSpec};
use crate::nn::ops::{argmax, cross_entropy, softmax};
use crate::nn::param::{ParamKind, ParamVector, Segment, SegmentId};
use crate::nn::real::Real;
use crate::nn::tensor::Tensor;
use crate::rng::{stream, StreamKind};
use rand::Rng;

/// Validated layer chain with resolved intermediate shapes.
///
/// The final layer must produce a rank-1 output, interpreted as one logit per
/// class.
#[derive(Debug, Clone, PartialEq)]
pub struct Architecture {
    input_shape: Vec<usize>,
    layers: Vec<LayerSpec>,
    /// `boundary_shapes[l]` is the input shape of layer `l`;
    /// the last entry is the output shape.
    boundary_shapes: Vec<Vec<usize>>,
    /// For each layer, the segment index of its weight tensor (bias follows
    /// at `+1`), or `None` for parameter-free layers.
    seg_start: Vec<Option<usize>>,
}

impl Architecture {
    /// Validates the chain and resolves every intermediate shape.
    pub fn new(input_shape: Vec<usize>, layers: Vec<LayerSpec>) -> Result<Self> {
        if input_shape.is_empty() || input_shape.iter().any(|&d| d == 0) {
            return Err(Error::shape("Architecture input", "non-empty, non-zero dims", &input_shape));
        }
        if layers.is_empty() {
            return Err(Error::Config("architecture needs at least one layer".into()));
        }
        let mut boundary_shapes = vec![input_shape.clone()];
        for layer in &layers {
            let next = layer.output_shape(boundary_shapes.last().expect("non-empty"))?;
            boundary_shapes.push(next);
        }
        let out = boundary_shapes.last().expect("non-empty");
        if out.len() != 1 || out[0] < 2 {
            return Err(Error::shape(
                "Architecture output",
                "rank-1 logits over at least 2 classes",
                out,
            ));
        }
        let mut seg_start = Vec::with_capacity(layers.len());
        let mut next_seg = 0;
        for layer in &layers {
            let shapes = layer.param_shapes();
            if shapes.is_empty() {
                seg_start.push(None);
            } else {
                seg_start.push(Some(next_seg));
                next_seg += shapes.len();
            }
        }
        Ok(Architecture {
            input_shape,
            layers,
            boundary_shapes,
            seg_start,
        })
    }

    /// Linear (softmax regression) classifier over flattened inputs.
    pub fn softmax_regression(input_shape: &[usize], classes: usize) -> Result<Self> {
        let features = input_shape.iter().product();
        Self::new(
            input_shape.to_vec(),
            vec![
                LayerSpec::Flatten,
                LayerSpec::Dense {
                    inputs: features,
                    outputs: classes,
                    activation: Activation::Identity,
                },
            ],
        )
    }

    /// Two-layer perceptron: flatten, hidden ReLU layer, linear head.
    pub fn mlp(input_shape: &[usize], hidden: usize, classes: usize) -> Result<Self> {
        let features = input_shape.iter().product();
        Self::new(
            input_shape.to_vec(),
            vec![
                LayerSpec::Flatten,
                LayerSpec::Dense {
                    inputs: features,
                    outputs: hidden,
                    activation: Activation::Relu,
                },
                LayerSpec::Dense {
                    inputs: hidden,
                    outputs: classes,
                    activation: Activation::Identity,
                },
            ],
        )
    }

    /// Small image CNN: two 5x5 convolution blocks (32 and 64 channels, each
    /// followed by 3x3 max pooling), then a 512-wide ReLU layer and a linear
    /// head. Padding 2 keeps the spatial extent through each convolution.
    pub fn small_cnn(input_shape: &[usize], classes: usize) -> Result<Self> {
        let in_channels = match *input_shape {
            [_, _] => 1,
            [c, _, _] => c,
            _ => {
                return Err(Error::shape("small_cnn input", "rank 2 or 3 image", input_shape));
            }
        };
        let mut layers = vec![
            LayerSpec::Conv2d {
                in_channels,
                out_channels: 32,
                kernel: 5,
                padding: 2,
                activation: Activation::Relu,
            },
            LayerSpec::MaxPool2d { size: 3 },
            LayerSpec::Conv2d {
                in_channels: 32,
                out_channels: 64,
                kernel: 5,
                padding: 2,
                activation: Activation::Relu,
            },
            LayerSpec::MaxPool2d { size: 3 },
            LayerSpec::Flatten,
        ];
        // Resolve the flattened width before appending the dense layers.
        let mut shape = input_shape.to_vec();
        for layer in &layers {
            shape = layer.output_shape(&shape)?;
        }
        let flat = shape[0];
        layers.push(LayerSpec::Dense {
            inputs: flat,
            outputs: 512,
            activation: Activation::Relu,
        });
        layers.push(LayerSpec::Dense {
            inputs: 512,
            outputs: classes,
            activation: Activation::Identity,
        });
        Self::new(input_shape.to_vec(), layers)
    }

    /// Shape of one input sample.
    pub fn input_shape(&self) -> &[usize] {
        &self.input_shape
    }

    /// Layers in execution order.
    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    /// Number of output classes.
    pub fn num_classes(&self) -> usize {
        self.boundary_shapes.last().expect("non-empty")[0]
    }

    /// Total trainable scalar count.
    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .flat_map(|l| l.param_shapes())
            .map(|(_, s)| s.iter().product::<usize>())
            .sum()
    }

    /// All-zeros parameter vector with this architecture's layout.
    pub fn param_template<T: Real>(&self) -> ParamVector<T> {
        let mut segments = Vec::new();
        for (layer_idx, layer) in self.layers.iter().enumerate() {
            for (kind, shape) in layer.param_shapes() {
                segments.push(Segment {
                    id: SegmentId { layer: layer_idx, kind },
                    tensor: Tensor::zeros(shape),
                });
            }
        }
        ParamVector::new(segments)
    }

    fn boundary_len(&self, i: usize) -> usize {
        self.boundary_shapes[i].iter().product()
    }
}

/// Per-batch scratch buffers: one activation (and gradient) buffer per layer
/// boundary, reused across samples to avoid reallocating in inner loops.
struct Workspace<T> {
    /// `acts[l]` holds the output of layer `l` for the current sample.
    acts: Vec<Vec<T>>,
    /// `grads[l]` holds the loss gradient w.r.t. the output of layer `l`.
    grads: Vec<Vec<T>>,
    /// Gradient w.r.t. the network input (computed, then discarded).
    input_grad: Vec<T>,
}

impl<T: Real> Workspace<T> {
    fn new(arch: &Architecture) -> Self {
        let acts: Vec<Vec<T>> = (0..arch.layers.len())
            .map(|l| vec![T::zero(); arch.boundary_len(l + 1)])
            .collect();
        Workspace {
            grads: acts.clone(),
            input_grad: vec![T::zero(); arch.boundary_len(0)],
            acts,
        }
    }
}

/// Gradient of the mean batch loss, plus the loss value itself.
#[derive(Debug, Clone)]
pub struct Backprop<T = f32> {
    /// d(mean cross-entropy)/d(params), aligned with the model's parameters.
    pub grad: ParamVector<T>,
    /// Mean cross-entropy over the batch.
    pub mean_loss: f64,
}

/// An [`Architecture`] bound to concrete parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T = f32> {
    arch: Architecture,
    params: ParamVector<T>,
}

impl<T: Real> Model<T> {
    /// Initializes parameters deterministically from `seed`.
    ///
    /// Weights are Xavier-uniform (`±sqrt(6 / (fan_in + fan_out))`), biases
    /// zero. Draws happen in `f64` in a fixed order (layers ascending,
    /// weights row-major), so the same seed produces the same values for
    /// every scalar type.
    pub fn init(arch: Architecture, seed: u64) -> Self {
        let mut rng = stream(seed, StreamKind::Init, &[]);
        let mut params = arch.param_template::<T>();
        for seg in params.segments_mut() {
            match seg.id.kind {
                ParamKind::Weight => {
                    let (fan_in, fan_out) = arch.layers[seg.id.layer]
                        .fans()
                        .expect("weight segment implies fans");
                    let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
                    for v in seg.tensor.data_mut() {
                        *v = T::from_f64(rng.random_range(-a..a));
                    }
                }
                ParamKind::Bias => {} // already zero
            }
        }
        Model { arch, params }
    }

    /// Binds an existing parameter vector to an architecture.
    pub fn from_params(arch: Architecture, params: ParamVector<T>) -> Result<Self> {
        let template = arch.param_template::<T>();
        if !template.aligned_with(&params) {
            return Err(Error::shape(
                "Model::from_params",
                format!("{} scalars in the architecture's layout", template.total_len()),
                format!("{} scalars", params.total_len()),
            ));
        }
        Ok(Model { arch, params })
    }

    /// The architecture.
    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    /// Current parameters.
    pub fn params(&self) -> &ParamVector<T> {
        &self.params
    }

    /// Mutable parameters (layout must not change).
    pub fn params_mut(&mut self) -> &mut ParamVector<T> {
        &mut self.params
    }

    /// Consumes the model, returning its parameters.
    pub fn into_params(self) -> ParamVector<T> {
        self.params
    }

    fn check_batch(&self, batch: &Tensor<T>, context: &'static str) -> Result<usize> {
        let shape = batch.shape();
        if shape.len() != self.arch.input_shape.len() + 1 || shape[1..] != *self.arch.input_shape {
            return Err(Error::shape(
                context,
                format!("batch of {:?}", self.arch.input_shape),
                shape,
            ));
        }
        Ok(shape[0])
    }

    fn layer_params(&self, l: usize) -> Option<(&[T], &[T])> {
        self.arch.seg_start[l].map(|s| {
            let segs = self.params.segments();
            (segs[s].tensor.data(), segs[s + 1].tensor.data())
        })
    }

    /// Runs layers for one sample; `x` is the flat input row, and the final
    /// activation lands in `ws.acts.last()`.
    fn forward_sample(&self, ws: &mut Workspace<T>, x: &[T]) {
        for l in 0..self.arch.layers.len() {
            let (before, rest) = ws.acts.split_at_mut(l);
            let input: &[T] = if l == 0 { x } else { &before[l - 1] };
            self.arch.layers[l].forward(
                &self.arch.boundary_shapes[l],
                self.layer_params(l),
                input,
                &mut rest[0],
            );
        }
    }

    /// Computes logits for a batch shaped `[B, input_shape...]`.
    ///
    /// Deterministic: identical parameters and batch always produce identical
    /// output. Returns a `[B, classes]` tensor.
    pub fn forward(&self, batch: &Tensor<T>) -> Result<Tensor<T>> {
        let b = self.check_batch(batch, "Model::forward")?;
        let classes = self.arch.num_classes();
        let mut ws = Workspace::new(&self.arch);
        let mut out = Tensor::zeros(vec![b, classes]);
        for i in 0..b {
            self.forward_sample(&mut ws, batch.row(i));
            out.row_mut(i)
                .copy_from_slice(ws.acts.last().expect("at least one layer"));
        }
        Ok(out)
    }

    /// Softmax probabilities for a batch; rows sum to one and every entry is
    /// strictly inside `(0, 1)`.
    pub fn predict_proba(&self, batch: &Tensor<T>) -> Result<Tensor<T>> {
        let mut logits = self.forward(batch)?;
        for i in 0..logits.rows() {
            let row = logits.row_mut(i);
            let probs = softmax(row);
            row.copy_from_slice(&probs);
        }
        Ok(logits)
    }

    /// Predicted class per batch row (argmax of the logits, ties to the
    /// lowest index).
    pub fn predict(&self, batch: &Tensor<T>) -> Result<Vec<usize>> {
        let logits = self.forward(batch)?;
        Ok((0..logits.rows()).map(|i| argmax(logits.row(i))).collect())
    }

    /// Mean cross-entropy gradient over a labelled batch.
    ///
    /// The gradient sums per-sample contributions and divides by the batch
    /// size, matching the mean loss that is returned alongside it.
    pub fn backward(&self, batch: &Tensor<T>, labels: &[usize]) -> Result<Backprop<T>> {
        let b = self.check_batch(batch, "Model::backward")?;
        if labels.len() != b {
            return Err(Error::shape(
                "Model::backward labels",
                format!("{b} labels"),
                format!("{} labels", labels.len()),
            ));
        }
        let classes = self.arch.num_classes();
        for &l in labels {
            if l >= classes {
                return Err(Error::LabelOutOfRange { label: l, classes });
            }
        }
        if b == 0 {
            return Err(Error::shape("Model::backward", "non-empty batch", "0 rows"));
        }

        let mut ws = Workspace::new(&self.arch);
        let mut grad = self.arch.param_template::<T>();
        let mut loss_sum = 0.0f64;
        let last = self.arch.layers.len() - 1;

        for i in 0..b {
            let x = batch.row(i);
            self.forward_sample(&mut ws, x);
            let probs = softmax(&ws.acts[last]);
            loss_sum += cross_entropy(&probs, labels[i])?;

            // d(loss)/d(logits) = p - onehot(label), per sample; the 1/B
            // factor is applied once at the end.
            let d_logits = &mut ws.grads[last];
            d_logits.copy_from_slice(&probs);
            d_logits[labels[i]] = d_logits[labels[i]] - T::one();

            for l in (0..self.arch.layers.len()).rev() {
                let (g_before, g_rest) = ws.grads.split_at_mut(l);
                let d_out: &[T] = &g_rest[0];
                let input: &[T] = if l == 0 { x } else { &ws.acts[l - 1] };
                let d_in: &mut [T] = if l == 0 {
                    &mut ws.input_grad
                } else {
                    &mut g_before[l - 1]
                };
                let layer_grads = self.arch.seg_start[l].map(|s| {
                    let (a, b) = grad.segments_mut().split_at_mut(s + 1);
                    (a[s].tensor.data_mut(), b[0].tensor.data_mut())
                });
                self.arch.layers[l].backward(
                    &self.arch.boundary_shapes[l],
                    self.layer_params(l),
                    input,
                    &ws.acts[l],
                    d_out,
                    layer_grads,
                    d_in,
                );
            }
        }

        grad.scale(T::from_f64(1.0 / b as f64));
        Ok(Backprop {
            grad,
            mean_loss: loss_sum / b as f64,
        })
    }
}
