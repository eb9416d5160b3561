//! Layer definitions and their forward/backward kernels.
//!
//! A [`LayerSpec`] is pure configuration: it knows its parameter shapes and
//! how to map an input shape to an output shape, and it implements the
//! per-sample forward and backward passes over flat slices. Parameter storage
//! and batching live in [`crate::nn::model`].
//!
//! Convolutions use stride 1 with configurable zero padding; pooling is
//! non-overlapping max pooling whose window is also the stride, truncating
//! any remainder at the border (floor semantics).

use crate::error::{Error, Result};
use crate::nn::param::ParamKind;
use crate::nn::real::Real;

/// Element-wise nonlinearity applied after a parameterized layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    /// No nonlinearity.
    Identity,
    /// `max(0, z)`.
    Relu,
}

impl Activation {
    #[inline]
    fn apply<T: Real>(self, z: T) -> T {
        match self {
            Activation::Identity => z,
            Activation::Relu => {
                if z > T::zero() {
                    z
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Derivative dy/dz recovered from the *output* y.
    ///
    /// Works for both supported activations because ReLU's output determines
    /// its active branch (the subgradient at exactly zero is taken as zero).
    #[inline]
    fn grad_from_output<T: Real>(self, y: T) -> T {
        match self {
            Activation::Identity => T::one(),
            Activation::Relu => {
                if y > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }
}

/// Configuration of one layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayerSpec {
    /// Fully connected layer: rank-1 input of `inputs`, rank-1 output of
    /// `outputs`, then `activation`.
    Dense {
        /// Input width.
        inputs: usize,
        /// Output width.
        outputs: usize,
        /// Nonlinearity applied to the affine result.
        activation: Activation,
    },
    /// 2-D convolution, stride 1, square `kernel`, zero `padding` on all
    /// sides, then `activation`. A rank-2 input is treated as a single
    /// channel.
    Conv2d {
        /// Expected input channels.
        in_channels: usize,
        /// Produced output channels.
        out_channels: usize,
        /// Side length of the square kernel.
        kernel: usize,
        /// Zero padding applied to each border.
        padding: usize,
        /// Nonlinearity applied per output element.
        activation: Activation,
    },
    /// Non-overlapping max pooling with window and stride `size`; border
    /// remainders are dropped.
    MaxPool2d {
        /// Window side length (equals the stride).
        size: usize,
    },
    /// Reshapes any input to rank 1 without touching the data.
    Flatten,
}

/// Normalizes an image shape to (channels, height, width); rank-2 inputs are
/// single-channel.
fn chw(shape: &[usize]) -> Option<(usize, usize, usize)> {
    match *shape {
        [h, w] => Some((1, h, w)),
        [c, h, w] => Some((c, h, w)),
        _ => None,
    }
}

impl LayerSpec {
    /// Computes the output shape for `input`, validating compatibility.
    pub fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>> {
        match *self {
            LayerSpec::Dense { inputs, outputs, .. } => {
                if input == [inputs] {
                    Ok(vec![outputs])
                } else {
                    Err(Error::shape("Dense input", [inputs], input))
                }
            }
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
                kernel,
                padding,
                ..
            } => {
                let (c, h, w) = chw(input)
                    .ok_or_else(|| Error::shape("Conv2d input", "rank 2 or 3 image", input))?;
                if c != in_channels {
                    return Err(Error::shape("Conv2d input channels", [in_channels], [c]));
                }
                let oh = (h + 2 * padding).checked_sub(kernel - 1).filter(|&v| v > 0);
                let ow = (w + 2 * padding).checked_sub(kernel - 1).filter(|&v| v > 0);
                match (oh, ow) {
                    (Some(oh), Some(ow)) => Ok(vec![out_channels, oh, ow]),
                    _ => Err(Error::shape(
                        "Conv2d input extent",
                        format!("at least {}x{} after padding {padding}", kernel, kernel),
                        input,
                    )),
                }
            }
            LayerSpec::MaxPool2d { size } => {
                let (c, h, w) = chw(input)
                    .ok_or_else(|| Error::shape("MaxPool2d input", "rank 2 or 3 image", input))?;
                let (oh, ow) = (h / size, w / size);
                if oh == 0 || ow == 0 {
                    return Err(Error::shape(
                        "MaxPool2d input extent",
                        format!("at least {size}x{size}"),
                        input,
                    ));
                }
                Ok(vec![c, oh, ow])
            }
            LayerSpec::Flatten => Ok(vec![input.iter().product()]),
        }
    }

    /// Parameter tensors this layer owns, in storage order.
    pub fn param_shapes(&self) -> Vec<(ParamKind, Vec<usize>)> {
        match *self {
            LayerSpec::Dense { inputs, outputs, .. } => vec![
                (ParamKind::Weight, vec![outputs, inputs]),
                (ParamKind::Bias, vec![outputs]),
            ],
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
                kernel,
                ..
            } => vec![
                (ParamKind::Weight, vec![out_channels, in_channels, kernel, kernel]),
                (ParamKind::Bias, vec![out_channels]),
            ],
            LayerSpec::MaxPool2d { .. } | LayerSpec::Flatten => vec![],
        }
    }

    /// Fan-in and fan-out used for initialization scaling, when the layer has
    /// weights.
    pub(crate) fn fans(&self) -> Option<(usize, usize)> {
        match *self {
            LayerSpec::Dense { inputs, outputs, .. } => Some((inputs, outputs)),
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
                kernel,
                ..
            } => Some((in_channels * kernel * kernel, out_channels * kernel * kernel)),
            _ => None,
        }
    }

    /// Per-sample forward pass. `x` and `y` are flat row-major buffers whose
    /// lengths match `in_shape` / the validated output shape; `params` is
    /// `(weights, bias)` for parameterized layers and `None` otherwise.
    pub(crate) fn forward<T: Real>(
        &self,
        in_shape: &[usize],
        params: Option<(&[T], &[T])>,
        x: &[T],
        y: &mut [T],
    ) {
        match *self {
            LayerSpec::Dense {
                inputs,
                outputs,
                activation,
            } => {
                let (w, b) = params.expect("Dense layer has parameters");
                for o in 0..outputs {
                    let row = &w[o * inputs..(o + 1) * inputs];
                    let mut z = b[o];
                    for i in 0..inputs {
                        z = z + row[i] * x[i];
                    }
                    y[o] = activation.apply(z);
                }
            }
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
                kernel,
                padding,
                activation,
            } => {
                let (_, h, w_in) = chw(in_shape).expect("validated at construction");
                let oh = h + 2 * padding - kernel + 1;
                let ow = w_in + 2 * padding - kernel + 1;
                let (wt, b) = params.expect("Conv2d layer has parameters");
                for oc in 0..out_channels {
                    let w_oc = &wt[oc * in_channels * kernel * kernel..];
                    for oy in 0..oh {
                        for ox in 0..ow {
                            let mut z = b[oc];
                            for ic in 0..in_channels {
                                let x_ic = &x[ic * h * w_in..];
                                let w_ic = &w_oc[ic * kernel * kernel..];
                                for ky in 0..kernel {
                                    let iy = oy + ky;
                                    if iy < padding || iy >= h + padding {
                                        continue;
                                    }
                                    let iy = iy - padding;
                                    for kx in 0..kernel {
                                        let ix = ox + kx;
                                        if ix < padding || ix >= w_in + padding {
                                            continue;
                                        }
                                        let ix = ix - padding;
                                        z = z + w_ic[ky * kernel + kx] * x_ic[iy * w_in + ix];
                                    }
                                }
                            }
                            y[(oc * oh + oy) * ow + ox] = activation.apply(z);
                        }
                    }
                }
            }
            LayerSpec::MaxPool2d { size } => {
                let (c, h, w_in) = chw(in_shape).expect("validated at construction");
                let (oh, ow) = (h / size, w_in / size);
                for ch in 0..c {
                    let x_c = &x[ch * h * w_in..];
                    for oy in 0..oh {
                        for ox in 0..ow {
                            let mut best = x_c[oy * size * w_in + ox * size];
                            for ky in 0..size {
                                for kx in 0..size {
                                    let v = x_c[(oy * size + ky) * w_in + ox * size + kx];
                                    if v > best {
                                        best = v;
                                    }
                                }
                            }
                            y[(ch * oh + oy) * ow + ox] = best;
                        }
                    }
                }
            }
            LayerSpec::Flatten => y.copy_from_slice(x),
        }
    }

    /// Per-sample backward pass. Inputs: cached activations `x` (layer input)
    /// and `y` (layer output), and the loss gradient `d_out` w.r.t. `y`.
    /// Accumulates parameter gradients into `grads` (`(d_weights, d_bias)`,
    /// same layout as `params`) and writes the input gradient to `d_in`.
    ///
    /// Parameter gradients are *accumulated* (`+=`) so a batch can be summed
    /// in one buffer; `d_in` is fully overwritten.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn backward<T: Real>(
        &self,
        in_shape: &[usize],
        params: Option<(&[T], &[T])>,
        x: &[T],
        y: &[T],
        d_out: &[T],
        grads: Option<(&mut [T], &mut [T])>,
        d_in: &mut [T],
    ) {
        match *self {
            LayerSpec::Dense {
                inputs,
                outputs,
                activation,
            } => {
                let (w, _) = params.expect("Dense layer has parameters");
                let (dw, db) = grads.expect("Dense layer has parameters");
                for v in d_in.iter_mut() {
                    *v = T::zero();
                }
                for o in 0..outputs {
                    let dz = d_out[o] * activation.grad_from_output(y[o]);
                    if dz == T::zero() {
                        continue;
                    }
                    db[o] = db[o] + dz;
                    let w_row = &w[o * inputs..(o + 1) * inputs];
                    let dw_row = &mut dw[o * inputs..(o + 1) * inputs];
                    for i in 0..inputs {
                        dw_row[i] = dw_row[i] + dz * x[i];
                        d_in[i] = d_in[i] + dz * w_row[i];
                    }
                }
            }
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
                kernel,
                padding,
                activation,
            } => {
                let (_, h, w_in) = chw(in_shape).expect("validated at construction");
                let oh = h + 2 * padding - kernel + 1;
                let ow = w_in + 2 * padding - kernel + 1;
                let (wt, _) = params.expect("Conv2d layer has parameters");
                let (dw, db) = grads.expect("Conv2d layer has parameters");
                for v in d_in.iter_mut() {
                    *v = T::zero();
                }
                for oc in 0..out_channels {
                    let w_oc = &wt[oc * in_channels * kernel * kernel..];
                    let dw_oc_base = oc * in_channels * kernel * kernel;
                    for oy in 0..oh {
                        for ox in 0..ow {
                            let out_idx = (oc * oh + oy) * ow + ox;
                            let dz = d_out[out_idx] * activation.grad_from_output(y[out_idx]);
                            if dz == T::zero() {
                                continue;
                            }
                            db[oc] = db[oc] + dz;
                            for ic in 0..in_channels {
                                let x_base = ic * h * w_in;
                                let w_base = ic * kernel * kernel;
                                for ky in 0..kernel {
                                    let iy = oy + ky;
                                    if iy < padding || iy >= h + padding {
                                        continue;
                                    }
                                    let iy = iy - padding;
                                    for kx in 0..kernel {
                                        let ix = ox + kx;
                                        if ix < padding || ix >= w_in + padding {
                                            continue;
                                        }
                                        let ix = ix - padding;
                                        let xi = x_base + iy * w_in + ix;
                                        let wi = w_base + ky * kernel + kx;
                                        dw[dw_oc_base + wi] = dw[dw_oc_base + wi] + dz * x[xi];
                                        d_in[xi] = d_in[xi] + dz * w_oc[wi];
                                    }
                                }
                            }
                        }
                    }
                }
            }
            LayerSpec::MaxPool2d { size } => {
                let (c, h, w_in) = chw(in_shape).expect("validated at construction");
                let (oh, ow) = (h / size, w_in / size);
                for v in d_in.iter_mut() {
                    *v = T::zero();
                }
                for ch in 0..c {
                    let x_base = ch * h * w_in;
                    for oy in 0..oh {
                        for ox in 0..ow {
                            // Route the gradient to the first maximum in scan
                            // order, mirroring the forward `>` comparison.
                            let mut best_idx = x_base + oy * size * w_in + ox * size;
                            let mut best = x[best_idx];
                            for ky in 0..size {
                                for kx in 0..size {
                                    let idx = x_base + (oy * size + ky) * w_in + ox * size + kx;
                                    if x[idx] > best {
                                        best = x[idx];
                                        best_idx = idx;
                                    }
                                }
                            }
                            let g = d_out[(ch * oh + oy) * ow + ox];
                            d_in[best_idx] = d_in[best_idx] + g;
                        }
                    }
                }
            }
            LayerSpec::Flatten => d_in.copy_from_slice(d_out),
        }
    }
}
