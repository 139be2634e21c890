use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

/// Fully connected layer computing `x W + b`, with `W` stored `in x out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weights: Array2::zeros((inputs, outputs)),
            bias: Array1::zeros(outputs),
        }
    }

    /// Uniform fan-in/fan-out initialization, zero bias.
    pub fn glorot<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let bound = (6.0 / (inputs + outputs) as f64).sqrt();
        let dist = Uniform::new_inclusive(-bound, bound).expect("finite bound");
        Self {
            weights: Array2::from_shape_simple_fn((inputs, outputs), || dist.sample(rng)),
            bias: Array1::zeros(outputs),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.weights.dim()
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    pub(crate) fn forward(&self, x: ArrayView2<f64>) -> Array2<f64> {
        x.dot(&self.weights) + &self.bias
    }

    /// Gradients given this layer's input and `dL/d(output)`.
    pub(crate) fn grads(x: &ArrayView2<f64>, delta: &Array2<f64>) -> Self {
        Self {
            weights: x.t().dot(delta),
            bias: delta.sum_axis(Axis(0)),
        }
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.weights.iter().chain(self.bias.iter()).all(|v| v.is_finite())
    }
}

pub(crate) fn relu_inplace(a: &mut Array2<f64>) {
    a.mapv_inplace(|v| v.max(0.0));
}

/// Zeroes `delta` wherever the rectifier output `act` was not positive.
pub(crate) fn relu_mask(delta: &mut Array2<f64>, act: &Array2<f64>) {
    delta.zip_mut_with(act, |d, &a| {
        if a <= 0.0 {
            *d = 0.0;
        }
    });
}

/// Forward pass through a chain of layers with rectifiers between them (and
/// after the last one when `relu_last`). Returns every layer's input followed
/// by the final output.
pub(crate) fn chain_forward(layers: &[Dense], x: ArrayView2<f64>, relu_last: bool) -> Vec<Array2<f64>> {
    let mut acts = Vec::with_capacity(layers.len() + 1);
    acts.push(x.to_owned());
    for (i, layer) in layers.iter().enumerate() {
        let mut z = layer.forward(acts[i].view());
        if i + 1 < layers.len() || relu_last {
            relu_inplace(&mut z);
        }
        acts.push(z);
    }
    acts
}

/// Backward pass matching [`chain_forward`]. Returns layer gradients and
/// `dL/d(input)`.
pub(crate) fn chain_backward(
    layers: &[Dense],
    acts: &[Array2<f64>],
    mut delta: Array2<f64>,
    relu_last: bool,
    need_input_grad: bool,
) -> (Vec<Dense>, Option<Array2<f64>>) {
    let n = layers.len();
    if relu_last {
        relu_mask(&mut delta, &acts[n]);
    }
    let mut grads = Vec::with_capacity(n);
    let mut input_grad = None;
    for i in (0..n).rev() {
        grads.push(Dense::grads(&acts[i].view(), &delta));
        if i > 0 {
            let mut prev = delta.dot(&layers[i].weights.t());
            relu_mask(&mut prev, &acts[i]);
            delta = prev;
        } else if need_input_grad {
            input_grad = Some(delta.dot(&layers[0].weights.t()));
        }
    }
    grads.reverse();
    (grads, input_grad)
}
