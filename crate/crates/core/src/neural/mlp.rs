use ndarray::{Array2, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dense::{chain_backward, chain_forward, Dense};
use super::{check_input, Gradients, QFunction};
use crate::error::{Error, Result};

/// Feed-forward network: rectified hidden layers, linear output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Dense>,
}

impl Mlp {
    /// Randomly initialized network with widths `dims`, e.g. `[6, 512, 128, 121]`.
    pub fn new<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        Self::check_dims(dims)?;
        Ok(Self {
            layers: dims.windows(2).map(|w| Dense::glorot(w[0], w[1], rng)).collect(),
        })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        Self::check_dims(dims)?;
        Ok(Self {
            layers: dims.windows(2).map(|w| Dense::zeros(w[0], w[1])).collect(),
        })
    }

    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Usage("a network needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].shape().1 != pair[1].shape().0 {
                return Err(Error::Usage(format!(
                    "layer widths {:?} and {:?} do not chain",
                    pair[0].shape(),
                    pair[1].shape()
                )));
            }
        }
        if layers.iter().any(|l| l.bias.len() != l.shape().1) {
            return Err(Error::Usage("bias length must match layer width".into()));
        }
        Ok(Self { layers })
    }

    /// Widths from input to output.
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(|l| l.shape().1))
            .collect()
    }

    fn check_dims(dims: &[usize]) -> Result<()> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::Usage(format!("invalid layer widths {dims:?}")));
        }
        Ok(())
    }
}

impl QFunction for Mlp {
    fn input_dim(&self) -> usize {
        self.layers[0].shape().0
    }

    fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].shape().1
    }

    fn forward_batch(&self, inputs: ArrayView2<f64>) -> Result<Array2<f64>> {
        check_input(&inputs, self.input_dim())?;
        Ok(chain_forward(&self.layers, inputs, false).pop().expect("non-empty"))
    }

    fn backprop<F>(&self, inputs: ArrayView2<f64>, output_grad: F) -> Result<(Array2<f64>, Gradients)>
    where
        F: FnOnce(&Array2<f64>) -> Array2<f64>,
    {
        check_input(&inputs, self.input_dim())?;
        let mut acts = chain_forward(&self.layers, inputs, false);
        let delta = output_grad(&acts[self.layers.len()]);
        let (grads, _) = chain_backward(&self.layers, &acts, delta, false, false);
        Ok((acts.pop().expect("non-empty"), grads))
    }

    fn layers(&self) -> Vec<&Dense> {
        self.layers.iter().collect()
    }

    fn layers_mut(&mut self) -> Vec<&mut Dense> {
        self.layers.iter_mut().collect()
    }
}
