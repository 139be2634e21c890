//! Small dense Q-networks trained with hand-written backpropagation.
//!
//! Both architectures expose the [`QFunction`] trait: batched forward passes,
//! a `backprop` that turns a gradient on the outputs into parameter
//! gradients, and flat access to the layer list for optimizers and
//! checkpoints. [`QNetwork`] wraps either one for the agents.

mod adam;
mod dense;
mod dueling;
mod loss;
mod mlp;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

pub use adam::{Adam, LrSchedule};
pub use dense::Dense;
pub use dueling::DuelingNet;
pub use loss::mse_loss_and_grad;
pub use mlp::Mlp;

use crate::error::{Error, Result};

/// Parameter gradients, one [`Dense`] per layer in [`QFunction::layers`] order.
pub type Gradients = Vec<Dense>;

pub trait QFunction {
    fn input_dim(&self) -> usize;

    fn output_dim(&self) -> usize;

    /// Q-values for a batch of inputs laid out one row per sample.
    fn forward_batch(&self, inputs: ArrayView2<f64>) -> Result<Array2<f64>>;

    /// Runs a forward pass, asks `output_grad` for `dL/dQ` given the outputs,
    /// and backpropagates it. Returns the outputs and parameter gradients.
    fn backprop<F>(&self, inputs: ArrayView2<f64>, output_grad: F) -> Result<(Array2<f64>, Gradients)>
    where
        F: FnOnce(&Array2<f64>) -> Array2<f64>;

    fn layers(&self) -> Vec<&Dense>;

    fn layers_mut(&mut self) -> Vec<&mut Dense>;

    fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        let view = ArrayView2::from_shape((1, input.len()), input)
            .map_err(|e| Error::Usage(e.to_string()))?;
        Ok(self.forward_batch(view)?.into_raw_vec_and_offset().0)
    }

    fn param_count(&self) -> usize {
        self.layers().iter().map(|l| l.param_count()).sum()
    }

    /// Overwrites this network's parameters with `source`'s.
    fn copy_from(&mut self, source: &Self) -> Result<()>
    where
        Self: Sized,
    {
        let src = source.layers();
        let mut dst = self.layers_mut();
        if src.len() != dst.len() || src.iter().zip(&dst).any(|(s, d)| s.shape() != d.shape()) {
            return Err(Error::Usage("cannot copy between networks of different topology".into()));
        }
        for (d, s) in dst.iter_mut().zip(src) {
            d.weights.assign(&s.weights);
            d.bias.assign(&s.bias);
        }
        Ok(())
    }
}

/// Either Q-network architecture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QNetwork {
    Dense(Mlp),
    Dueling(DuelingNet),
}

impl QNetwork {
    /// Layer widths as a flat list, used to describe checkpoints.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        self.layers().iter().map(|l| l.shape()).collect()
    }
}

impl QFunction for QNetwork {
    fn input_dim(&self) -> usize {
        match self {
            Self::Dense(n) => n.input_dim(),
            Self::Dueling(n) => n.input_dim(),
        }
    }

    fn output_dim(&self) -> usize {
        match self {
            Self::Dense(n) => n.output_dim(),
            Self::Dueling(n) => n.output_dim(),
        }
    }

    fn forward_batch(&self, inputs: ArrayView2<f64>) -> Result<Array2<f64>> {
        match self {
            Self::Dense(n) => n.forward_batch(inputs),
            Self::Dueling(n) => n.forward_batch(inputs),
        }
    }

    fn backprop<F>(&self, inputs: ArrayView2<f64>, output_grad: F) -> Result<(Array2<f64>, Gradients)>
    where
        F: FnOnce(&Array2<f64>) -> Array2<f64>,
    {
        match self {
            Self::Dense(n) => n.backprop(inputs, output_grad),
            Self::Dueling(n) => n.backprop(inputs, output_grad),
        }
    }

    fn layers(&self) -> Vec<&Dense> {
        match self {
            Self::Dense(n) => n.layers(),
            Self::Dueling(n) => n.layers(),
        }
    }

    fn layers_mut(&mut self) -> Vec<&mut Dense> {
        match self {
            Self::Dense(n) => n.layers_mut(),
            Self::Dueling(n) => n.layers_mut(),
        }
    }
}

pub(crate) fn check_input(inputs: &ArrayView2<f64>, expected: usize) -> Result<()> {
    if inputs.ncols() != expected {
        return Err(Error::Usage(format!(
            "network expects {expected} inputs, got {}",
            inputs.ncols()
        )));
    }
    Ok(())
}
