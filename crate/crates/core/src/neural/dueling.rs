use ndarray::{Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dense::{chain_backward, chain_forward, relu_mask, Dense};
use super::{check_input, Gradients, QFunction};
use crate::error::{Error, Result};

/// Dueling Q-network: a shared rectified trunk feeding a state-value stream
/// and an advantage stream, combined as `Q = V + A - mean(A)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuelingNet {
    trunk: Dense,
    value: Vec<Dense>,
    advantage: Vec<Dense>,
}

impl DuelingNet {
    /// `inputs -> trunk -> (stream -> 1, stream -> actions)`.
    pub fn new<R: Rng + ?Sized>(
        inputs: usize,
        trunk: usize,
        stream: usize,
        actions: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if [inputs, trunk, stream, actions].contains(&0) {
            return Err(Error::Usage("dueling network widths must be positive".into()));
        }
        Ok(Self {
            trunk: Dense::glorot(inputs, trunk, rng),
            value: vec![Dense::glorot(trunk, stream, rng), Dense::glorot(stream, 1, rng)],
            advantage: vec![
                Dense::glorot(trunk, stream, rng),
                Dense::glorot(stream, actions, rng),
            ],
        })
    }

    /// State value and raw advantages for a batch.
    pub fn streams(&self, inputs: ArrayView2<f64>) -> Result<(Array2<f64>, Array2<f64>)> {
        check_input(&inputs, self.input_dim())?;
        let hidden = chain_forward(std::slice::from_ref(&self.trunk), inputs, true)
            .pop()
            .expect("non-empty");
        let value = chain_forward(&self.value, hidden.view(), false).pop().expect("non-empty");
        let adv = chain_forward(&self.advantage, hidden.view(), false).pop().expect("non-empty");
        Ok((value, adv))
    }

    /// The dueling aggregation `V + A - mean(A)` row by row.
    pub fn combine(value: &Array2<f64>, advantage: &Array2<f64>) -> Array2<f64> {
        let mean = advantage.mean_axis(Axis(1)).expect("non-empty advantage");
        let mut q = advantage.clone();
        for ((mut row, v), m) in q.outer_iter_mut().zip(value.column(0)).zip(mean.iter()) {
            row.mapv_inplace(|a| a + v - m);
        }
        q
    }
}

impl QFunction for DuelingNet {
    fn input_dim(&self) -> usize {
        self.trunk.shape().0
    }

    fn output_dim(&self) -> usize {
        self.advantage[1].shape().1
    }

    fn forward_batch(&self, inputs: ArrayView2<f64>) -> Result<Array2<f64>> {
        let (v, a) = self.streams(inputs)?;
        Ok(Self::combine(&v, &a))
    }

    fn backprop<F>(&self, inputs: ArrayView2<f64>, output_grad: F) -> Result<(Array2<f64>, Gradients)>
    where
        F: FnOnce(&Array2<f64>) -> Array2<f64>,
    {
        check_input(&inputs, self.input_dim())?;
        let trunk_acts = chain_forward(std::slice::from_ref(&self.trunk), inputs, true);
        let hidden = trunk_acts[1].view();
        let v_acts = chain_forward(&self.value, hidden, false);
        let a_acts = chain_forward(&self.advantage, hidden, false);
        let q = Self::combine(&v_acts[2], &a_acts[2]);

        let dq = output_grad(&q);
        let dv = dq.sum_axis(Axis(1)).insert_axis(Axis(1));
        let mean_dq = dq.mean_axis(Axis(1)).expect("non-empty");
        let mut da = dq;
        for (mut row, m) in da.outer_iter_mut().zip(mean_dq.iter()) {
            row.mapv_inplace(|g| g - m);
        }

        let (v_grads, dh_v) = chain_backward(&self.value, &v_acts, dv, false, true);
        let (a_grads, dh_a) = chain_backward(&self.advantage, &a_acts, da, false, true);
        let mut dh = dh_v.expect("requested") + dh_a.expect("requested");
        relu_mask(&mut dh, &trunk_acts[1]);
        let trunk_grad = Dense::grads(&inputs, &dh);

        let mut grads = vec![trunk_grad];
        grads.extend(v_grads);
        grads.extend(a_grads);
        Ok((q, grads))
    }

    fn layers(&self) -> Vec<&Dense> {
        std::iter::once(&self.trunk)
            .chain(self.value.iter())
            .chain(self.advantage.iter())
            .collect()
    }

    fn layers_mut(&mut self) -> Vec<&mut Dense> {
        std::iter::once(&mut self.trunk)
            .chain(self.value.iter_mut())
            .chain(self.advantage.iter_mut())
            .collect()
    }
}
