use ndarray::{Array2, ArrayView2};

use super::{Gradients, QFunction};
use crate::error::{Error, Result};

/// Mean squared error between `targets` and the Q-value of each sample's
/// taken action, with its parameter gradients.
///
/// Only the selected output of each row receives gradient; the other actions
/// contribute nothing to the loss.
pub fn mse_loss_and_grad<Q: QFunction>(
    net: &Q,
    states: ArrayView2<f64>,
    actions: &[usize],
    targets: &[f64],
) -> Result<(f64, Gradients)> {
    let n = states.nrows();
    if n == 0 {
        return Err(Error::Usage("empty minibatch".into()));
    }
    if actions.len() != n || targets.len() != n {
        return Err(Error::Usage(format!(
            "batch of {n} states with {} actions and {} targets",
            actions.len(),
            targets.len()
        )));
    }
    if let Some(&a) = actions.iter().find(|&&a| a >= net.output_dim()) {
        return Err(Error::Usage(format!("action {a} outside {} outputs", net.output_dim())));
    }
    if states.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite value in minibatch states".into()));
    }
    if targets.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite regression target".into()));
    }

    let mut loss = 0.0;
    let (_, grads) = net.backprop(states, |q| {
        let mut dq = Array2::zeros(q.dim());
        for (row, (&a, &y)) in actions.iter().zip(targets).enumerate() {
            let err = q[[row, a]] - y;
            loss += err * err;
            dq[[row, a]] = 2.0 * err / n as f64;
        }
        dq
    })?;
    loss /= n as f64;
    if !loss.is_finite() || grads.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numeric(format!("loss or gradient diverged (loss = {loss})")));
    }
    Ok((loss, grads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::{Dense, Mlp};
    use ndarray::{arr1, arr2, Array2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_targets_give_zero_loss_and_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = Mlp::new(&[6, 8, 8, 4], &mut rng).unwrap();
        let states = Array2::from_shape_fn((3, 6), |(i, j)| (i * 6 + j) as f64 / 18.0);
        let q = net.forward_batch(states.view()).unwrap();
        let actions = [0, 3, 1];
        let targets: Vec<f64> = actions.iter().enumerate().map(|(i, &a)| q[[i, a]]).collect();
        let (loss, grads) = mse_loss_and_grad(&net, states.view(), &actions, &targets).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grads.iter().all(|g| g.weights.iter().chain(g.bias.iter()).all(|&v| v == 0.0)));
    }

    #[test]
    fn linear_scalar_by_hand() {
        // Q = w x with w = 2, x = 1, target 3: loss (3-2)^2 = 1, dL/dw = -2.
        let net = Mlp::from_layers(vec![Dense { weights: arr2(&[[2.0]]), bias: arr1(&[0.0]) }]).unwrap();
        let states = arr2(&[[1.0]]);
        let (loss, grads) = mse_loss_and_grad(&net, states.view(), &[0], &[3.0]).unwrap();
        assert_eq!(loss, 1.0);
        assert_eq!(grads[0].weights[[0, 0]], -2.0);
        assert_eq!(grads[0].bias[0], -2.0);
    }

    #[test]
    fn non_finite_inputs_are_reported() {
        let net = Mlp::zeros(&[2, 3, 2]).unwrap();
        let states = arr2(&[[f64::NAN, 1.0]]);
        assert!(matches!(
            mse_loss_and_grad(&net, states.view(), &[0], &[1.0]),
            Err(Error::Numeric(_))
        ));
        let states = arr2(&[[0.0, 1.0]]);
        assert!(matches!(
            mse_loss_and_grad(&net, states.view(), &[0], &[f64::INFINITY]),
            Err(Error::Numeric(_))
        ));
        assert!(matches!(
            mse_loss_and_grad(&net, states.view(), &[2], &[1.0]),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn unselected_output_weights_do_not_matter() {
        // Zero shared layers isolate the output layer: perturbing a weight
        // column of an unselected action leaves loss and gradients unchanged.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut net = Mlp::new(&[3, 4, 5], &mut rng).unwrap();
        let states = arr2(&[[0.2, 0.4, 0.9], [0.7, 0.1, 0.3]]);
        let actions = [1, 1];
        let targets = [0.5, -0.25];
        let (l0, g0) = mse_loss_and_grad(&net, states.view(), &actions, &targets).unwrap();
        net.layers_mut()[1].weights[[2, 3]] += 10.0;
        net.layers_mut()[1].bias[4] -= 3.0;
        let (l1, g1) = mse_loss_and_grad(&net, states.view(), &actions, &targets).unwrap();
        assert_eq!(l0, l1);
        assert_eq!(g0, g1);
        // The perturbed columns never receive gradient.
        assert!(g1[1].weights.column(3).iter().all(|&v| v == 0.0));
        assert_eq!(g1[1].bias[4], 0.0);
    }
}
