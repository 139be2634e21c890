use super::{argmax, Minibatch};
use crate::error::Result;
use crate::neural::QFunction;

/// Double-DQN targets: the online network picks `a* = argmax Q(s', .; online)`
/// and the target network scores it, `y = r + gamma Q(s', a*; target)`.
/// Terminal transitions do not bootstrap.
pub fn double_q_targets<Q: QFunction>(
    batch: &Minibatch,
    online: &Q,
    target: &Q,
    gamma: f64,
) -> Result<Vec<f64>> {
    let q_online = online.forward_batch(batch.next_states.view())?;
    let q_target = target.forward_batch(batch.next_states.view())?;
    Ok((0..batch.len())
        .map(|i| {
            if batch.terminals[i] {
                batch.rewards[i]
            } else {
                let row = q_online.row(i);
                let best = argmax(row.as_slice().expect("standard layout"));
                batch.rewards[i] + gamma * q_target[[i, best]]
            }
        })
        .collect())
}

/// Vanilla DQN targets `y = r + gamma max_a Q(s', a; target)`.
pub fn vanilla_q_targets<Q: QFunction>(batch: &Minibatch, target: &Q, gamma: f64) -> Result<Vec<f64>> {
    let q_target = target.forward_batch(batch.next_states.view())?;
    Ok((0..batch.len())
        .map(|i| {
            if batch.terminals[i] {
                batch.rewards[i]
            } else {
                let best = q_target.row(i).iter().copied().fold(f64::NEG_INFINITY, f64::max);
                batch.rewards[i] + gamma * best
            }
        })
        .collect())
}
