use serde::{Deserialize, Serialize};

use super::stats::{mean, sample_std};

/// Per-episode learning curve of one `(label, seed)` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    /// Strategy name or sweep point, e.g. `ddqn-ucb` or `pu_slots=12`.
    pub label: String,
    pub seed: u64,
    /// Sum of rewards per episode.
    pub returns: Vec<f64>,
    pub violations: Vec<u32>,
    /// Trailing moving average of `returns`.
    pub asr_smoothed: Vec<f64>,
}

impl MetricSeries {
    pub fn new(label: impl Into<String>, seed: u64, returns: Vec<f64>, violations: Vec<u32>, window: usize) -> Self {
        let asr_smoothed = moving_average(&returns, window);
        Self {
            label: label.into(),
            seed,
            returns,
            violations,
            asr_smoothed,
        }
    }

    pub fn episodes(&self) -> usize {
        self.returns.len()
    }

    /// Mean episode return over the last `window` episodes.
    pub fn final_asr(&self, window: usize) -> f64 {
        mean(tail(&self.returns, window))
    }

    /// Violations per step over the last `window` episodes.
    pub fn final_violation_rate(&self, window: usize, slots_per_episode: usize) -> f64 {
        let v = tail(&self.violations, window);
        v.iter().map(|&x| x as f64).sum::<f64>() / (v.len() * slots_per_episode) as f64
    }
}

fn tail<T>(xs: &[T], window: usize) -> &[T] {
    &xs[xs.len().saturating_sub(window)..]
}

/// Trailing average over up to `window` values; the first entries average
/// whatever history exists, so the output has the input's length.
pub fn moving_average(xs: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut out = Vec::with_capacity(xs.len());
    let mut sum = 0.0;
    for i in 0..xs.len() {
        sum += xs[i];
        if i >= window {
            sum -= xs[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    out
}

/// Final ASR at one sweep point, aggregated over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub mean_final_asr: f64,
    /// Sample standard deviation across seeds (0 for a single seed).
    pub std_final_asr: f64,
    pub seeds: usize,
}

impl SweepRow {
    pub fn from_finals(axis_value: f64, finals: &[f64]) -> Self {
        Self {
            axis_value,
            mean_final_asr: mean(finals),
            std_final_asr: sample_std(finals),
            seeds: finals.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn moving_average_edges() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(moving_average(&xs, 2), vec![1.0, 1.5, 2.5, 3.5, 4.5]);
        assert_eq!(moving_average(&xs, 10), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(moving_average(&xs, 1), xs.to_vec());
        assert!(moving_average(&[], 3).is_empty());
    }

    #[test]
    fn final_window_statistics() {
        let s = MetricSeries::new("x", 1, vec![0.0, 10.0, 20.0, 30.0], vec![3, 0, 1, 1], 2);
        assert_eq!(s.final_asr(2), 25.0);
        assert_eq!(s.final_asr(100), 15.0);
        assert_eq!(s.final_violation_rate(2, 10), 0.1);
    }

    proptest! {
        #[test]
        fn smoothing_preserves_length_and_bounds(
            xs in proptest::collection::vec(-50.0f64..50.0, 0..200),
            w in 1usize..80,
        ) {
            let sm = moving_average(&xs, w);
            prop_assert_eq!(sm.len(), xs.len());
            for (i, v) in sm.iter().enumerate() {
                let lo = i.saturating_sub(w - 1);
                let win = &xs[lo..=i];
                let min = win.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = win.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(*v >= min - 1e-9 && *v <= max + 1e-9);
            }
        }
    }
}
