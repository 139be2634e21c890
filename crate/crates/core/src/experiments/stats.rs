//! Summary statistics and the Kendall rank test used to judge sweep trends.

use statrs::distribution::{ContinuousCDF, Normal};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (`n - 1` denominator); 0 for fewer than two values.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Kendall rank correlation with its large-sample significance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KendallTest {
    /// Tau-b, corrected for ties.
    pub tau: f64,
    /// Concordant minus discordant pairs.
    pub s: f64,
    /// `S / sqrt(Var S)` with the tie-corrected variance, no continuity correction.
    pub z: f64,
    /// One-sided p-value against an increasing trend.
    pub p_increasing: f64,
    /// One-sided p-value against a decreasing trend.
    pub p_decreasing: f64,
}

pub fn kendall(x: &[f64], y: &[f64]) -> KendallTest {
    assert_eq!(x.len(), y.len(), "paired samples required");
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let sign = ((x[j] - x[i]) * (y[j] - y[i])).signum();
            if x[j] != x[i] && y[j] != y[i] {
                s += sign;
            }
        }
    }
    let ties = |v: &[f64]| {
        let mut sorted = v.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut groups = Vec::new();
        let mut run = 1usize;
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                if run > 1 {
                    groups.push(run as f64);
                }
                run = 1;
            }
        }
        if run > 1 {
            groups.push(run as f64);
        }
        groups
    };
    let tx = ties(x);
    let ty = ties(y);
    let nf = n as f64;
    let n0 = nf * (nf - 1.0) / 2.0;
    let n1: f64 = tx.iter().map(|t| t * (t - 1.0) / 2.0).sum();
    let n2: f64 = ty.iter().map(|u| u * (u - 1.0) / 2.0).sum();
    let tau = s / ((n0 - n1) * (n0 - n2)).sqrt();

    let sum3 = |g: &[f64]| g.iter().map(|t| t * (t - 1.0) * (2.0 * t + 5.0)).sum::<f64>();
    let sum_a = |g: &[f64]| g.iter().map(|t| t * (t - 1.0) * (t - 2.0)).sum::<f64>();
    let sum_b = |g: &[f64]| g.iter().map(|t| t * (t - 1.0)).sum::<f64>();
    let mut var = (nf * (nf - 1.0) * (2.0 * nf + 5.0) - sum3(&tx) - sum3(&ty)) / 18.0;
    if n > 2 {
        var += sum_a(&tx) * sum_a(&ty) / (9.0 * nf * (nf - 1.0) * (nf - 2.0));
    }
    if n > 1 {
        var += sum_b(&tx) * sum_b(&ty) / (2.0 * nf * (nf - 1.0));
    }
    let z = if var > 0.0 { s / var.sqrt() } else { 0.0 };
    let normal = Normal::standard();
    KendallTest {
        tau,
        s,
        z,
        p_increasing: normal.sf(z),
        p_decreasing: normal.cdf(z),
    }
}
