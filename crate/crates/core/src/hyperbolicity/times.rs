use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicTimeParams {
    pub b_rate: f64,
    pub delta1: f64,
}

impl HyperbolicTimeParams {
    pub fn new(b_rate: f64, delta1: f64) -> Result<Self> {
        if b_rate > 0.0 && delta1 > 0.0 {
            Ok(HyperbolicTimeParams { b_rate, delta1 })
        } else {
            Err(Error::ParameterOutOfRange(format!(
                "hyperbolic-time parameters must be positive: b={b_rate}, δ1={delta1}"
            )))
        }
    }
}

/// Indices n ≥ 1 (1-based, `lognorms[j−1]` is the term j) with every suffix
/// average of terms n−k+1..n at most −b.
///
/// With T_m = Σ_{j≤m} ℓ_j + b·m, n qualifies iff T_n ≤ T_m for all m < n.
pub fn hyperbolic_times<S: Real>(lognorms: &[S], b_rate: S) -> Vec<usize> {
    let mut out = Vec::new();
    let mut sum = S::zero();
    let mut running_min = S::zero();
    for (i, &l) in lognorms.iter().enumerate() {
        let n = i + 1;
        sum = sum + l;
        let t = sum + b_rate * S::int(n as i64);
        if t <= running_min {
            out.push(n);
        }
        running_min = running_min.min(t);
    }
    out
}

/// Quadratic reference: checks every window ending at each n.
pub fn hyperbolic_times_brute<S: Real>(lognorms: &[S], b_rate: S) -> Vec<usize> {
    (1..=lognorms.len())
        .filter(|&n| {
            let mut sum = S::zero();
            (1..=n).all(|k| {
                sum = sum + lognorms[n - k];
                sum <= -b_rate * S::int(k as i64)
            })
        })
        .collect()
}

/// Fraction of 1..=n that are hyperbolic times.
pub fn pliss_density<S: Real>(lognorms: &[S], b_rate: S) -> f64 {
    if lognorms.is_empty() {
        return 0.0;
    }
    hyperbolic_times(lognorms, b_rate).len() as f64 / lognorms.len() as f64
}
