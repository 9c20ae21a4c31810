//! Kendall's rank correlation.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KendallResult {
    /// Tie-corrected tau-b in `[-1, 1]`.
    pub tau: f64,
    /// Two-sided p-value from the normal approximation.
    pub p_value: f64,
    pub n: usize,
}

/// Kendall's tau-b with a two-sided p-value.
///
/// Pairs are enumerated directly (`O(n^2)`). The null variance of the
/// concordance score includes the usual tie corrections. If either input is
/// constant, tau is reported as 0 with p-value 1.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<KendallResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let mut score: i64 = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let da = sign(a[j] - a[i]);
            let db = sign(b[j] - b[i]);
            score += da * db;
        }
    }

    let ties_a = tie_groups(a);
    let ties_b = tie_groups(b);
    let nf = n as f64;
    let n0 = nf * (nf - 1.0) / 2.0;
    let n1: f64 = ties_a.iter().map(|&t| t * (t - 1.0) / 2.0).sum();
    let n2: f64 = ties_b.iter().map(|&t| t * (t - 1.0) / 2.0).sum();
    let denom = ((n0 - n1) * (n0 - n2)).sqrt();
    if denom == 0.0 {
        return Ok(KendallResult {
            tau: 0.0,
            p_value: 1.0,
            n,
        });
    }
    let s = score as f64;
    let tau = (s / denom).clamp(-1.0, 1.0);

    let v0 = nf * (nf - 1.0) * (2.0 * nf + 5.0);
    let vt: f64 = ties_a
        .iter()
        .map(|&t| t * (t - 1.0) * (2.0 * t + 5.0))
        .sum();
    let vu: f64 = ties_b
        .iter()
        .map(|&t| t * (t - 1.0) * (2.0 * t + 5.0))
        .sum();
    let t1: f64 = ties_a.iter().map(|&t| t * (t - 1.0)).sum();
    let u1: f64 = ties_b.iter().map(|&t| t * (t - 1.0)).sum();
    let mut var = (v0 - vt - vu) / 18.0 + t1 * u1 / (2.0 * nf * (nf - 1.0));
    if n > 2 {
        let t2: f64 = ties_a.iter().map(|&t| t * (t - 1.0) * (t - 2.0)).sum();
        let u2: f64 = ties_b.iter().map(|&t| t * (t - 1.0) * (t - 2.0)).sum();
        var += t2 * u2 / (9.0 * nf * (nf - 1.0) * (nf - 2.0));
    }
    let p_value = if var > 0.0 {
        let z = s / var.sqrt();
        erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(KendallResult { tau, p_value, n })
}

fn sign(x: f64) -> i64 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Sizes of groups of equal values (groups of one omitted).
fn tie_groups(x: &[f64]) -> Vec<f64> {
    let mut sorted = x.to_vec();
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
}
