//! Cumulative sums of products of ζ-derivatives over the zeros.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{zeta_derivs_with, ZeroRecord, CAUCHY_NODES, CAUCHY_RADIUS, MAX_DERIVATIVE};
use crate::error::{domain, Result};

/// One output row; the prediction columns are `NaN` until filled by a
/// comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    /// Number of zeros in the sum.
    pub count: usize,
    /// Height of the last zero included.
    pub t: f64,
    pub sum: Complex64,
    pub prediction: f64,
    pub residual_leading: f64,
    pub residual_full: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTrace {
    pub orders: Vec<u32>,
    pub rows: Vec<TraceRow>,
}

/// `Σ_{γ ≤ T} Π_r ζ^{(n_r)}(1/2 + iγ)`, one row every `stride` zeros and
/// always one for the last zero.
pub fn discrete_moment(zeros: &[ZeroRecord], orders: &[u32], stride: usize) -> Result<MomentTrace> {
    if orders.is_empty() {
        return domain("at least one derivative order is required");
    }
    if stride == 0 {
        return domain("row stride must be positive");
    }
    let top = *orders.iter().max().expect("nonempty") as usize;
    if top > MAX_DERIVATIVE {
        return domain(format!("derivative order above {MAX_DERIVATIVE}"));
    }
    if zeros.windows(2).any(|w| w[1].gamma <= w[0].gamma) {
        return domain("zeros must be sorted by height");
    }
    let terms: Vec<Complex64> = zeros
        .par_iter()
        .map(|z| {
            let d = zeta_derivs_with(top, z.gamma, CAUCHY_RADIUS, CAUCHY_NODES)?;
            Ok(orders.iter().fold(Complex64::new(1.0, 0.0), |acc, &n| acc * d[n as usize]))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(zeros.len() / stride + 1);
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, (z, term)) in zeros.iter().zip(&terms).enumerate() {
        sum += term;
        let count = i + 1;
        if count % stride == 0 || count == zeros.len() {
            rows.push(TraceRow {
                count,
                t: z.gamma,
                sum,
                prediction: f64::NAN,
                residual_leading: f64::NAN,
                residual_full: f64::NAN,
            });
        }
    }
    Ok(MomentTrace { orders: orders.to_vec(), rows })
}

/// Largest `|Im sum| / |Re sum|` over rows with more than `after` zeros.
pub fn max_imag_ratio(trace: &MomentTrace, after: usize) -> f64 {
    trace
        .rows
        .iter()
        .filter(|r| r.count > after)
        .map(|r| r.sum.im.abs() / r.sum.re.abs())
        .fold(0.0, f64::max)
}
