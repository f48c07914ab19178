//! Randomized identity suites comparing closed forms with literal
//! evaluations, shared by the command line and the acceptance tests.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cue::{toeplitz_closed, toeplitz_recurrence};
use crate::error::Result;
use crate::symfunc::{combinatorial_sum, combinatorial_sum_direct, complete_homogeneous, ValueVector};

/// Outcome of one randomized suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub instances: usize,
    /// Largest relative error over instances compared relatively.
    pub max_rel_error: f64,
    /// Largest absolute literal sum over instances whose closed form is 0.
    pub max_zero_branch: f64,
    pub tolerance: f64,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error < self.tolerance && self.max_zero_branch < self.tolerance
    }
}

/// `k` points in the annulus `0.5 ≤ |z| ≤ 2` at mutual distance at least 0.3.
pub fn separated_points<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = Vec::with_capacity(k);
    while pts.len() < k {
        let z = Complex64::from_polar(rng.random_range(0.5..2.0), rng.random_range(-PI..PI));
        if pts.iter().all(|p| (p - z).norm() >= 0.3) {
            pts.push(z);
        }
    }
    pts
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Closed-form alternating sum against the literal sum for random
/// `1 ≤ k ≤ 6`, `−8 ≤ n ≤ 12`.
pub fn combinatorial_suite(instances: usize, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel: f64 = 0.0;
    let mut max_zero: f64 = 0.0;
    for _ in 0..instances {
        let k = rng.random_range(1..=6usize);
        let n = rng.random_range(-8..=12i64);
        let v = ValueVector::new(separated_points(k, &mut rng))?;
        let closed = combinatorial_sum(n, &v)?;
        let literal = combinatorial_sum_direct(n, &v);
        if n >= 1 && n < k as i64 {
            max_zero = max_zero.max(literal.norm()).max(closed.norm());
        } else {
            max_rel = max_rel.max(rel(closed, literal));
        }
    }
    Ok(SuiteReport {
        name: "alternating sum closed form",
        instances,
        max_rel_error: max_rel,
        max_zero_branch: max_zero,
        tolerance: 1e-10,
        elapsed: start.elapsed(),
    })
}

/// Recurrence, closed form and `h_N` for random symbols with `k ≤ 4`,
/// `N ≤ 50`.
pub fn toeplitz_suite(draws: usize, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel: f64 = 0.0;
    for _ in 0..draws {
        let k = rng.random_range(0..=4usize);
        let n = rng.random_range(0..=50usize);
        let a = ValueVector::new(separated_points(k + 2, &mut rng))?;
        let h = complete_homogeneous(n, &a);
        let rec = toeplitz_recurrence(n, &a);
        let closed = toeplitz_closed(n, &a)?;
        max_rel = max_rel.max(rel(rec, h)).max(rel(closed, h));
    }
    Ok(SuiteReport {
        name: "Toeplitz recurrence / closed form / h_N",
        instances: draws,
        max_rel_error: max_rel,
        max_zero_branch: 0.0,
        tolerance: 1e-9,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_separated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = separated_points(6, &mut rng);
        for i in 0..6 {
            assert!((0.5..=2.0).contains(&p[i].norm()));
            for j in 0..i {
                assert!((p[i] - p[j]).norm() >= 0.3);
            }
        }
    }

    #[test]
    fn suites_pass_small() {
        assert!(combinatorial_suite(50, 1).unwrap().passed());
        assert!(toeplitz_suite(20, 1).unwrap().passed());
    }
}
