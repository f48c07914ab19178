//! Monte Carlo moments over Haar spectra.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::sample::{haar_sample, rejection_sample, verblunsky_char_poly, CharPolySample};
use crate::error::{domain, Error, Result};

/// Independent random streams; the split is fixed so results do not depend
/// on the thread count.
const CHUNKS: u64 = 64;

/// Quantity averaged over the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// `(1/N) Σ_n Π_r Z(θ_n + α_r)`.
    Shifts(Vec<Complex64>),
    /// `(1/N) Σ_n Π_r Z^{(n_r)}(θ_n)`.
    Orders(Vec<u32>),
    /// `|Z(θ)|^{2k}` at a fixed angle.
    AbsPower { k: u32, theta: f64 },
}

impl Observable {
    /// Evaluates the observable on one characteristic polynomial.
    pub fn evaluate(&self, cp: &CharPolySample<f64>) -> Complex64 {
        match self {
            Observable::Shifts(alphas) => {
                let factors: Vec<Vec<Complex64>> = alphas
                    .iter()
                    .map(|a| {
                        let x = (-Complex64::i() * a).exp();
                        let mut pw = Complex64::new(1.0, 0.0);
                        cp.coeffs()
                            .iter()
                            .map(|c| {
                                let t = c * pw;
                                pw *= x;
                                t
                            })
                            .collect()
                    })
                    .collect();
                eigen_average(cp, &factors)
            }
            Observable::Orders(orders) => {
                let factors: Vec<Vec<Complex64>> = orders.iter().map(|&n| cp.derivative_coeffs(n)).collect();
                eigen_average(cp, &factors)
            }
            Observable::AbsPower { k, theta } => {
                let z = cp.derivative_at(*theta, 0).norm_sqr();
                Complex64::new(z.powi(*k as i32), 0.0)
            }
        }
    }
}

/// `(1/N) Σ_n Q(z̄_n)` with `Q = Π` of the factor polynomials, through
/// `Σ_n z̄_n^j = conj(p_j)`.
fn eigen_average(cp: &CharPolySample<f64>, factors: &[Vec<Complex64>]) -> Complex64 {
    let mut q = vec![Complex64::new(1.0, 0.0)];
    for f in factors {
        let mut next = vec![Complex64::new(0.0, 0.0); q.len() + f.len() - 1];
        for (i, a) in q.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        q = next;
    }
    let p = cp.power_sums(q.len() - 1);
    let s: Complex64 = q.iter().zip(&p).map(|(a, b)| a * b.conj()).sum();
    s / cp.degree() as f64
}

/// Source of Haar characteristic polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampler {
    /// Independent Verblunsky coefficients through the Szegő recursion.
    #[default]
    Verblunsky,
    /// Phase-corrected QR of a Ginibre matrix plus Schur eigenvalues.
    Qr,
    /// Weyl-density rejection, `N ≤ 3` only.
    Rejection,
}

impl Sampler {
    fn draw(self, n: usize, rng: &mut ChaCha8Rng) -> CharPolySample<f64> {
        match self {
            Sampler::Verblunsky => verblunsky_char_poly(n, rng),
            Sampler::Qr => CharPolySample::from_spectrum(&haar_sample(n, rng)),
            Sampler::Rejection => {
                CharPolySample::from_spectrum(&rejection_sample(n, rng).expect("size checked before sampling"))
            }
        }
    }
}

/// Mergeable running mean and variance of a complex statistic, kept
/// componentwise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanAccumulator {
    count: u64,
    mean: Complex64,
    m2_re: f64,
    m2_im: f64,
}

impl MeanAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: Complex64) {
        self.count += 1;
        let n = self.count as f64;
        let d = x - self.mean;
        self.mean += d / n;
        let d2 = x - self.mean;
        self.m2_re += d.re * d2.re;
        self.m2_im += d.im * d2.im;
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &MeanAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        let d = other.mean - self.mean;
        self.mean += d * (nb / n);
        self.m2_re += other.m2_re + d.re * d.re * na * nb / n;
        self.m2_im += other.m2_im + d.im * d.im * na * nb / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> Complex64 {
        self.mean
    }

    pub fn estimate(&self) -> McEstimate {
        let se = |m2: f64| {
            if self.count < 2 {
                0.0
            } else {
                let n = self.count as f64;
                (m2 / (n - 1.0) / n).sqrt()
            }
        };
        McEstimate {
            mean: self.mean,
            stderr_re: se(self.m2_re),
            stderr_im: se(self.m2_im),
            samples: self.count,
        }
    }
}

/// Sample mean with componentwise standard errors of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub samples: u64,
}

impl McEstimate {
    /// Standard error of the complex mean, `√(σ_re² + σ_im²)`.
    pub fn stderr(&self) -> f64 {
        self.stderr_re.hypot(self.stderr_im)
    }

    /// `|mean − exact|` in units of [`McEstimate::stderr`]; a rounding floor
    /// keeps deterministic cases finite.
    pub fn deviation_sigmas(&self, exact: Complex64) -> f64 {
        let dev = (self.mean - exact).norm();
        let floor = 1e-12 * (1.0 + exact.norm());
        if dev <= floor {
            0.0
        } else {
            dev / self.stderr().max(floor)
        }
    }

    pub fn within(&self, exact: Complex64, sigmas: f64) -> bool {
        self.deviation_sigmas(exact) < sigmas
    }
}

/// Monte Carlo mean of `observable` over `samples` Haar matrices of size `n`.
/// Streams are seeded from `seed` and split into fixed chunks, so the result
/// is reproducible for any `threads` cap.
pub fn mc_moment(
    n: usize,
    observable: &Observable,
    samples: usize,
    seed: u64,
    sampler: Sampler,
    threads: Option<usize>,
) -> Result<McEstimate> {
    if n == 0 {
        return domain("matrix size must be positive");
    }
    if samples < 100 {
        return domain("Monte Carlo needs at least 100 samples");
    }
    if sampler == Sampler::Rejection && n > 3 {
        return domain("rejection sampler supports 1 ≤ N ≤ 3");
    }
    match observable {
        Observable::Shifts(a) if a.is_empty() => return domain("at least one shift is required"),
        Observable::Orders(o) if o.is_empty() => return domain("at least one derivative order is required"),
        _ => {}
    }
    let per = samples as u64 / CHUNKS;
    let extra = samples as u64 % CHUNKS;
    let run = || -> Vec<MeanAccumulator> {
        (0..CHUNKS)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(chunk);
                let mut acc = MeanAccumulator::new();
                let count = per + u64::from(chunk < extra);
                for _ in 0..count {
                    let cp = sampler.draw(n, &mut rng);
                    acc.push(observable.evaluate(&cp));
                }
                acc
            })
            .collect()
    };
    let parts = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let mut total = MeanAccumulator::new();
    for p in &parts {
        total.merge(p);
    }
    Ok(total.estimate())
}
