//! Haar-distributed spectra and characteristic polynomial coefficients.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Result};
use crate::scalar::{c1, cz, ipow, Real, C};

/// Eigenangles `θ₁, …, θ_N` of a unitary matrix, each in `[−π, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample<T: Real> {
    angles: Vec<T>,
}

impl<T: Real> SpectrumSample<T> {
    /// Wraps every angle into `[−π, π)`.
    pub fn new(angles: Vec<T>) -> Result<Self> {
        if angles.is_empty() {
            return domain("a spectrum needs at least one angle");
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return domain("eigenangles must be finite");
        }
        let pi = T::PI();
        let two_pi = pi + pi;
        let angles = angles
            .into_iter()
            .map(|a| {
                let w = a - two_pi * ((a + pi) / two_pi).floor();
                if w >= pi {
                    w - two_pi
                } else {
                    w
                }
            })
            .collect();
        Ok(SpectrumSample { angles })
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// `e^{iθ_m}` for each angle.
    pub fn unit_points(&self) -> Vec<C<T>> {
        self.angles.iter().map(|&a| C::new(a.cos(), a.sin())).collect()
    }
}

/// Coefficients `c_j` of `P(w) = Π_m (1 − z_m w) = Σ_j c_j w^j`, so that
/// `Z(θ) = P(e^{−iθ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPolySample<T: Real> {
    coeffs: Vec<C<T>>,
}

impl<T: Real> CharPolySample<T> {
    pub fn from_spectrum(spectrum: &SpectrumSample<T>) -> Self {
        let mut c = vec![c1::<T>()];
        for z in spectrum.unit_points() {
            c.push(cz());
            for j in (1..c.len()).rev() {
                let prev = c[j - 1];
                c[j] -= z * prev;
            }
        }
        CharPolySample { coeffs: c }
    }

    /// Takes `c_0, …, c_N` directly; `c_0` must be 1.
    pub fn from_coeffs(coeffs: Vec<C<T>>) -> Result<Self> {
        if coeffs.len() < 2 {
            return domain("a characteristic polynomial needs degree at least one");
        }
        if (coeffs[0] - c1::<T>()).norm() > T::lit(1e-12) {
            return domain("constant coefficient must be 1");
        }
        Ok(CharPolySample { coeffs })
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients of `Z^{(n)}` as a polynomial in `e^{−iθ}`.
    pub fn derivative_coeffs(&self, n: u32) -> Vec<C<T>> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let mag = T::count(j).powi(n as i32);
                *c * ipow::<T>(-(n as i64)) * mag
            })
            .collect()
    }

    /// `Z^{(n)}(θ)`, differentiated termwise.
    pub fn derivative_at(&self, theta: T, n: u32) -> C<T> {
        let w = C::new(theta.cos(), -theta.sin());
        horner(&self.derivative_coeffs(n), w)
    }

    pub fn eval(&self, w: C<T>) -> C<T> {
        horner(&self.coeffs, w)
    }

    /// Power sums `p_0, …, p_upto` of the eigenvalues via Newton's identities.
    pub fn power_sums(&self, upto: usize) -> Vec<C<T>> {
        let n = self.degree();
        let c = &self.coeffs;
        let mut p = Vec::with_capacity(upto + 1);
        p.push(C::new(T::count(n), T::zero()));
        for m in 1..=upto {
            let mut acc = cz::<T>();
            for i in 1..=(m - 1).min(n) {
                acc -= c[i] * p[m - i];
            }
            if m <= n {
                acc -= c[m] * T::count(m);
            }
            p.push(acc);
        }
        p
    }
}

fn horner<T: Real>(c: &[C<T>], w: C<T>) -> C<T> {
    c.iter().rev().fold(cz::<T>(), |acc, x| acc * w + x)
}

/// Eigenangles of a Haar unitary: QR of a complex Ginibre matrix with the
/// phases of `diag(R)` folded back into `Q`, then a complex Schur form.
pub fn haar_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SpectrumSample<f64> {
    assert!(n >= 1, "matrix size must be positive");
    loop {
        let g = DMatrix::from_fn(n, n, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        });
        let qr = g.qr();
        let r = qr.r();
        let mut q = qr.q();
        let mut degenerate = false;
        for j in 0..n {
            let d = r[(j, j)];
            let m = d.norm();
            if m == 0.0 {
                degenerate = true;
                break;
            }
            let phase = d / m;
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
        if degenerate {
            continue;
        }
        let Some(ev) = Schur::new(q).eigenvalues() else {
            continue;
        };
        let angles = ev.iter().map(|z| z.arg()).collect();
        return SpectrumSample::new(angles).expect("finite eigenangles");
    }
}

/// Weyl-density rejection sampler for `N ≤ 3`; the acceptance ratio is
/// `Π_{j<l} |z_j − z_l|² / N^N`.
pub fn rejection_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SpectrumSample<f64>> {
    if !(1..=3).contains(&n) {
        return domain("rejection sampler supports 1 ≤ N ≤ 3");
    }
    let bound = (n as f64).powi(n as i32);
    loop {
        let angles: Vec<f64> = (0..n).map(|_| uniform_angle(rng)).collect();
        let mut w = 1.0;
        for j in 0..n {
            for l in j + 1..n {
                w *= 2.0 - 2.0 * (angles[j] - angles[l]).cos();
            }
        }
        if rng.random::<f64>() * bound < w {
            return SpectrumSample::new(angles);
        }
    }
}

/// Characteristic polynomial of a Haar unitary built from independent
/// Verblunsky coefficients: `|α_k|² ~ Beta(1, N−k−1)` with uniform phase for
/// `k < N−1`, and `α_{N−1}` uniform on the circle, fed through
/// `Φ_{k+1}(z) = zΦ_k(z) − ᾱ_k Φ_k*(z)`.
pub fn verblunsky_char_poly<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CharPolySample<f64> {
    assert!(n >= 1, "matrix size must be positive");
    // phi[i] is the coefficient of z^i in the monic Φ_k.
    let mut phi = vec![Complex64::new(1.0, 0.0)];
    let mut next = Vec::with_capacity(n + 1);
    for k in 0..n {
        let remaining = n - k - 1;
        let radius = if remaining == 0 {
            1.0
        } else {
            let u: f64 = rng.random();
            (1.0 - u.powf(1.0 / remaining as f64)).sqrt()
        };
        let alpha = Complex64::from_polar(radius, uniform_angle(rng));
        let ac = alpha.conj();
        next.clear();
        next.resize(k + 2, Complex64::new(0.0, 0.0));
        for i in 0..=k {
            next[i + 1] += phi[i];
            next[i] -= ac * phi[k - i].conj();
        }
        std::mem::swap(&mut phi, &mut next);
    }
    let coeffs = (0..=n).map(|j| phi[n - j]).collect();
    CharPolySample { coeffs }
}

fn uniform_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    std::f64::consts::PI * (2.0 * rng.random::<f64>() - 1.0)
}
