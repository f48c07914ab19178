//! Exact, asymptotic and Monte Carlo moments of CUE characteristic
//! polynomials evaluated at their own eigenvalues.

mod mc;
mod sample;

pub use mc::{mc_moment, McEstimate, MeanAccumulator, Observable, Sampler};
pub use sample::{haar_sample, rejection_sample, verblunsky_char_poly, CharPolySample, SpectrumSample};

use std::collections::BTreeMap;

use crate::error::{domain, Result};
use crate::scalar::{c1, cz, factorial, ipow, Real, C};
use crate::series::{Space, TruncSeries};
use crate::special::ln_gamma;
use crate::symfunc::{complete_homogeneous_upto, elem_sym_all, ShiftSet, ValueVector};

/// `Z^{(n)}(θ)` for `Z(θ) = Π_m (1 − e^{iθ_m} e^{−iθ})`.
pub fn char_poly<T: Real>(spectrum: &SpectrumSample<T>, theta: T, n: u32) -> C<T> {
    let coeffs = CharPolySample::from_spectrum(spectrum);
    coeffs.derivative_at(theta, n)
}

/// Fourier coefficients of the Toeplitz symbol built from `A₁, …, A_{k+2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSymbolCoeffs<T: Real> {
    fhat: BTreeMap<i64, C<T>>,
}

impl<T: Real> ToeplitzSymbolCoeffs<T> {
    pub fn get(&self, l: i64) -> C<T> {
        self.fhat.get(&l).copied().unwrap_or(cz())
    }
}

pub fn symbol_coeffs<T: Real>(a: &ValueVector<T>) -> ToeplitzSymbolCoeffs<T> {
    let e = elem_sym_all(a.entries());
    let mut fhat = BTreeMap::new();
    fhat.insert(-1, -c1::<T>());
    for (l, c) in e.iter().enumerate().skip(1) {
        let sign = if (l - 1) % 2 == 0 { T::one() } else { -T::one() };
        fhat.insert(l as i64 - 1, *c * sign);
    }
    ToeplitzSymbolCoeffs { fhat }
}

/// `D_N` from the finite recurrence in the elementary symmetric polynomials.
pub fn toeplitz_recurrence<T: Real>(n: usize, a: &ValueVector<T>) -> C<T> {
    let e = elem_sym_all(a.entries());
    let len = a.len();
    let mut d: Vec<C<T>> = Vec::with_capacity(n + 1);
    d.push(c1());
    for m in 1..=n {
        let mut acc = cz::<T>();
        for j in 1..=m.min(len) {
            let term = e[j] * d[m - j];
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        d.push(acc);
    }
    d[n]
}

/// `(−1)^{k+1} Σ_r A_r^{N+k+1} Π_{j≠r} 1/(A_j − A_r)` for distinct `A`.
pub fn toeplitz_closed<T: Real>(n: usize, a: &ValueVector<T>) -> Result<C<T>> {
    if !a.distinct() {
        return domain("closed form needs distinct symbol parameters");
    }
    let v = a.entries();
    let len = v.len();
    let mut total = cz::<T>();
    for r in 0..len {
        let mut term = v[r].powi((n + len - 1) as i32);
        for j in 0..len {
            if j != r {
                term /= v[j] - v[r];
            }
        }
        total += term;
    }
    Ok(if len % 2 == 1 { total } else { -total })
}

/// `D_N` in the limit `A_{k+1} → A_{k+2} = 1`, given `A₁, …, A_k`.
pub fn toeplitz_confluent<T: Real>(n: usize, a: &[C<T>]) -> Result<C<T>> {
    let k = a.len();
    let one = c1::<T>();
    let eps = T::lit(crate::symfunc::DEFAULT_EPS_DISTINCT);
    if a.iter().any(|x| (*x - one).norm() <= eps)
        || (0..k).any(|i| (i + 1..k).any(|j| (a[i] - a[j]).norm() <= eps))
    {
        return domain("confluent closed form needs distinct parameters away from 1");
    }
    let mut total = cz::<T>();
    for r in 0..k {
        let mut term = a[r].powi((n + k + 1) as i32) / ((a[r] - one) * (a[r] - one));
        for j in 0..k {
            if j != r {
                term /= a[r] - a[j];
            }
        }
        total += term;
    }
    let mut tail = C::new(T::count(n + k + 1), T::zero());
    let mut prod = one;
    for x in a {
        tail -= (one - x).inv();
        prod /= one - x;
    }
    Ok(total + tail * prod)
}

/// `E_N[Π_r Z(θ_N + α_r)]`.
pub fn shifted_moment_exact<T: Real>(n: usize, shifts: &ShiftSet<T>) -> C<T> {
    assert!(n >= 1, "matrix size must be positive");
    let x = shifts.unit_points();
    let k = x.len();
    let one = c1::<T>();
    let nf = T::count(n);
    if shifts.separated() {
        let mut total = C::new(T::count(n + k), T::zero());
        for l in 0..k {
            let mut term = x[l].powi((n + k) as i32) / (one - x[l]);
            for j in 0..k {
                if j != l {
                    term *= (one - x[j]) / (x[l] - x[j]);
                }
            }
            total += term - (one - x[l]).inv();
        }
        total / nf
    } else {
        let mut vals = x.clone();
        vals.push(one);
        vals.push(one);
        let h = complete_homogeneous_upto(n - 1, &vals)[n - 1];
        x.iter().fold(h, |acc, z| acc * (one - z)) / nf
    }
}

/// `Σ_{m<terms} (−1)^m i^{k+m} h_m(a) Π a_j / (m+k+1)!`.
pub fn scaled_limit_series<T: Real>(a: &ValueVector<T>, terms: usize) -> C<T> {
    let v = a.entries();
    let k = v.len();
    let prod = v.iter().fold(c1::<T>(), |acc, z| acc * z);
    let h = complete_homogeneous_upto(terms.saturating_sub(1), v);
    let mut total = cz::<T>();
    for (m, hm) in h.iter().enumerate().take(terms) {
        let sign = if m % 2 == 0 { T::one() } else { -T::one() };
        total += ipow::<T>((k + m) as i64) * *hm * sign / factorial::<T>(m + k + 1);
    }
    total * prod
}

pub const DERIVATIVE_GUARD: i32 = 2;

/// `E_N[(1/N) Σ_n Π_r Z^{(n_r)}(θ_n)]` by exact series extraction.
pub fn derivative_moment_exact<T: Real>(n: usize, orders: &[u32]) -> Result<C<T>> {
    let total: u32 = orders.iter().sum();
    derivative_moment_exact_budget(n, orders, total as i32 + DERIVATIVE_GUARD)
}

/// As [`derivative_moment_exact`] with an explicit total-degree budget.
pub fn derivative_moment_exact_budget<T: Real>(n: usize, orders: &[u32], budget: i32) -> Result<C<T>> {
    if n == 0 {
        return domain("matrix size must be positive");
    }
    if orders.is_empty() || orders.contains(&0) {
        return domain("derivative orders must be positive");
    }
    let total: i32 = orders.iter().map(|&x| x as i32).sum();
    if budget < total {
        return domain(format!("series budget {budget} below total derivative order {total}"));
    }
    let k = orders.len();
    let names: Vec<String> = (1..=k).map(|r| format!("a{r}")).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut space = Space::new(&refs, budget).with_total(budget);
    for (name, &o) in names.iter().zip(orders) {
        space = space.with_max_degree(name, (o as i32 + DERIVATIVE_GUARD).min(budget));
    }
    let space = space.shared();
    let minus_i = C::new(T::zero(), -T::one());
    let mut xs = Vec::with_capacity(k);
    for name in &names {
        xs.push(TruncSeries::<T>::var(&space, name)?.scale(minus_i).exp()?);
    }
    // elementary symmetric polynomials of (x_1, …, x_k, 1, 1)
    let one = TruncSeries::one(&space);
    let mut e: Vec<TruncSeries<T>> = vec![one.clone()];
    e.resize(k + 3, TruncSeries::zero(&space));
    let mut vals = xs.clone();
    vals.push(one.clone());
    vals.push(one.clone());
    for (cnt, x) in vals.iter().enumerate() {
        for j in (1..=cnt + 1).rev() {
            let t = e[j - 1].mul(x)?;
            e[j] = e[j].add(&t)?;
        }
    }
    let len = k + 2;
    let mut d: Vec<TruncSeries<T>> = vec![one.clone()];
    for m in 1..n {
        let mut acc = TruncSeries::zero(&space);
        for j in 1..=m.min(len) {
            let t = e[j].mul(&d[m - j])?;
            acc = if j % 2 == 1 { acc.add(&t)? } else { acc.sub(&t)? };
        }
        d.push(acc);
    }
    let mut moment = d[n - 1].clone();
    for x in &xs {
        moment = moment.mul(&one.sub(x)?)?;
    }
    let exps: Vec<i32> = orders.iter().map(|&o| o as i32).collect();
    let coef = moment.coefficient(&exps)?;
    let scale = orders.iter().fold(T::one(), |acc, &o| acc * factorial::<T>(o as usize));
    Ok(coef * scale / T::count(n))
}

/// `(−1)^{Σn−k} i^{Σn} Π n_r! / (Σn + 1)! · N^{Σn}`.
pub fn derivative_moment_leading<T: Real>(orders: &[u32], n: usize) -> C<T> {
    let s: u32 = orders.iter().sum();
    let k = orders.len() as i64;
    let sign = if (s as i64 - k).rem_euclid(2) == 0 { T::one() } else { -T::one() };
    let num = orders.iter().fold(T::one(), |acc, &o| acc * factorial::<T>(o as usize));
    ipow::<T>(s as i64) * sign * num / factorial::<T>(s as usize + 1) * T::count(n).powi(s as i32)
}

/// `Π_{j=1}^{N} Γ(j)Γ(j+2k)/Γ(j+k)² = E_N |Z|^{2k}`.
pub fn keating_snaith_moment(n: usize, k: f64) -> Result<f64> {
    if k <= -0.5 {
        return domain("moment exponent must exceed −1/2");
    }
    let mut log = 0.0;
    for j in 1..=n {
        let j = j as f64;
        log += ln_gamma(j) + ln_gamma(j + 2.0 * k) - 2.0 * ln_gamma(j + k);
    }
    Ok(log.exp())
}
