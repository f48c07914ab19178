//! Stieltjes constants, prime tables and the arithmetic factor
//! `A_{α₁…α_k}(δ)` with its Taylor coefficients at the origin.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::series::{Space, TruncSeries, EXACT};
use crate::special::{factorial_f64, BERNOULLI_SCALED};
use crate::symfunc::{elem_sym_all, ShiftSet};

pub const MAX_STIELTJES: usize = 8;
pub const DEFAULT_PRIME_COUNT: usize = 1000;

fn stieltjes_em(n: usize) -> f64 {
    const N: usize = 6;
    let nf = N as f64;
    let ln_n = nf.ln();
    let mut sum = 0.0;
    for k in 2..N {
        let l = (k as f64).ln();
        sum += l.powi(n as i32) / k as f64;
    }
    if n == 0 {
        sum += 1.0;
    }
    sum -= ln_n.powi(n as i32 + 1) / (n as f64 + 1.0);
    sum += 0.5 * ln_n.powi(n as i32) / nf;
    // f^{(r)}(x) = P_r(log x) / x^{r+1}, P_{r+1} = P_r' − (r+1) P_r
    let mut p = vec![0.0; n + 1];
    p[n] = 1.0;
    for (j, b) in BERNOULLI_SCALED.iter().enumerate().take(20) {
        let order = 2 * j + 1;
        while derivative_order(&p, n) < order {
            p = next_poly(&p, derivative_order(&p, n));
        }
        let val: f64 = p.iter().rev().fold(0.0, |acc, c| acc * ln_n + c);
        sum -= b * val / nf.powi(order as i32 + 1);
    }
    sum
}

// Tracks the differentiation order through the polynomial length.
fn derivative_order(p: &[f64], n: usize) -> usize {
    p.len() - (n + 1)
}

fn next_poly(p: &[f64], r: usize) -> Vec<f64> {
    let m = (r + 1) as f64;
    let mut out = vec![0.0; p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i] -= m * c;
        if i > 0 {
            out[i - 1] += i as f64 * c;
        }
    }
    out
}

fn stieltjes_table() -> &'static [f64; MAX_STIELTJES + 1] {
    static TABLE: OnceLock<[f64; MAX_STIELTJES + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; MAX_STIELTJES + 1];
        for (n, slot) in t.iter_mut().enumerate() {
            *slot = stieltjes_em(n);
        }
        t
    })
}

/// Stieltjes constant `γ_n`, `0 ≤ n ≤ 8`.
pub fn stieltjes(n: usize) -> Result<f64> {
    if n > MAX_STIELTJES {
        return Err(Error::UnsupportedOrder(format!("Stieltjes constant γ_{n} (supported up to γ_{MAX_STIELTJES})")));
    }
    Ok(stieltjes_table()[n])
}

pub fn write_stieltjes_cache(path: &Path) -> Result<()> {
    let mut out = String::from("# stieltjes v1\n");
    for (n, g) in stieltjes_table().iter().enumerate() {
        writeln!(out, "{n}\t{g:.14e}").expect("string write");
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_stieltjes_cache(path: &Path) -> Result<Vec<(usize, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let bad = || Error::Parse { line: i + 1, msg: line.to_string() };
        let n = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let g = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        out.push((n, g));
    }
    Ok(out)
}

/// The first `count` primes in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn first(count: usize) -> Self {
        let mut bound = 64usize.max(count * 2);
        loop {
            let ps = sieve(bound);
            if ps.len() >= count {
                return Self { primes: ps[..count].to_vec() };
            }
            bound *= 2;
        }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

fn sieve(bound: usize) -> Vec<u64> {
    let mut composite = vec![false; bound + 1];
    let mut out = Vec::new();
    for n in 2..=bound {
        if !composite[n] {
            out.push(n as u64);
            let mut m = n * n;
            while m <= bound {
                composite[m] = true;
                m += n;
            }
        }
    }
    out
}

/// Truncated Euler product `Π_p (1 + F₁ + … + F_k) / Π_j (1 − p^{−1−α_j})`.
pub fn arith_factor(shifts: &ShiftSet<f64>, delta: Complex64, primes: &PrimeTable) -> Result<Complex64> {
    if shifts.shifts().iter().any(|a| a.re.abs() >= 0.25) || delta.norm() >= 0.25 {
        return domain("arithmetic factor needs |Re α_j| < 1/4 and |δ| < 1/4");
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for &p in primes.primes() {
        let lp = (p as f64).ln();
        let x: Vec<Complex64> = shifts.shifts().iter().map(|a| (-a * lp).exp()).collect();
        let e = elem_sym_all(&x);
        let mut num = Complex64::new(1.0, 0.0);
        for (m, em) in e.iter().enumerate().skip(1) {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let mf = m as f64;
            num += sign * (-(mf + (mf - 1.0) * delta) * lp).exp() * em;
        }
        let mut den = Complex64::new(1.0, 0.0);
        for xj in &x {
            den *= 1.0 - xj / p as f64;
        }
        acc *= num / den;
    }
    Ok(acc)
}

/// Variables `a1 … ak, d` with total degree `total`.
pub fn arith_space(k: usize, total: i32) -> Arc<Space> {
    let mut names: Vec<String> = (1..=k).map(|j| format!("a{j}")).collect();
    names.push("d".into());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Space::new(&refs, total).with_total(total).shared()
}

/// Multinomial expansion of `c · exp(s·(Σ_j w_j v_j))` to the space's total degree.
fn exp_linear(space: &Arc<Space>, weights: &[f64], s: f64, c: f64, total: i32) -> Result<TruncSeries<f64>> {
    let n = weights.len();
    let mut terms = Vec::new();
    let mut e = vec![0i32; n];
    loop {
        let deg: i32 = e.iter().sum();
        if deg <= total && e.iter().zip(weights).all(|(x, w)| *x == 0 || *w != 0.0) {
            let mut v = c * s.powi(deg);
            for (x, w) in e.iter().zip(weights) {
                v *= w.powi(*x) / factorial_f64(*x as usize);
            }
            terms.push((e.clone(), Complex64::new(v, 0.0)));
        }
        let mut v = 0;
        loop {
            if v == n {
                let hi = vec![EXACT; n];
                return TruncSeries::from_terms(space, &terms, hi, total);
            }
            if e[v] < total {
                e[v] += 1;
                break;
            }
            e[v] = 0;
            v += 1;
        }
    }
}

fn per_prime_log(space: &Arc<Space>, k: usize, p: u64, total: i32) -> Result<TruncSeries<f64>> {
    let pf = p as f64;
    let lp = pf.ln();
    let mut num = TruncSeries::one(space);
    for mask in 1u32..(1u32 << k) {
        let m = mask.count_ones() as usize;
        let mut w = vec![0.0; k + 1];
        for (j, wj) in w.iter_mut().take(k).enumerate() {
            if mask & (1 << j) != 0 {
                *wj = 1.0;
            }
        }
        w[k] = (m - 1) as f64;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        num = num.add(&exp_linear(space, &w, -lp, sign * pf.powi(-(m as i32)), total)?)?;
    }
    let c0 = (1.0 - 1.0 / pf).powi(k as i32);
    let mut log = num.scale(Complex64::new(1.0 / c0, 0.0)).log()?;
    // −log(1 − p^{−1−a}) = Σ_r p^{−r} e^{−r a log p} / r, minus its value at a = 0
    for j in 0..k {
        let mut terms = Vec::new();
        for deg in 1..=total {
            let mut coef = 0.0;
            for r in 1..200 {
                let t = pf.powi(-r) * (-(r as f64) * lp).powi(deg) / r as f64;
                coef += t;
                if t.abs() < 1e-20 * coef.abs() {
                    break;
                }
            }
            let mut e = vec![0; k + 1];
            e[j] = deg;
            terms.push((e, Complex64::new(coef / factorial_f64(deg as usize), 0.0)));
        }
        log = log.add(&TruncSeries::from_terms(space, &terms, vec![EXACT; k + 1], total)?)?;
    }
    Ok(log)
}

/// `log A` as a series in `(a1 … ak, d)` to total degree `total`.
pub fn arith_log_series(k: usize, total: i32, primes: &PrimeTable) -> Result<TruncSeries<f64>> {
    if primes.len() < 10 {
        return domain("arithmetic series needs at least 10 primes");
    }
    let space = arith_space(k, total);
    let mut acc = TruncSeries::zero(&space);
    for &p in primes.primes() {
        acc = acc.add(&per_prime_log(&space, k, p, total)?)?;
    }
    Ok(acc)
}

/// `A_{a1…ak}(d)` as a series to total degree `total`.
pub fn arith_series(k: usize, total: i32, primes: &PrimeTable) -> Result<TruncSeries<f64>> {
    let log = arith_log_series(k, total, primes)?;
    let c = log.coefficient(&vec![0; k + 1])?;
    log.add_constant(-c)?.exp().map(|s| s.scale(c.exp()))
}

/// Partial derivatives `∂_{α}^{i…} ∂_δ^m A` at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithDerivTensor {
    pub k: usize,
    pub max_order: usize,
    pub prime_cutoff: usize,
    values: BTreeMap<Vec<usize>, f64>,
}

impl ArithDerivTensor {
    /// Entry for exponents `(i₁, …, i_k, m)`; zero beyond the computed order.
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values.get(idx).copied().unwrap_or(0.0)
    }

    pub fn get3(&self, i: usize, j: usize, m: usize) -> f64 {
        self.get(&[i, j, m])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &f64)> {
        self.values.iter()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = format!("# arith-tensor v1 k={} max_order={} cutoff={}\n", self.k, self.max_order, self.prime_cutoff);
        for (idx, v) in &self.values {
            let key: Vec<String> = idx.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}\t{v:.14e}", key.join(" ")).expect("string write");
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or("");
        let field = |name: &str| -> Result<usize> {
            header
                .split_whitespace()
                .find_map(|w| w.strip_prefix(name).and_then(|v| v.parse().ok()))
                .ok_or(Error::Parse { line: 1, msg: format!("missing {name}") })
        };
        if !header.starts_with("# arith-tensor v1") {
            return Err(Error::Parse { line: 1, msg: "not an arithmetic tensor cache".into() });
        }
        let (k, max_order, prime_cutoff) = (field("k=")?, field("max_order=")?, field("cutoff=")?);
        let mut values = BTreeMap::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::Parse { line: i + 1, msg: line.to_string() };
            let (key, val) = line.split_once('\t').ok_or_else(bad)?;
            let idx: Vec<usize> = key.split_whitespace().map(|s| s.parse().map_err(|_| bad())).collect::<Result<_>>()?;
            values.insert(idx, val.trim().parse().map_err(|_| bad())?);
        }
        Ok(Self { k, max_order, prime_cutoff, values })
    }
}

/// Taylor tensor of `A` to total order `max_order` (up to 12).
pub fn arith_deriv_tensor(k: usize, max_order: usize, primes: &PrimeTable) -> Result<ArithDerivTensor> {
    if k == 0 || max_order > 12 {
        return domain("tensor needs k ≥ 1 and order ≤ 12");
    }
    let s = arith_series(k, max_order as i32, primes)?;
    Ok(tensor_from_series(&s, k, max_order, primes.len()))
}

pub(crate) fn tensor_from_series(s: &TruncSeries<f64>, k: usize, max_order: usize, cutoff: usize) -> ArithDerivTensor {
    let mut values = BTreeMap::new();
    let mut e = vec![0usize; k + 1];
    loop {
        if e.iter().sum::<usize>() <= max_order {
            let ei: Vec<i32> = e.iter().map(|&x| x as i32).collect();
            let c = s.coefficient(&ei).map(|c| c.re).unwrap_or(0.0);
            let scale: f64 = e.iter().map(|&x| factorial_f64(x)).product();
            values.insert(e.clone(), c * scale);
        }
        let mut v = 0;
        loop {
            if v == e.len() {
                return ArithDerivTensor { k, max_order, prime_cutoff: cutoff, values };
            }
            if e[v] < max_order {
                e[v] += 1;
                break;
            }
            e[v] = 0;
            v += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: [f64; 9] = [
        0.577215664901532861,
        -0.0728158454836767249,
        -0.00969036319287231848,
        0.00205383442030334587,
        0.00232537006546730006,
        0.000793323817301062702,
        -0.00023876934543019961,
        -0.000527289567057751046,
        -0.00035212335380303951,
    ];

    #[test]
    fn stieltjes_values() {
        for (n, r) in REFERENCE.iter().enumerate() {
            let g = stieltjes(n).unwrap();
            assert!((g - r).abs() < 1e-10 * r.abs().max(1e-3), "γ_{n}: {g} vs {r}");
        }
        assert!(matches!(stieltjes(9), Err(Error::UnsupportedOrder(_))));
    }

    #[test]
    fn euler_constant_from_harmonic_limit() {
        // H_m − log m − 1/(2m) + 1/(12 m²) with Richardson over m and 2m
        let h = |m: usize| -> f64 {
            let s: f64 = (1..=m).rev().map(|k| 1.0 / k as f64).sum();
            let mf = m as f64;
            s - mf.ln() - 1.0 / (2.0 * mf) + 1.0 / (12.0 * mf * mf)
        };
        let (a, b) = (h(500_000), h(1_000_000));
        let rich = (16.0 * b - a) / 15.0;
        assert!((rich - stieltjes(0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn primes() {
        let t = PrimeTable::first(1000);
        assert_eq!(t.primes()[0], 2);
        assert_eq!(t.primes()[999], 7919);
        assert!(t.primes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn factor_at_zero_delta_is_one() {
        let t = PrimeTable::first(200);
        let s = ShiftSet::new(vec![Complex64::new(0.1, 0.3), Complex64::new(-0.05, 2.0), Complex64::new(0.2, 0.0)]);
        let a = arith_factor(&s, Complex64::new(0.0, 0.0), &t).unwrap();
        assert!((a - 1.0).norm() < 1e-13);
        assert!(arith_factor(&ShiftSet::from_real(&[0.3]), Complex64::new(0.1, 0.0), &t).is_err());
    }

    #[test]
    fn second_moment_factor_at_origin() {
        let t = PrimeTable::first(50);
        let d = 0.1;
        let direct: f64 = t
            .primes()
            .iter()
            .map(|&p| {
                let p = p as f64;
                (1.0 - 2.0 / p + p.powf(-2.0 - d)) / (1.0 - 1.0 / p).powi(2)
            })
            .product();
        let a = arith_factor(&ShiftSet::from_real(&[0.0, 0.0]), Complex64::new(d, 0.0), &t).unwrap();
        assert!((a.re - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn single_shift_factor_is_trivial() {
        let t = PrimeTable::first(100);
        let a = arith_factor(&ShiftSet::from_real(&[0.07]), Complex64::new(0.13, 0.02), &t).unwrap();
        assert!((a - 1.0).norm() < 1e-13);
        let ten = arith_deriv_tensor(1, 3, &t).unwrap();
        assert!((ten.get(&[0, 0]) - 1.0).abs() < 1e-12);
        assert!(ten.entries().filter(|(k, _)| k.iter().sum::<usize>() > 0).all(|(_, v)| v.abs() < 1e-14));
    }

    #[test]
    fn tensor_structure() {
        let t = PrimeTable::first(1000);
        let ten = arith_deriv_tensor(2, 3, &t).unwrap();
        assert!((ten.get3(0, 0, 0) - 1.0).abs() < 1e-12);
        for i in 0..=3 {
            for j in 0..=3 - i {
                if i + j > 0 {
                    assert!(ten.get3(i, j, 0).abs() < 1e-12, "({i},{j},0)");
                }
                for m in 0..=3 - i - j {
                    let (a, b) = (ten.get3(i, j, m), ten.get3(j, i, m));
                    assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
                }
            }
        }
        let direct: f64 = -t.primes().iter().map(|&p| (p as f64).ln() / (p as f64 - 1.0).powi(2)).sum::<f64>();
        assert!((ten.get3(0, 0, 1) - direct).abs() < 1e-12);
        assert!((ten.get3(0, 0, 1) + 1.2269).abs() < 1e-4);
    }

    #[test]
    fn tensor_matches_finite_differences() {
        let t = PrimeTable::first(1000);
        let ten = arith_deriv_tensor(2, 3, &t).unwrap();
        let zero = ShiftSet::from_real(&[0.0, 0.0]);
        let h = 1e-4;
        let f = |d: f64| arith_factor(&zero, Complex64::new(d, 0.0), &t).unwrap().re;
        let d1 = (f(h) - f(-h)) / (2.0 * h);
        let d2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        assert!(((d1 - ten.get3(0, 0, 1)) / ten.get3(0, 0, 1)).abs() < 1e-5);
        assert!(((d2 - ten.get3(0, 0, 2)) / ten.get3(0, 0, 2)).abs() < 1e-5);
    }

    #[test]
    fn cutoff_convergence_is_monotone() {
        let entry = |n: usize| arith_deriv_tensor(2, 1, &PrimeTable::first(n)).unwrap().get3(0, 0, 1);
        let (a, b, c) = (entry(500), entry(1000), entry(2000));
        assert!((c - b).abs() < (b - a).abs());
    }

    #[test]
    fn too_few_primes() {
        assert!(arith_deriv_tensor(2, 3, &PrimeTable::first(5)).is_err());
    }

    #[test]
    fn caches_round_trip() {
        let dir = std::env::temp_dir().join(format!("zm-arith-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let t = arith_deriv_tensor(2, 2, &PrimeTable::first(100)).unwrap();
        t.save(&dir.join("t.txt")).unwrap();
        let back = ArithDerivTensor::load(&dir.join("t.txt")).unwrap();
        assert_eq!(back.k, 2);
        for (k, v) in t.entries() {
            assert!((back.get(k) - v).abs() <= 1e-14 * v.abs().max(1e-300));
        }
        write_stieltjes_cache(&dir.join("g.txt")).unwrap();
        let g = read_stieltjes_cache(&dir.join("g.txt")).unwrap();
        assert_eq!(g.len(), MAX_STIELTJES + 1);
        assert!((g[1].1 - stieltjes(1).unwrap()).abs() < 1e-15);
        std::fs::remove_dir_all(&dir).ok();
    }
}
