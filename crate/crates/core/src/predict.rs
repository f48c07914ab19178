//! Moment polynomials in `L = log(t/2π)` predicted for discrete moments of
//! ζ-derivatives over the zeros, their closed-form integrals, and residuals
//! against computed sums.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{arith_series, stieltjes, ArithDerivTensor, PrimeTable};
use crate::error::{domain, Error, Result};
use crate::series::{t_power_expansion, zeta_laurent, zeta_logderiv_laurent, zeta_regular, Space, TruncSeries, EXACT};
use crate::special::factorial_f64;
use crate::zeta::MomentTrace;

/// Largest tolerated pole or remainder coefficient, relative to the size of
/// the expanded numerator.
const CANCEL_TOL: f64 = 1e-9;

/// `P(L) = Σ_m c_m L^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogPolynomial {
    coeffs: Vec<f64>,
}

impl LogPolynomial {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        LogPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.degree()]
    }

    pub fn eval(&self, l: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * l + c)
    }

    /// Only the top-degree term.
    pub fn leading_term(&self) -> LogPolynomial {
        let mut c = vec![0.0; self.degree() + 1];
        c[self.degree()] = self.leading();
        LogPolynomial::new(c)
    }

    /// Coefficients `b_j` with `∫ P(log(t/2π)) dt = t Σ_j b_j L^j`, from
    /// `∫ L^m dt = t L^m − m ∫ L^{m−1} dt`.
    pub fn antiderivative_coeffs(&self) -> Vec<f64> {
        let d = self.degree();
        let mut b = vec![0.0; d + 1];
        for (m, &c) in self.coeffs.iter().enumerate() {
            // t · Σ_{j≤m} (−1)^{m−j} m!/j! L^j
            let mut f = 1.0;
            for j in (0..=m).rev() {
                let sign = if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
                b[j] += c * sign * f;
                f *= j as f64;
            }
        }
        b
    }
}

/// `(1/2π) ∫₁ᵀ P(log(t/2π)) dt` in closed form.
pub fn integrate_logpoly(p: &LogPolynomial, t: f64) -> Result<f64> {
    if !(t > 1.0) {
        return domain("upper limit must exceed 1");
    }
    let b = LogPolynomial::new(p.antiderivative_coeffs());
    let at = |x: f64| x * b.eval((x / (2.0 * PI)).ln());
    Ok((at(t) - at(1.0)) / (2.0 * PI))
}

/// `(−1)^{Σn+k} Π n_r! / (Σn + 1)!`.
pub fn mixed_leading(orders: &[u32]) -> Result<f64> {
    if orders.is_empty() || orders.contains(&0) {
        return domain("derivative orders must be positive");
    }
    let s: u32 = orders.iter().sum();
    let sign = if (s as usize + orders.len()) % 2 == 0 { 1.0 } else { -1.0 };
    let num: f64 = orders.iter().map(|&n| factorial_f64(n as usize)).product();
    Ok(sign * num / factorial_f64(s as usize + 1))
}

/// Integrand for `Σ ζ^{(n)}(ρ)`: `n!` times the `αⁿ` coefficient of
/// `ζ'/ζ(1+α) − (t/2π)^{−α} ζ(1−α)`.
pub fn shanks_integrand(n: u32) -> Result<LogPolynomial> {
    if !(1..=6).contains(&n) {
        return Err(Error::UnsupportedOrder(format!("single derivative order {n} outside 1..=6")));
    }
    let order = n as usize + 1;
    let space = Space::new(&["a", "L"], order as i32).ungraded("L").with_pole_cap(1).shared();
    let logderiv = embed_x(&zeta_logderiv_laurent(order)?, &space, 1.0)?;
    let zeta_neg = embed_x(&zeta_laurent(order)?, &space, -1.0)?;
    let tpow = t_power_expansion(order)?.embed(&space)?;
    let w = logderiv.sub(&tpow.mul(&zeta_neg)?)?;
    if w.valuation()[0] < 0 && w.coefficient(&[-1, 0])?.norm() > CANCEL_TOL {
        return Err(Error::Singular("1/α pole does not cancel".into()));
    }
    let fact = factorial_f64(n as usize);
    let coeffs: Result<Vec<f64>> = (0..=order as i32)
        .map(|m| Ok(w.coefficient(&[n as i32, m])?.re * fact))
        .collect();
    Ok(LogPolynomial::new(coeffs?))
}

/// Puts a univariate series in `x` onto the `a` axis of `space`, scaling
/// `x ↦ s·a`.
fn embed_x(f: &TruncSeries<f64>, space: &Arc<Space>, s: f64) -> Result<TruncSeries<f64>> {
    let terms: Vec<(Vec<i32>, Complex64)> = f
        .nonzero_terms()
        .into_iter()
        .map(|(e, c)| {
            let mut x = vec![0; space.nvars()];
            x[0] = e[0];
            (x, c * s.powi(e[0]))
        })
        .collect();
    let mut hi = vec![EXACT; space.nvars()];
    hi[0] = f.precision()[0];
    TruncSeries::from_terms(space, &terms, hi, EXACT)
}

/// Supported derivative patterns for the general derivation.
fn check_support(orders: &[u32]) -> Result<()> {
    if orders.is_empty() || orders.contains(&0) {
        return domain("derivative orders must be positive");
    }
    let s: u32 = orders.iter().sum();
    let ok = match orders.len() {
        1 => s <= 6,
        2 => s <= 6,
        3 => orders == [1, 1, 1],
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder(format!(
            "orders {orders:?}: supported are one order up to 6, two orders with sum up to 6, or (1,1,1)"
        )))
    }
}

/// Working space `(a1 … ak, L)` with total degree `total` in the shifts.
fn work_space(k: usize, total: i32) -> Arc<Space> {
    let mut names: Vec<String> = (1..=k).map(|j| format!("a{j}")).collect();
    names.push("L".into());
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Space::new(&refs, total).ungraded("L").with_total(total).shared()
}

/// Substitutes `x ↦ Σ_v w_v a_v` in a univariate power series.
fn compose(f: &TruncSeries<f64>, space: &Arc<Space>, weights: &[f64]) -> Result<TruncSeries<f64>> {
    let mut form: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
    form.push(Complex64::new(0.0, 0.0));
    f.substitute_linear(space, &[form])
}

fn monomial(space: &Arc<Space>, e: &[i32], c: f64) -> TruncSeries<f64> {
    TruncSeries::monomial(space, e, Complex64::new(c, 0.0))
}

/// `Π_{i<l, i,l ∈ vars} (a_l − a_i)` over the listed variable indices.
fn vandermonde(space: &Arc<Space>, vars: &[usize]) -> Result<TruncSeries<f64>> {
    let n = space.nvars();
    let mut v = TruncSeries::one(space);
    for (x, &i) in vars.iter().enumerate() {
        for &l in &vars[x + 1..] {
            let mut el = vec![0; n];
            el[l] = 1;
            let mut ei = vec![0; n];
            ei[i] = 1;
            let diff = monomial(space, &el, 1.0).sub(&monomial(space, &ei, 1.0))?;
            v = v.mul(&diff)?;
        }
    }
    Ok(v)
}

/// Integrand polynomial for `Σ_{γ≤T} Π_r ζ^{(n_r)}(ρ)` derived from the
/// zero- and one-swap terms
/// `A'(0) + Σ_j [ζ'/ζ(1+α_j) − (t/2π)^{−α_j} ζ(1−α_j) A_j Π_{ℓ≠j} ζ(1+α_ℓ−α_j)/ζ(1+α_ℓ)]`
/// plus the shift-free `L + 1`. Every term is multiplied by
/// `V(α)·Π α` to clear poles, summed, and divided back exactly; nonzero
/// pole or remainder coefficients are reported as [`Error::Singular`].
pub fn derive_integrand(orders: &[u32], primes: &PrimeTable) -> Result<LogPolynomial> {
    check_support(orders)?;
    let k = orders.len();
    let sum_n: i32 = orders.iter().map(|&n| n as i32).sum();
    let clear = (k + k * (k - 1) / 2) as i32;
    let d = sum_n + clear;
    let space = work_space(k, d);
    let lvar = k;
    let nv = k + 1;

    // Univariate building blocks to degree d.
    let xz = zeta_regular(d as usize - 1)?; // x ζ(1+x)
    let xz_d = xz.derivative("x")?;
    let r = xz.reciprocal()?; // 1 / (x ζ(1+x))
    let x = TruncSeries::var(xz.space(), "x")?;
    let ld = x.mul(&xz_d)?.mul(&r)?.add_constant(Complex64::new(-1.0, 0.0))?; // x ζ'/ζ(1+x)

    let unit = |j: usize| -> Vec<f64> {
        let mut w = vec![0.0; k];
        w[j] = 1.0;
        w
    };
    let all: Vec<usize> = (0..k).collect();
    let v_all = vandermonde(&space, &all)?;
    let mut prod_a = TruncSeries::one(&space);
    for j in 0..k {
        let mut e = vec![0; nv];
        e[j] = 1;
        prod_a = prod_a.mul(&monomial(&space, &e, 1.0))?;
    }
    let clearing = v_all.mul(&prod_a)?;

    // Arithmetic factor over (a1 … ak, d).
    let a_series = arith_series(k, d, primes)?;
    let a_space = a_series.space().clone();
    let a_prime = a_series.slice("d", 1)?;
    let mut forms_prime: Vec<Vec<Complex64>> = Vec::with_capacity(k + 1);
    for j in 0..k {
        let mut f = vec![Complex64::new(0.0, 0.0); nv];
        f[j] = Complex64::new(1.0, 0.0);
        forms_prime.push(f);
    }
    forms_prime.push(vec![Complex64::new(0.0, 0.0); nv]);
    let a_prime = a_prime.substitute_linear(&space, &forms_prime)?;
    debug_assert_eq!(a_space.nvars(), k + 1);

    let mut lvec = vec![0; nv];
    lvec[lvar] = 1;
    let standalone = monomial(&space, &lvec, 1.0).add_constant(Complex64::new(1.0, 0.0))?;
    let mut f = a_prime.add(&standalone)?.mul(&clearing)?;

    for j in 0..k {
        // ζ'/ζ(1+α_j) · V Π α = Ld(α_j) · Π_{ℓ≠j} α_ℓ · V
        let mut others = TruncSeries::one(&space);
        for l in (0..k).filter(|&l| l != j) {
            let mut e = vec![0; nv];
            e[l] = 1;
            others = others.mul(&monomial(&space, &e, 1.0))?;
        }
        let ld_term = compose(&ld, &space, &unit(j))?.mul(&others)?.mul(&v_all)?;
        f = f.add(&ld_term)?;

        // −(swap term) · V Π α = E_j X(−α_j) A_j Π_{ℓ≠j} X(α_ℓ−α_j) α_ℓ² R(α_ℓ) · sgn_j V_{¬j}
        let mut e_terms = Vec::new();
        let mut fact = 1.0;
        for m in 0..=d {
            if m > 0 {
                fact *= m as f64;
            }
            let mut e = vec![0; nv];
            e[j] = m;
            e[lvar] = m;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            e_terms.push((e, Complex64::new(sign / fact, 0.0)));
        }
        let ej = TruncSeries::from_terms(&space, &e_terms, vec![EXACT; nv], d)?;
        let mut neg = vec![0.0; k];
        neg[j] = -1.0;
        let mut s = ej.mul(&compose(&xz, &space, &neg)?)?;
        let mut forms_j: Vec<Vec<Complex64>> = Vec::with_capacity(k + 1);
        for l in 0..k {
            let mut fl = vec![Complex64::new(0.0, 0.0); nv];
            if l != j {
                fl[l] = Complex64::new(1.0, 0.0);
            }
            forms_j.push(fl);
        }
        let mut fd = vec![Complex64::new(0.0, 0.0); nv];
        fd[j] = Complex64::new(-1.0, 0.0);
        forms_j.push(fd);
        s = s.mul(&a_series.substitute_linear(&space, &forms_j)?)?;
        for l in (0..k).filter(|&l| l != j) {
            let mut w = vec![0.0; k];
            w[l] = 1.0;
            w[j] = -1.0;
            s = s.mul(&compose(&xz, &space, &w)?)?;
            let mut e = vec![0; nv];
            e[l] = 2;
            s = s.mul(&monomial(&space, &e, 1.0))?.mul(&compose(&r, &space, &unit(l))?)?;
        }
        let rest: Vec<usize> = (0..k).filter(|&l| l != j).collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        s = s.mul(&vandermonde(&space, &rest)?)?.scale(Complex64::new(sign, 0.0));
        f = f.add(&s)?;
    }

    let scale = f.max_norm().max(1.0);
    let mut div = vec![0; nv];
    for v in div.iter_mut().take(k) {
        *v = 1;
    }
    let (mut q, dropped) = f.divide_by_monomial(&div)?;
    if dropped > CANCEL_TOL * scale {
        return Err(Error::Singular(format!("poles at α = 0 do not cancel (residue {dropped:e})")));
    }
    for i in 0..k {
        for l in i + 1..k {
            let (next, resid) = q.divide_by_difference(i, l)?;
            if resid > CANCEL_TOL * scale {
                return Err(Error::Singular(format!("poles at α_{} = α_{} do not cancel (remainder {resid:e})", i + 1, l + 1)));
            }
            q = next;
        }
    }

    // The shift-free term carries no α and must vanish from every extraction.
    let mut e = vec![0; nv];
    for (j, &n) in orders.iter().enumerate() {
        e[j] = n as i32;
    }
    let standalone_part = standalone.coefficient(&e)?;
    if standalone_part.norm() != 0.0 {
        return Err(Error::Singular("shift-free term survives differentiation".into()));
    }

    let scale: f64 = orders.iter().map(|&n| factorial_f64(n as usize)).product();
    let mut coeffs = Vec::with_capacity(sum_n as usize + 2);
    for m in 0..=sum_n + 1 {
        e[lvar] = m;
        coeffs.push(q.coefficient(&e)?.re * scale);
    }
    Ok(LogPolynomial::new(coeffs))
}

/// Integrand for `Σ ζ'(ρ)²` written in Stieltjes constants `γ₀, γ₁, γ₂` and
/// the arithmetic tensor entries `A^{(i,j,m)}`.
pub fn second_moment_integrand(tensor: &ArithDerivTensor, gamma: [f64; 3]) -> Result<LogPolynomial> {
    if tensor.k != 2 || tensor.max_order < 3 {
        return domain("second moment needs a k = 2 tensor of order at least 3");
    }
    let a = |i, j, m| tensor.get3(i, j, m);
    let [g0, g1, g2] = gamma;
    let c3 = 1.0 / 6.0;
    let c2 = 0.5 * (2.0 * g0 + a(0, 0, 1));
    let c1 = 0.5 * (-8.0 * g1 + 4.0 * g0 * a(0, 0, 1) + a(0, 0, 2) + 2.0 * a(0, 1, 1));
    let c0 = (-12.0 * g0.powi(3) - 36.0 * g0 * g1 + 6.0 * g2 - 24.0 * g1 * a(0, 0, 1) + 6.0 * g0 * a(0, 0, 2)
        + a(0, 0, 3)
        + 12.0 * g0 * a(0, 1, 1)
        + 3.0 * a(0, 1, 2)
        - 3.0 * a(0, 2, 1)
        + 6.0 * a(1, 1, 1))
        / 6.0;
    Ok(LogPolynomial::new(vec![c0, c1, c2, c3]))
}

/// `[γ₀, γ₁, γ₂]`.
pub fn stieltjes_head() -> Result<[f64; 3]> {
    Ok([stieltjes(0)?, stieltjes(1)?, stieltjes(2)?])
}

/// Human-readable integrand in Stieltjes constants and arithmetic terms,
/// where a closed form is known.
pub fn symbolic_form(orders: &[u32]) -> Option<String> {
    match orders {
        [1, 1] => Some(
            "1/6 L^3 + 1/2 L^2 (2γ0 + A(0,0,1)) + 1/2 L (−8γ1 + 4γ0 A(0,0,1) + A(0,0,2) + 2A(0,1,1)) \
             + 1/6 (−12γ0^3 − 36γ0γ1 + 6γ2 − 24γ1 A(0,0,1) + 6γ0 A(0,0,2) + A(0,0,3) + 12γ0 A(0,1,1) \
             + 3A(0,1,2) − 3A(0,2,1) + 6A(1,1,1))"
                .into(),
        ),
        [n] if (1..=6).contains(n) => {
            let n = *n as usize;
            let mut s = format!("{n}!·[A{n} + (−1)^{} L^{}/{}!", n + 1, n + 1, n + 1);
            for m in 0..=n {
                s += &format!(" + (−1)^{} L^{m} γ{}/({m}!·{}!)", m + 1, n - m, n - m);
            }
            s.push(']');
            Some(s)
        }
        _ => None,
    }
}

/// Fills prediction and residual columns. The full prediction integrates
/// `p`; the leading one is the asymptotic main term `c_d (T/2π) L^d`.
pub fn compare(trace: &MomentTrace, p: &LogPolynomial) -> Result<MomentTrace> {
    let mut out = trace.clone();
    for row in &mut out.rows {
        let full = if row.t > 1.0 { integrate_logpoly(p, row.t)? } else { 0.0 };
        row.prediction = full;
        row.residual_full = row.sum.re - full;
        row.residual_leading = row.sum.re - leading_prediction(p, row.t);
    }
    Ok(out)
}

/// `c_d (T/2π) log^d(T/2π)` for the top coefficient `c_d` of `p`.
pub fn leading_prediction(p: &LogPolynomial, t: f64) -> f64 {
    let x = t / (2.0 * PI);
    p.leading() * x * x.ln().powi(p.degree() as i32)
}
