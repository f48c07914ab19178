use std::f64::consts::PI;

use zetamoments::arith::{arith_deriv_tensor, PrimeTable};
use zetamoments::predict::{
    compare, derive_integrand, integrate_logpoly, leading_prediction, mixed_leading, second_moment_integrand,
    shanks_integrand, stieltjes_head, LogPolynomial,
};
use zetamoments::zeta::{MomentTrace, TraceRow};
use zetamoments::Error;

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `(1/2π) ∫₁ᵀ P(log(t/2π)) dt` by adaptive Simpson in `u = log t`.
fn quadrature(p: &LogPolynomial, t: f64) -> f64 {
    let f = |u: f64| p.eval(u - (2.0 * PI).ln()) * u.exp();
    let (a, b) = (0.0, t.ln());
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, 1e-12 * whole.abs().max(1.0), 22) / (2.0 * PI)
}

#[test]
fn closed_form_integral_matches_quadrature() {
    let polys = vec![
        LogPolynomial::new(vec![1.0]),
        LogPolynomial::new(vec![0.0, 1.0]),
        shanks_integrand(1).unwrap(),
        shanks_integrand(3).unwrap(),
        LogPolynomial::new(vec![-2.52789, 2.12487, -0.03621, 1.0 / 6.0]),
    ];
    for p in &polys {
        for t in [2.0, 10.0, 100.0, 1e3, 1e4, 1e5] {
            let exact = integrate_logpoly(p, t).unwrap();
            let quad = quadrature(p, t);
            assert!((exact - quad).abs() <= 1e-8 * quad.abs().max(1e-3), "{p:?} at {t}: {exact} vs {quad}");
        }
    }
    assert!(integrate_logpoly(&polys[0], 1.0).is_err());
}

#[test]
fn series_derivation_matches_closed_form_second_moment() {
    let primes = PrimeTable::first(1000);
    let derived = derive_integrand(&[1, 1], &primes).unwrap();
    let tensor = arith_deriv_tensor(2, 3, &primes).unwrap();
    let closed = second_moment_integrand(&tensor, stieltjes_head().unwrap()).unwrap();
    assert_eq!(derived.degree(), 3);
    for m in 0..=3 {
        assert!((derived.coeffs()[m] - closed.coeffs()[m]).abs() < 1e-10, "L^{m}");
    }
}

#[test]
fn leading_coefficient_matches_mixed_constant() {
    let primes = PrimeTable::first(30);
    for orders in [vec![1u32], vec![2], vec![3], vec![4], vec![1, 1], vec![2, 1], vec![1, 2], vec![3, 1], vec![1, 1, 1]] {
        let p = derive_integrand(&orders, &primes).unwrap();
        let s: u32 = orders.iter().sum();
        assert_eq!(p.degree(), s as usize + 1, "{orders:?}");
        let c = mixed_leading(&orders).unwrap();
        assert!((p.leading() - c).abs() < 1e-10 * c.abs(), "{orders:?}: {} vs {c}", p.leading());
        let sign = if (s as usize + orders.len()) % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(p.leading().signum(), sign);
    }
}

#[test]
fn out_of_range_orders_are_unsupported() {
    let primes = PrimeTable::first(30);
    for orders in [vec![7u32], vec![4, 3], vec![2, 1, 1], vec![1, 1, 1, 1]] {
        assert!(matches!(derive_integrand(&orders, &primes), Err(Error::UnsupportedOrder(_))), "{orders:?}");
    }
}

#[test]
fn comparison_fills_every_column() {
    let p = LogPolynomial::new(vec![0.5, 1.0, 0.5]);
    let row = |count: usize, t: f64, re: f64| TraceRow {
        count,
        t,
        sum: num_complex::Complex64::new(re, 0.1),
        prediction: f64::NAN,
        residual_leading: f64::NAN,
        residual_full: f64::NAN,
    };
    let trace = MomentTrace { orders: vec![1], rows: vec![row(1, 14.13, 0.8), row(2, 21.02, 2.0)] };
    let out = compare(&trace, &p).unwrap();
    for r in &out.rows {
        let full = integrate_logpoly(&p, r.t).unwrap();
        assert_eq!(r.prediction, full);
        assert_eq!(r.residual_full, r.sum.re - full);
        assert_eq!(r.residual_leading, r.sum.re - leading_prediction(&p, r.t));
    }
}
