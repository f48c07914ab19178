//! ζ on and near the critical line, its zeros, and discrete moments over
//! the zeros.

mod moment;
mod zeros;

pub use moment::{discrete_moment, max_imag_ratio, MomentTrace, TraceRow};
pub use zeros::{
    find_zeros, gram_point, import_zero_table, read_zero_cache, write_zero_cache, ZeroLimit, ZeroRecord,
};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::special::{ln_gamma_complex, BERNOULLI_SCALED};

/// Riemann–Siegel is used from this height up, Euler–Maclaurin below.
pub const RS_THRESHOLD: f64 = 50.0;
pub const CAUCHY_RADIUS: f64 = 0.1;
pub const CAUCHY_NODES: usize = 64;
pub const MAX_DERIVATIVE: usize = 6;

/// Direct-sum length giving full binary64 accuracy at height `t`.
pub fn default_em_terms(t: f64) -> usize {
    30 + (t.abs() / 3.0).ceil() as usize
}

/// Euler–Maclaurin with `terms` direct terms and Bernoulli corrections
/// until they stop decreasing.
pub fn zeta_em(s: Complex64, terms: usize) -> Result<Complex64> {
    if s.re <= -1.0 {
        return domain("Euler–Maclaurin evaluation needs Re(s) > −1");
    }
    if (s - 1.0).norm() < 1e-300 {
        return domain("ζ has a pole at s = 1");
    }
    if terms == 0 {
        return domain("at least one direct term is required");
    }
    let n = terms as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 1..terms {
        sum += npow(j as f64, s);
    }
    let n_s = npow(n, s);
    sum += n_s * 0.5 + n_s * n / (s - 1.0);
    // rising = s(s+1)…(s+2k−2), pw = N^{−s−2k+1}
    let mut rising = s;
    let mut pw = n_s / n;
    let inv2 = 1.0 / (n * n);
    let mut last = f64::INFINITY;
    for (k, b) in BERNOULLI_SCALED.iter().enumerate() {
        let term = rising * pw * *b;
        let mag = term.norm();
        if mag > last {
            break;
        }
        sum += term;
        if mag <= 1e-18 * sum.norm() {
            break;
        }
        last = mag;
        let m = 2.0 * k as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        pw *= inv2;
    }
    Ok(sum)
}

/// `ζ(s)` with [`default_em_terms`].
pub fn zeta(s: Complex64) -> Result<Complex64> {
    zeta_em(s, default_em_terms(s.im))
}

fn npow(n: f64, s: Complex64) -> Complex64 {
    let l = n.ln();
    Complex64::from_polar((-s.re * l).exp(), -s.im * l)
}

/// Riemann–Siegel phase `θ(t) = arg Γ(1/4 + it/2) − (t/2) log π`, continuous
/// in `t`.
pub fn theta(t: f64) -> f64 {
    if t.abs() >= 20.0 {
        let a = t.abs();
        let inv = 1.0 / a;
        let inv2 = inv * inv;
        let tail = inv
            * (1.0 / 48.0
                + inv2 * (7.0 / 5760.0 + inv2 * (31.0 / 80640.0 + inv2 * (127.0 / 430080.0 + inv2 * 511.0 / 1216512.0))));
        let v = 0.5 * a * (a / (2.0 * PI)).ln() - 0.5 * a - PI / 8.0 + tail;
        return v.copysign(t);
    }
    ln_gamma_complex(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln()
}

/// `θ'(t)`, used for Newton steps on Gram points.
pub(crate) fn theta_prime(t: f64) -> f64 {
    let a = t.abs().max(1.0);
    0.5 * (a / (2.0 * PI)).ln() + 1.0 / (48.0 * a * a)
}

/// Hardy's `Z(t) = e^{iθ(t)} ζ(1/2 + it)`.
pub fn hardy_z(t: f64) -> f64 {
    if t >= RS_THRESHOLD {
        riemann_siegel(t)
    } else {
        hardy_z_em(t)
    }
}

/// `Z(t)` through Euler–Maclaurin; the discarded imaginary part is rounding.
pub fn hardy_z_em(t: f64) -> f64 {
    let z = zeta(Complex64::new(0.5, t)).expect("critical line avoids the pole");
    (Complex64::from_polar(1.0, theta(t)) * z).re
}

fn riemann_siegel(t: f64) -> f64 {
    let tau = (t / (2.0 * PI)).sqrt();
    let n = tau.floor() as usize;
    let p = tau - n as f64;
    let th = theta(t);
    let mut main = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        main += (th - t * jf.ln()).cos() / jf.sqrt();
    }
    let d = psi_derivatives(p);
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let pi8 = pi4 * pi4;
    let c = [
        d[0],
        -d[3] / (96.0 * pi2),
        d[2] / (64.0 * pi2) + d[6] / (18432.0 * pi4),
        -d[1] / (64.0 * pi2) - d[5] / (3840.0 * pi4) - d[9] / (5308416.0 * pi6),
        d[0] / (128.0 * pi2) + 19.0 * d[4] / (24576.0 * pi4) + 11.0 * d[8] / (5898240.0 * pi6)
            + d[12] / (2038431744.0 * pi8),
    ];
    let inv = 1.0 / tau;
    let corr = c.iter().rev().fold(0.0, |acc, ck| acc * inv + ck);
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    2.0 * main + sign * inv.sqrt() * corr
}

/// Derivatives `Ψ^{(0..=12)}(p)` of `Ψ(p) = cos 2π(p² − p − 1/16) / cos 2πp`
/// from a Cauchy circle; the removable singularities of the quotient never
/// sit on a node.
fn psi_derivatives(p: f64) -> [f64; 13] {
    const NODES: usize = 64;
    const RADIUS: f64 = 0.5;
    let psi = |z: Complex64| (2.0 * PI * (z * z - z - 1.0 / 16.0)).cos() / (2.0 * PI * z).cos();
    let mut coef = [Complex64::new(0.0, 0.0); 13];
    for j in 0..NODES {
        let phi = 2.0 * PI * (j as f64 + 0.5) / NODES as f64;
        let w = Complex64::from_polar(1.0, phi);
        let f = psi(p + w * RADIUS);
        let mut wk = Complex64::new(1.0, 0.0);
        let winv = w.conj();
        for c in coef.iter_mut() {
            *c += f * wk;
            wk *= winv;
        }
    }
    let mut out = [0.0; 13];
    let mut fact = 1.0;
    let mut rk = 1.0;
    for (k, c) in coef.iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
            rk *= RADIUS;
        }
        out[k] = c.re / NODES as f64 * fact / rk;
    }
    out
}

/// `ζ^{(n)}(1/2 + it)` for `n = 0..=max_n` from one Cauchy circle of the
/// given radius and node count.
pub fn zeta_derivs_with(max_n: usize, t: f64, radius: f64, nodes: usize) -> Result<Vec<Complex64>> {
    if max_n > MAX_DERIVATIVE {
        return domain(format!("derivative order above {MAX_DERIVATIVE}"));
    }
    if !(radius > 0.0) || nodes < 2 * (max_n + 1) {
        return domain("Cauchy circle needs a positive radius and enough nodes");
    }
    let centre = Complex64::new(0.5, t);
    if (centre - 1.0).norm() <= radius * 1.5 {
        return domain("Cauchy circle too close to the pole at s = 1");
    }
    let terms = default_em_terms(t.abs() + radius);
    let mut acc = vec![Complex64::new(0.0, 0.0); max_n + 1];
    for j in 0..nodes {
        let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64);
        let f = zeta_em(centre + w * radius, terms)?;
        let winv = w.conj();
        let mut wk = Complex64::new(1.0, 0.0);
        for a in acc.iter_mut() {
            *a += f * wk;
            wk *= winv;
        }
    }
    let mut fact = 1.0;
    let mut rk = 1.0;
    for (k, a) in acc.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
            rk *= radius;
        }
        *a *= fact / (rk * nodes as f64);
    }
    Ok(acc)
}

/// `ζ^{(n)}(1/2 + it)` for `n ≤ 6`, `t ≥ 2`, with the default circle.
pub fn zeta_deriv_at(n: usize, t: f64) -> Result<Complex64> {
    zeta_deriv_at_radius(n, t, CAUCHY_RADIUS)
}

pub fn zeta_deriv_at_radius(n: usize, t: f64, radius: f64) -> Result<Complex64> {
    if t < 2.0 {
        return domain("derivatives are evaluated for t ≥ 2");
    }
    Ok(zeta_derivs_with(n, t, radius, CAUCHY_NODES)?[n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_two_and_four() {
        let z2 = zeta(Complex64::new(2.0, 0.0)).unwrap();
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-14);
        let z4 = zeta(Complex64::new(4.0, 0.0)).unwrap();
        assert!((z4.re - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!(zeta(Complex64::new(1.0, 0.0)).is_err());
        assert!(zeta(Complex64::new(-1.5, 3.0)).is_err());
    }

    #[test]
    fn zeta_at_half_and_negative_half() {
        // ζ(1/2) and ζ(−1/2) from standard tables.
        let a = zeta(Complex64::new(0.5, 0.0)).unwrap();
        assert!((a.re + 1.4603545088095868).abs() < 1e-13);
        let b = zeta(Complex64::new(-0.5, 0.0)).unwrap();
        assert!((b.re + 0.2078862249773546).abs() < 1e-13);
    }

    #[test]
    fn first_zero_is_small() {
        let z = zeta(Complex64::new(0.5, 14.134725141734693)).unwrap();
        assert!(z.norm() < 1e-12);
    }

    #[test]
    fn term_count_does_not_matter() {
        let s = Complex64::new(0.5, 321.7);
        let a = zeta_em(s, default_em_terms(s.im)).unwrap();
        let b = zeta_em(s, 2 * default_em_terms(s.im) + 17).unwrap();
        assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
    }

    #[test]
    fn theta_branches_meet() {
        let lg = |t: f64| ln_gamma_complex(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln();
        for &t in &[20.0, 35.0, 100.0] {
            assert!((theta(t) - lg(t)).abs() < 1e-12, "t={t}");
        }
        assert!((theta(-25.0) + theta(25.0)).abs() < 1e-14);
    }

    #[test]
    fn hardy_z_is_real_rotation() {
        for &t in &[7.5, 30.0, 60.0, 143.1, 500.0, 999.0] {
            let z = zeta(Complex64::new(0.5, t)).unwrap();
            let rot = Complex64::from_polar(1.0, theta(t)) * z;
            assert!(rot.im.abs() < 1e-12 * z.norm().max(1.0), "t={t}");
            assert!((hardy_z(t).abs() - z.norm()).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn riemann_siegel_tracks_euler_maclaurin() {
        let mut t: f64 = 50.0;
        while t < 1000.0 {
            // truncation after C4 leaves an error of order t^{−11/4}
            let bound = 1e-6 * (50.0 / t).powf(2.75);
            assert!((riemann_siegel(t) - hardy_z_em(t)).abs() < bound, "t={t}");
            t += 7.31;
        }
    }

    #[test]
    fn sign_change_at_first_zero() {
        assert!(hardy_z(14.0) * hardy_z(14.2) < 0.0);
    }

    #[test]
    fn cauchy_order_zero_is_plain_zeta() {
        for &t in &[3.0, 40.0, 777.0] {
            let z = zeta(Complex64::new(0.5, t)).unwrap();
            assert!((zeta_deriv_at(0, t).unwrap() - z).norm() < 1e-9);
        }
        assert!(zeta_deriv_at(7, 100.0).is_err());
        assert!(zeta_deriv_at(1, 1.0).is_err());
    }
}
