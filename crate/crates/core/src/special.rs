//! Bernoulli numbers and Gamma-function evaluations shared across modules.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `B_{2j} / (2j)!` for `j = 1..=30`.
pub(crate) const BERNOULLI_SCALED: [f64; 30] = [
    8.3333333333333333e-2,
    -1.3888888888888889e-3,
    3.3068783068783069e-5,
    -8.2671957671957672e-7,
    2.0876756987868099e-8,
    -5.2841901386874932e-10,
    1.3382536530684679e-11,
    -3.3896802963225829e-13,
    8.5860620562778446e-15,
    -2.1748686985580619e-16,
    5.5090028283602295e-18,
    -1.3954464685812523e-19,
    3.5347070396294675e-21,
    -8.9535174270375469e-23,
    2.2679524523376831e-24,
    -5.7447906688722024e-26,
    1.4551724756148649e-27,
    -3.6859949406653102e-29,
    9.3367342570950447e-31,
    -2.3650224157006299e-32,
    5.9906717624821343e-34,
    -1.5174548844682903e-35,
    3.8437581254541882e-37,
    -9.736353072646691e-39,
    2.466247044200681e-40,
    -6.2470767418207437e-42,
    1.5824030244644914e-43,
    -4.008273685948936e-45,
    1.0153075855569556e-46,
    -2.5718041582418717e-48,
];

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for real `x > 0` (Lanczos, about 15 digits).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Principal-branch-continuous `ln Γ(z)` for `Re z > 0` via shifted Stirling.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < 20.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for (j, b) in BERNOULLI_SCALED.iter().take(10).enumerate() {
        // B_{2k} / (2k (2k-1)) = (B_{2k}/(2k)!) (2k-2)!
        let coeff = b * factorial_f64(2 * (j + 1) - 2);
        corr += pow * coeff;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + corr - shift
}

pub(crate) fn factorial_f64(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * j as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_integers() {
        for n in 1..20usize {
            let exact = factorial_f64(n - 1).ln();
            assert!((ln_gamma(n as f64) - exact).abs() < 1e-12 * exact.abs().max(1.0));
        }
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-13);
    }

    #[test]
    fn complex_matches_real_axis() {
        for &x in &[0.3, 1.0, 2.5, 7.25, 31.0] {
            let z = ln_gamma_complex(Complex64::new(x, 0.0));
            assert!((z.re - ln_gamma(x)).abs() < 1e-12, "{x}");
            assert!(z.im.abs() < 1e-13);
        }
    }

    #[test]
    fn complex_recurrence() {
        let z = Complex64::new(0.25, 7.3);
        let lhs = ln_gamma_complex(z + 1.0);
        let rhs = ln_gamma_complex(z) + z.ln();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
