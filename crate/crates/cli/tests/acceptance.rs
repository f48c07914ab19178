//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use zetamoments::arith::{arith_deriv_tensor, arith_factor, stieltjes, PrimeTable};
use zetamoments::checks::{combinatorial_suite, toeplitz_suite};
use zetamoments::cue::{derivative_moment_exact, mc_moment, shifted_moment_exact, Observable, Sampler};
use zetamoments::predict::{
    compare, derive_integrand, integrate_logpoly, second_moment_integrand, shanks_integrand, stieltjes_head,
};
use zetamoments::zeta::{
    discrete_moment, find_zeros, max_imag_ratio, zeta_deriv_at_radius, zeta_em, ZeroLimit, ZeroRecord,
};
use zetamoments::ShiftSet;

struct Verdict {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn report(v: &Verdict) -> bool {
    let ok = v.pass && v.elapsed <= v.budget;
    println!(
        "criterion {:<2} {:<34} {}  ({:.1} s of {} s) {}",
        v.id,
        v.title,
        if ok { "PASS" } else { "FAIL" },
        v.elapsed.as_secs_f64(),
        v.budget.as_secs(),
        v.detail
    );
    ok
}

fn timed<F: FnOnce() -> (bool, String)>(id: &'static str, title: &'static str, budget: u64, f: F) -> Verdict {
    let start = Instant::now();
    let (pass, detail) = f();
    Verdict { id, title, pass, detail, elapsed: start.elapsed(), budget: Duration::from_secs(budget) }
}

fn fact(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn criterion_1() -> Verdict {
    timed("1", "symmetric identities", 5, || {
        let r = combinatorial_suite(500, 1).expect("suite runs");
        (r.passed(), format!("max rel err {:.2e}, zero branch {:.2e}", r.max_rel_error, r.max_zero_branch))
    })
}

fn criterion_2() -> Verdict {
    timed("2", "Toeplitz triple", 5, || {
        let r = toeplitz_suite(200, 2).expect("suite runs");
        (r.passed(), format!("max rel err {:.2e}", r.max_rel_error))
    })
}

fn criterion_3() -> Verdict {
    timed("3", "CUE Monte Carlo", 300, || {
        let shifts = vec![Complex64::new(0.05, 0.0), Complex64::new(0.11, 0.0)];
        let cases = [
            (8, Observable::Shifts(shifts.clone()), shifted_moment_exact(8, &ShiftSet::new(shifts))),
            (6, Observable::Orders(vec![1]), derivative_moment_exact(6, &[1]).expect("exact")),
        ];
        let mut pass = true;
        let mut detail = Vec::new();
        for (n, obs, exact) in &cases {
            let hits = (0..20u64)
                .filter(|&seed| {
                    let est = mc_moment(*n, obs, 200_000, 1000 + seed, Sampler::default(), None).expect("mc");
                    est.within(*exact, 3.0)
                })
                .count();
            pass &= hits >= 19;
            detail.push(format!("N={n}: {hits}/20 within 3σ"));
        }
        (pass, detail.join(", "))
    })
}

fn criterion_4() -> Verdict {
    timed("4", "asymptotic constants", 60, || {
        let mut pass = true;
        let mut detail = Vec::new();
        for orders in [vec![1u32], vec![2], vec![1, 1], vec![2, 1]] {
            let s: u32 = orders.iter().sum();
            let k = orders.len() as u32;
            let sign = if (s + k) % 2 == 0 { 1.0 } else { -1.0 };
            let c = Complex64::i().powu(s) * sign * orders.iter().map(|&n| fact(n)).product::<f64>() / fact(s + 1);
            let dev = |n: usize| {
                let e: Complex64 = derivative_moment_exact(n, &orders).expect("exact");
                (e / (n as f64).powi(s as i32) - c).norm() / c.norm()
            };
            let (a, b) = (dev(400), dev(800));
            pass &= a < 0.05 && b < a;
            detail.push(format!("{orders:?} {a:.2e}→{b:.2e}"));
        }
        (pass, detail.join(", "))
    })
}

fn criterion_5() -> Verdict {
    timed("5", "Keating–Snaith cross-check", 60, || {
        let n = 4u32;
        let exact: f64 = (1..=n).map(|j| fact(j - 1) * fact(j + 1) / (fact(j) * fact(j))).product();
        let obs = Observable::AbsPower { k: 1, theta: 0.0 };
        let est = mc_moment(n as usize, &obs, 200_000, 5, Sampler::default(), None).expect("mc");
        let sig = est.deviation_sigmas(Complex64::new(exact, 0.0));
        (sig < 3.0, format!("MC {:.4} vs {exact}, {sig:.2}σ", est.mean.re))
    })
}

fn criterion_6() -> Verdict {
    timed("6", "second-moment polynomial", 30, || {
        let dir = tempfile::tempdir().expect("tempdir");
        let out = dir.path().join("derive.csv");
        let status = Command::new(env!("CARGO_BIN_EXE_zetamoments"))
            .args(["derive", "--orders", "1,1", "--primes", "1000", "--out"])
            .arg(&out)
            .output()
            .expect("binary runs");
        if !status.status.success() {
            return (false, format!("derive exited with {:?}", status.status.code()));
        }
        let csv = std::fs::read_to_string(&out).expect("csv written");
        let rows: Vec<Vec<f64>> = csv
            .lines()
            .skip(2)
            .map(|l| l.split(',').map(|x| x.parse().expect("number")).collect())
            .collect();
        let integrand = [-2.52789, 2.12487, -0.03621];
        let integrated = [-4.65238, 2.95321, -0.52037];
        let e1 = (0..3).map(|m| (rows[m][1] - integrand[m]).abs()).fold(0.0, f64::max);
        let e2 = (0..3).map(|m| (rows[m][2] - integrated[m]).abs()).fold(0.0, f64::max);
        let primes = PrimeTable::first(1000);
        let derived = derive_integrand(&[1, 1], &primes).expect("derive");
        let tensor = arith_deriv_tensor(2, 3, &primes).expect("tensor");
        let closed = second_moment_integrand(&tensor, stieltjes_head().expect("stieltjes")).expect("closed");
        let e3 = (0..4).map(|m| (derived.coeffs()[m] - closed.coeffs()[m]).abs()).fold(0.0, f64::max);
        let pass = e1 < 5e-3 && e2 < 1e-2 && e3 < 1e-10;
        (
            pass,
            format!(
                "integrand err {e1:.1e} [{}], integrated ({:.5}, {:.5}, {:.5}) err {e2:.2e} [{}], paths {e3:.1e} [{}]",
                ok(e1 < 5e-3),
                rows[2][2],
                rows[1][2],
                rows[0][2],
                ok(e2 < 1e-2),
                ok(e3 < 1e-10)
            ),
        )
    })
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

fn criterion_7() -> Verdict {
    timed("7", "Shanks hard gate", 600, || {
        let zeros = find_zeros(ZeroLimit::MaxCount(2000)).expect("zeros");
        let trace = discrete_moment(&zeros, &[1], 2000).expect("sum");
        let top = trace.rows.last().expect("row");
        let pred = integrate_logpoly(&shanks_integrand(1).expect("shanks"), top.t).expect("integral");
        let rel = (top.sum.re - pred).abs() / top.sum.norm();
        (rel < 0.01 && zeros.len() == 2000, format!("T = {:.3}, sum {:.4}, prediction {pred:.4}, rel {rel:.2e}", top.t, top.sum.re))
    })
}

fn criterion_8(zeros: &[ZeroRecord]) -> Verdict {
    timed("8", "second moment over 10⁴ zeros", 1800, || {
        let p = derive_integrand(&[1, 1], &PrimeTable::first(1000)).expect("derive");
        let trace = compare(&discrete_moment(zeros, &[1, 1], 1).expect("sum"), &p).expect("compare");
        let rows = &trace.rows;
        let a = rows.iter().filter(|r| r.count > 10).all(|r| r.sum.re > 0.0);
        let imag = max_imag_ratio(&trace, 1000);
        let b = imag < 0.01;
        let lead = rows.iter().map(|r| r.residual_leading.abs()).fold(0.0, f64::max);
        let full = rows.iter().map(|r| r.residual_full.abs()).fold(0.0, f64::max);
        let c = lead >= 10.0 * full;
        let d = rows.windows(2).any(|w| w[0].residual_leading * w[1].residual_leading < 0.0);
        (
            a && b && c && d,
            format!(
                "(a) {} (b) max |Im|/Re {imag:.3} {} (c) max|leading| {lead:.1} vs 10×max|full| {:.1} {} (d) sign change {}",
                ok(a),
                ok(b),
                10.0 * full,
                ok(c),
                ok(d)
            ),
        )
    })
}

fn criterion_9() -> Verdict {
    timed("9", "numerical hygiene", 60, || {
        let mut cauchy: f64 = 0.0;
        for t in [14.134725141734693, 100.0, 1000.0, 5000.0] {
            for n in 0..=6 {
                let a = zeta_deriv_at_radius(n, t, 0.05).expect("cauchy");
                let b = zeta_deriv_at_radius(n, t, 0.1).expect("cauchy");
                cauchy = cauchy.max((a - b).norm() / (1.0 + b.norm()));
            }
        }
        let x: f64 = 0.1;
        let laurent = 1.0 / x
            + (0..=8u32)
                .map(|n| {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sign * stieltjes(n as usize).expect("stieltjes") * x.powi(n as i32) / fact(n)
                })
                .sum::<f64>();
        let em = zeta_em(Complex64::new(1.0 + x, 0.0), 60).expect("zeta");
        let laurent_err = (em.re - laurent).abs();
        let primes = PrimeTable::first(1000);
        let tensor = arith_deriv_tensor(2, 3, &primes).expect("tensor");
        let zero = ShiftSet::from_real(&[0.0, 0.0]);
        let h = 1e-4;
        let f = |d: f64| arith_factor(&zero, Complex64::new(d, 0.0), &primes).expect("factor").re;
        let d1 = (f(h) - f(-h)) / (2.0 * h);
        let d2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        let fd = ((d1 - tensor.get3(0, 0, 1)) / tensor.get3(0, 0, 1))
            .abs()
            .max(((d2 - tensor.get3(0, 0, 2)) / tensor.get3(0, 0, 2)).abs());
        let (c1, c2, c3) = (cauchy < 1e-7, laurent_err < 1e-6, fd < 1e-5);
        (
            c1 && c2 && c3,
            format!(
                "Cauchy r-dependence (orders 0–6) {cauchy:.1e} [{}], ζ(1.1) {laurent_err:.1e} [{}], tensor FD {fd:.1e} [{}]",
                ok(c1),
                ok(c2),
                ok(c3)
            ),
        )
    })
}

fn main() -> ExitCode {
    let mut all = true;
    for c in [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7] {
        all &= report(&c());
    }
    let start = Instant::now();
    let zeros = find_zeros(ZeroLimit::MaxCount(10_000)).expect("zeros");
    let search = start.elapsed();
    let mut v8 = criterion_8(&zeros);
    v8.elapsed += search;
    all &= report(&v8);
    all &= report(&criterion_9());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
