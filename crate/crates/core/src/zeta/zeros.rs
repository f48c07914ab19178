//! Zeros on the critical line from sign changes of Hardy's Z between Gram
//! points, validated block by block.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::{hardy_z, hardy_z_em, theta, theta_prime};
use crate::error::{domain, Error, Result};

const CACHE_HEADER: &str = "# zeta-zeros v1";
/// Each Gram interval of a short block is split into at most `2^MAX_SPLIT`
/// pieces while hunting for missing sign changes.
const MAX_SPLIT: u32 = 10;
const ROOT_TOL: f64 = 1e-11;

/// `ρ = 1/2 + iγ`, numbered by height from 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRecord {
    pub index: usize,
    pub gamma: f64,
    /// Bound on `|γ_true − gamma|`.
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroLimit {
    MaxT(f64),
    MaxCount(usize),
}

/// Gram point `g_n` with `θ(g_n) = nπ`, for `n ≥ −1`.
pub fn gram_point(n: i64) -> Result<f64> {
    if n < -1 {
        return domain("Gram points are defined here for n ≥ −1");
    }
    let target = n as f64 * std::f64::consts::PI;
    // crude start on the increasing branch of θ, then Newton
    let mut t = if n < 10 { 10.0 + 6.0 * (n + 1) as f64 } else { 2.0 * std::f64::consts::PI * n as f64 / (n as f64).ln() * 1.2 };
    for _ in 0..100 {
        let step = (theta(t) - target) / theta_prime(t);
        let next = (t - step).max(7.0);
        if (next - t).abs() <= 1e-13 * t {
            return Ok(next);
        }
        t = next;
    }
    Ok(t)
}

/// Signed value that is positive at a good Gram point.
fn gram_sign(n: i64, z: f64) -> f64 {
    if n.rem_euclid(2) == 0 {
        z
    } else {
        -z
    }
}

struct Block {
    lo: f64,
    hi: f64,
    brackets: Vec<(f64, f64, f64, f64)>,
}

/// Sign-change brackets `(a, b, Z(a), Z(b))` in `[lo, hi]`, refining every
/// sub-interval until `expected` are found.
fn block_brackets(f: impl Fn(f64) -> f64, points: &[(f64, f64)], expected: usize) -> Result<Vec<(f64, f64, f64, f64)>> {
    let mut pts = points.to_vec();
    for level in 0..=MAX_SPLIT {
        let found: Vec<_> = pts
            .windows(2)
            .filter(|w| w[0].1 * w[1].1 < 0.0)
            .map(|w| (w[0].0, w[1].0, w[0].1, w[1].1))
            .collect();
        if found.len() == expected {
            return Ok(found);
        }
        if found.len() > expected || level == MAX_SPLIT {
            return Err(Error::Integrity {
                lo: points[0].0,
                hi: points[points.len() - 1].0,
                expected,
                found: found.len(),
            });
        }
        let mut next = Vec::with_capacity(2 * pts.len());
        for w in pts.windows(2) {
            next.push(w[0]);
            let m = 0.5 * (w[0].0 + w[1].0);
            next.push((m, f(m)));
        }
        next.push(pts[pts.len() - 1]);
        pts = next;
    }
    unreachable!()
}

/// All zeros up to the limit. Gram points `g_j` with `(−1)^j Z(g_j) > 0`
/// delimit blocks; a block spanning `m` Gram intervals must hold exactly `m`
/// sign changes, after local subdivision if needed. Each zero is then
/// refined by Brent's method.
pub fn find_zeros(limit: ZeroLimit) -> Result<Vec<ZeroRecord>> {
    match limit {
        ZeroLimit::MaxT(t) if !(t > 0.0) => return domain("height limit must be positive"),
        ZeroLimit::MaxCount(0) => return domain("zero count must be positive"),
        _ => {}
    }
    let mut blocks = Vec::new();
    let mut found = 0usize;
    let mut j: i64 = -1;
    let mut gj = gram_point(j)?;
    let mut zj = hardy_z(gj);
    if gram_sign(j, zj) <= 0.0 {
        return Err(Error::Integrity { lo: 0.0, hi: gj, expected: 0, found: 1 });
    }
    loop {
        let done = match limit {
            ZeroLimit::MaxT(t) => gj > t,
            ZeroLimit::MaxCount(c) => found >= c,
        };
        if done {
            break;
        }
        let mut pts = vec![(gj, zj)];
        let mut k = j;
        loop {
            k += 1;
            let g = gram_point(k)?;
            let z = hardy_z(g);
            pts.push((g, z));
            if gram_sign(k, z) > 0.0 {
                break;
            }
            if k - j > 64 {
                return Err(Error::Integrity { lo: gj, hi: g, expected: (k - j) as usize, found: 0 });
            }
        }
        let expected = (k - j) as usize;
        let brackets = block_brackets(hardy_z, &pts, expected)?;
        found += brackets.len();
        let (gk, zk) = pts[pts.len() - 1];
        blocks.push(Block { lo: gj, hi: gk, brackets });
        j = k;
        gj = gk;
        zj = zk;
    }
    let brackets: Vec<(f64, f64, f64, f64)> = blocks.iter().flat_map(|b| b.brackets.iter().copied()).collect();
    debug_assert!(blocks.iter().all(|b| b.lo < b.hi));
    let gammas: Vec<(f64, f64)> = brackets
        .par_iter()
        .map(|&(a, b, fa, fb)| polish(brent(hardy_z, a, b, fa, fb, ROOT_TOL).0, a, b))
        .collect();
    let mut out: Vec<ZeroRecord> = gammas
        .into_iter()
        .enumerate()
        .map(|(i, (gamma, tolerance))| ZeroRecord { index: i + 1, gamma, tolerance })
        .collect();
    match limit {
        ZeroLimit::MaxT(t) => out.retain(|r| r.gamma <= t),
        ZeroLimit::MaxCount(c) => out.truncate(c),
    }
    for w in out.windows(2) {
        if w[1].gamma <= w[0].gamma {
            return Err(Error::Integrity { lo: w[0].gamma, hi: w[1].gamma, expected: 1, found: 2 });
        }
    }
    Ok(out)
}

/// Re-solves near a Riemann–Siegel root with the Euler–Maclaurin `Z`,
/// whose error does not depend on the height.
fn polish(x: f64, lo: f64, hi: f64) -> (f64, f64) {
    let mut delta = 1e-6;
    loop {
        let a = (x - delta).max(lo);
        let b = (x + delta).min(hi);
        let (fa, fb) = (hardy_z_em(a), hardy_z_em(b));
        if fa == 0.0 {
            return (a, ROOT_TOL);
        }
        if fb == 0.0 {
            return (b, ROOT_TOL);
        }
        if fa * fb < 0.0 {
            return brent(hardy_z_em, a, b, fa, fb, ROOT_TOL);
        }
        if a == lo && b == hi {
            return (x, hi - lo);
        }
        delta *= 10.0;
    }
}

/// Brent's bracketing root finder; returns the root and a bound on its error.
fn brent(f: impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fb: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return (b, xm.abs().max(tol1));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    (b, (c - b).abs())
}

fn significant(x: f64, digits: usize) -> String {
    let int_digits = if x.abs() >= 1.0 { x.abs().log10().floor() as usize + 1 } else { 1 };
    let decimals = digits.saturating_sub(int_digits);
    format!("{x:.decimals$}")
}

/// Writes `index<TAB>gamma` lines with 15 significant digits.
pub fn write_zero_cache(path: &Path, zeros: &[ZeroRecord]) -> Result<()> {
    let mut s = String::with_capacity(32 * zeros.len() + 32);
    s.push_str(CACHE_HEADER);
    s.push('\n');
    for z in zeros {
        let _ = writeln!(s, "{}\t{}", z.index, significant(z.gamma, 15));
    }
    fs::write(path, s)?;
    Ok(())
}

/// Reads a cache written by [`write_zero_cache`]; the header is required.
pub fn read_zero_cache(path: &Path) -> Result<Vec<ZeroRecord>> {
    let text = fs::read_to_string(path)?;
    match text.lines().next() {
        Some(l) if l.trim() == CACHE_HEADER => {}
        _ => return Err(Error::Parse { line: 1, msg: format!("missing header `{CACHE_HEADER}`") }),
    }
    parse_zero_lines(&text)
}

/// Reads an external `index gamma` table; comment lines and the header are
/// optional, any whitespace separates the columns.
pub fn import_zero_table(path: &Path) -> Result<Vec<ZeroRecord>> {
    parse_zero_lines(&fs::read_to_string(path)?)
}

fn parse_zero_lines(text: &str) -> Result<Vec<ZeroRecord>> {
    let mut out: Vec<ZeroRecord> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: no + 1, msg };
        let mut cols = line.split_whitespace();
        let (Some(i), Some(g), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(bad("expected two columns `index gamma`".into()));
        };
        let index: usize = i.parse().map_err(|_| bad(format!("bad index `{i}`")))?;
        let gamma: f64 = g.parse().map_err(|_| bad(format!("bad ordinate `{g}`")))?;
        if index == 0 || !gamma.is_finite() || gamma <= 0.0 {
            return Err(bad("index and ordinate must be positive".into()));
        }
        if let Some(prev) = out.last() {
            if index <= prev.index || gamma <= prev.gamma {
                return Err(bad("indices and ordinates must increase".into()));
            }
        }
        let decimals = g.split_once('.').map(|(_, f)| f.trim_end_matches(|c: char| !c.is_ascii_digit()).len());
        let tolerance = 0.5 * 10f64.powi(-(decimals.unwrap_or(0) as i32));
        out.push(ZeroRecord { index, gamma, tolerance });
    }
    if out.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no zero records".into() });
    }
    Ok(out)
}
