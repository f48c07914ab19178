//! Truncated multivariate Laurent series with dense box storage.
//!
//! A series records, besides its coefficients, how far they are known: a
//! per-variable degree bound and an optional bound on the total degree of the
//! graded variables. Arithmetic propagates both, so a coefficient request
//! beyond them is an error rather than a silent zero.

use std::sync::Arc;

use crate::arith::stieltjes;
use crate::error::{domain, Error, Result};
use crate::scalar::{c1, cz, Real, C};

/// Precision marker for coefficients known to all orders.
pub const EXACT: i32 = i32::MAX / 4;

fn shift(h: i32, d: i32) -> i32 {
    if h >= EXACT {
        EXACT
    } else {
        h + d
    }
}

/// Variable names, gradedness and default truncation shared by related series.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    names: Vec<String>,
    graded: Vec<bool>,
    max_degree: Vec<i32>,
    total: i32,
    pole_cap: i32,
}

impl Space {
    /// All variables graded and truncated at `max_degree`, no total bound.
    pub fn new(names: &[&str], max_degree: i32) -> Self {
        Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            graded: vec![true; names.len()],
            max_degree: vec![max_degree; names.len()],
            total: EXACT,
            pole_cap: 1,
        }
    }

    pub fn with_total(mut self, total: i32) -> Self {
        self.total = total;
        self
    }

    /// Excludes a variable from the total-degree count.
    pub fn ungraded(mut self, name: &str) -> Self {
        if let Some(i) = self.index(name) {
            self.graded[i] = false;
        }
        self
    }

    pub fn with_max_degree(mut self, name: &str, d: i32) -> Self {
        if let Some(i) = self.index(name) {
            self.max_degree[i] = d;
        }
        self
    }

    pub fn with_pole_cap(mut self, cap: i32) -> Self {
        self.pole_cap = cap;
        self
    }

    pub fn shared(self) -> Arc<Space> {
        Arc::new(self)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn is_graded(&self, i: usize) -> bool {
        self.graded[i]
    }

    pub fn total(&self) -> i32 {
        self.total
    }

    pub fn max_degree(&self) -> &[i32] {
        &self.max_degree
    }
}

#[derive(Debug, Clone)]
pub struct TruncSeries<T: Real> {
    space: Arc<Space>,
    lo: Vec<i32>,
    up: Vec<i32>,
    hi: Vec<i32>,
    total: i32,
    pole_cap: i32,
    data: Vec<C<T>>,
}

struct Terms<T: Real> {
    exps: Vec<i32>,
    vals: Vec<C<T>>,
    degs: Vec<i32>,
}

impl<T: Real> TruncSeries<T> {
    fn empty_box(space: &Arc<Space>, lo: Vec<i32>, up: Vec<i32>, hi: Vec<i32>, total: i32) -> Self {
        let size = lo.iter().zip(&up).map(|(l, u)| (u - l + 1).max(0) as usize).product::<usize>();
        Self {
            pole_cap: space.pole_cap,
            space: space.clone(),
            lo,
            up,
            hi,
            total,
            data: vec![cz(); size.max(1)],
        }
    }

    pub fn zero(space: &Arc<Space>) -> Self {
        let n = space.nvars();
        let mut s = Self::empty_box(space, vec![0; n], vec![0; n], vec![EXACT; n], EXACT);
        s.clip();
        s
    }

    pub fn constant(space: &Arc<Space>, c: C<T>) -> Self {
        Self::monomial(space, &vec![0; space.nvars()], c)
    }

    pub fn one(space: &Arc<Space>) -> Self {
        Self::constant(space, c1())
    }

    /// Exact monomial `c·x^e`.
    pub fn monomial(space: &Arc<Space>, e: &[i32], c: C<T>) -> Self {
        let n = space.nvars();
        let mut s = Self::empty_box(space, e.to_vec(), e.to_vec(), vec![EXACT; n], EXACT);
        s.data[0] = c;
        s.clip();
        s.trim();
        s
    }

    pub fn var(space: &Arc<Space>, name: &str) -> Result<Self> {
        let i = space
            .index(name)
            .ok_or_else(|| Error::Domain(format!("unknown variable {name}")))?;
        let mut e = vec![0; space.nvars()];
        e[i] = 1;
        Ok(Self::monomial(space, &e, c1()))
    }

    /// Builds a series from explicit terms known up to `hi` per variable and
    /// `total` in graded degree.
    pub fn from_terms(space: &Arc<Space>, terms: &[(Vec<i32>, C<T>)], hi: Vec<i32>, total: i32) -> Result<Self> {
        let n = space.nvars();
        if hi.len() != n || terms.iter().any(|(e, _)| e.len() != n) {
            return domain("exponent arity does not match the variable list");
        }
        if terms.is_empty() {
            let mut z = Self::zero(space);
            z.hi = hi;
            z.total = total;
            z.clip();
            return Ok(z);
        }
        let mut lo = vec![i32::MAX; n];
        let mut up = vec![i32::MIN; n];
        for (e, _) in terms {
            for v in 0..n {
                lo[v] = lo[v].min(e[v]);
                up[v] = up[v].max(e[v]);
            }
        }
        let mut s = Self::empty_box(space, lo, up, hi, total);
        for (e, c) in terms {
            let idx = s.index(e).expect("inside constructed box");
            s.data[idx] += *c;
        }
        s.check_poles()?;
        s.clip();
        s.trim();
        Ok(s)
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    /// Per-variable degree through which coefficients are known.
    pub fn precision(&self) -> &[i32] {
        &self.hi
    }

    /// Total graded degree through which coefficients are known.
    pub fn total_precision(&self) -> i32 {
        self.total
    }

    pub fn pole_cap(&self) -> i32 {
        self.pole_cap
    }

    pub fn with_pole_cap(mut self, cap: i32) -> Result<Self> {
        self.pole_cap = cap;
        self.check_poles()?;
        Ok(self)
    }

    /// Lowest stored exponent per variable; negative entries are poles.
    pub fn valuation(&self) -> &[i32] {
        &self.lo
    }

    fn nvars(&self) -> usize {
        self.space.nvars()
    }

    fn strides(&self) -> Vec<usize> {
        let n = self.nvars();
        let mut st = vec![1usize; n];
        for v in (0..n.saturating_sub(1)).rev() {
            st[v] = st[v + 1] * (self.up[v + 1] - self.lo[v + 1] + 1).max(0) as usize;
        }
        st
    }

    fn index(&self, e: &[i32]) -> Option<usize> {
        let st = self.strides();
        let mut idx = 0usize;
        for v in 0..self.nvars() {
            if e[v] < self.lo[v] || e[v] > self.up[v] {
                return None;
            }
            idx += (e[v] - self.lo[v]) as usize * st[v];
        }
        Some(idx)
    }

    fn for_each_exp(&self, mut f: impl FnMut(usize, &[i32])) {
        let n = self.nvars();
        if self.lo.iter().zip(&self.up).any(|(l, u)| u < l) {
            return;
        }
        let mut e = self.lo.clone();
        for idx in 0..self.data.len() {
            f(idx, &e);
            for v in (0..n).rev() {
                if e[v] < self.up[v] {
                    e[v] += 1;
                    break;
                }
                e[v] = self.lo[v];
            }
        }
    }

    fn graded_degree(&self, e: &[i32]) -> i32 {
        e.iter().zip(&self.space.graded).filter(|(_, g)| **g).map(|(x, _)| *x).sum()
    }

    fn known(&self, e: &[i32]) -> bool {
        e.iter().zip(&self.hi).all(|(x, h)| x <= h) && (self.total >= EXACT || self.graded_degree(e) <= self.total)
    }

    /// Drops entries beyond the space's storage limits, lowering the known
    /// precision wherever something was dropped, and zeroes unknown entries.
    fn clip(&mut self) {
        let n = self.nvars();
        let mut over = vec![false; n];
        let mut over_total = false;
        self.for_each_exp(|idx, e| {
            if self.data[idx] != cz() {
                for v in 0..n {
                    over[v] |= e[v] > self.space.max_degree[v];
                }
                over_total |= self.space.total < EXACT && self.graded_degree(e) > self.space.total;
            }
        });
        for v in 0..n {
            if over[v] {
                self.hi[v] = self.hi[v].min(self.space.max_degree[v]);
            }
        }
        if over_total {
            self.total = self.total.min(self.space.total);
        }
        let mut drop = Vec::new();
        self.for_each_exp(|idx, e| {
            if !e.iter().zip(&self.hi).all(|(x, h)| x <= h)
                || (self.total < EXACT && self.graded_degree(e) > self.total)
            {
                drop.push(idx);
            }
        });
        for idx in drop {
            self.data[idx] = cz();
        }
    }

    /// Shrinks the storage box to the nonzero support.
    fn trim(&mut self) {
        let n = self.nvars();
        let mut lo = vec![i32::MAX; n];
        let mut up = vec![i32::MIN; n];
        let mut any = false;
        self.for_each_exp(|idx, e| {
            if self.data[idx] != cz() {
                any = true;
                for v in 0..n {
                    lo[v] = lo[v].min(e[v]);
                    up[v] = up[v].max(e[v]);
                }
            }
        });
        if !any {
            self.lo = vec![0; n];
            self.up = vec![0; n];
            self.data = vec![cz()];
            return;
        }
        if lo == self.lo && up == self.up {
            return;
        }
        let mut out = Self::empty_box(&self.space, lo, up, self.hi.clone(), self.total);
        out.pole_cap = self.pole_cap;
        self.for_each_exp(|idx, e| {
            if self.data[idx] != cz() {
                let j = out.index(e).expect("support inside trimmed box");
                out.data[j] = self.data[idx];
            }
        });
        *self = out;
    }

    fn check_poles(&self) -> Result<()> {
        if self.is_zero() {
            return Ok(());
        }
        for v in 0..self.nvars() {
            if self.lo[v] < -self.pole_cap {
                return Err(Error::Domain(format!(
                    "pole order {} in {} exceeds cap {}",
                    -self.lo[v], self.space.names[v], self.pole_cap
                )));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| *c == cz())
    }

    fn terms(&self) -> Terms<T> {
        let mut items: Vec<(i32, Vec<i32>, C<T>)> = Vec::new();
        self.for_each_exp(|idx, e| {
            let c = self.data[idx];
            if c != cz() {
                items.push((self.graded_degree(e), e.to_vec(), c));
            }
        });
        items.sort_by_key(|(d, _, _)| *d);
        let mut t = Terms { exps: Vec::new(), vals: Vec::new(), degs: Vec::new() };
        for (d, e, c) in items {
            t.exps.extend(e);
            t.vals.push(c);
            t.degs.push(d);
        }
        t
    }

    fn min_graded_degree(&self) -> i32 {
        let mut m = i32::MAX;
        self.for_each_exp(|idx, e| {
            if self.data[idx] != cz() {
                m = m.min(self.graded_degree(e));
            }
        });
        if m == i32::MAX {
            0
        } else {
            m
        }
    }

    fn max_graded_degree(&self) -> i32 {
        let mut m = i32::MIN;
        self.for_each_exp(|idx, e| {
            if self.data[idx] != cz() {
                m = m.max(self.graded_degree(e));
            }
        });
        if m == i32::MIN {
            0
        } else {
            m
        }
    }

    /// Nonzero terms as (exponents, coefficient).
    pub fn nonzero_terms(&self) -> Vec<(Vec<i32>, C<T>)> {
        let t = self.terms();
        let n = self.nvars();
        t.vals.iter().enumerate().map(|(i, c)| (t.exps[i * n..(i + 1) * n].to_vec(), *c)).collect()
    }

    /// Coefficient of `x^e`; an error if `e` lies beyond the known precision.
    pub fn coefficient(&self, e: &[i32]) -> Result<C<T>> {
        if e.len() != self.nvars() {
            return domain("exponent arity does not match the variable list");
        }
        if !self.known(e) {
            return Err(Error::OutsideBox(format!("{e:?} beyond precision {:?} / total {}", self.hi, self.total)));
        }
        Ok(self.index(e).map(|i| self.data[i]).unwrap_or(cz()))
    }

    /// Rewrites the series over a space containing all of its variables.
    pub fn embed(&self, space: &Arc<Space>) -> Result<Self> {
        if Arc::ptr_eq(space, &self.space) || **space == *self.space {
            let mut s = self.clone();
            s.space = space.clone();
            return Ok(s);
        }
        let n = space.nvars();
        let mut map = Vec::with_capacity(self.nvars());
        for (v, name) in self.space.names.iter().enumerate() {
            let j = space
                .index(name)
                .ok_or_else(|| Error::Domain(format!("variable {name} missing from target space")))?;
            if space.graded[j] != self.space.graded[v] {
                return domain(format!("variable {name} changes gradedness"));
            }
            map.push(j);
        }
        let mut lo = vec![0; n];
        let mut up = vec![0; n];
        let mut hi = vec![EXACT; n];
        for (v, &j) in map.iter().enumerate() {
            lo[j] = self.lo[v];
            up[j] = self.up[v];
            hi[j] = self.hi[v];
        }
        let mut out = Self::empty_box(space, lo, up, hi, self.total);
        out.pole_cap = self.pole_cap.max(space.pole_cap);
        let mut tgt = vec![0; n];
        self.for_each_exp(|idx, e| {
            for (v, &j) in map.iter().enumerate() {
                tgt[j] = e[v];
            }
            let k = out.index(&tgt).expect("embedded box");
            out.data[k] = self.data[idx];
        });
        out.clip();
        out.trim();
        Ok(out)
    }

    fn aligned(&self, other: &Self) -> Result<(Self, Self)> {
        if Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space {
            let mut b = other.clone();
            b.space = self.space.clone();
            return Ok((self.clone(), b));
        }
        let sub = |a: &Space, b: &Space| a.names.iter().all(|n| b.index(n).is_some());
        if sub(&self.space, &other.space) {
            Ok((self.embed(&other.space)?, other.clone()))
        } else if sub(&other.space, &self.space) {
            Ok((self.clone(), other.embed(&self.space)?))
        } else {
            domain("series variable lists are not nested")
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let n = a.nvars();
        let lo: Vec<i32> = (0..n).map(|v| a.lo[v].min(b.lo[v])).collect();
        let up: Vec<i32> = (0..n).map(|v| a.up[v].max(b.up[v])).collect();
        let hi: Vec<i32> = (0..n).map(|v| a.hi[v].min(b.hi[v])).collect();
        let mut out = Self::empty_box(&a.space, lo, up, hi, a.total.min(b.total));
        out.pole_cap = a.pole_cap.max(b.pole_cap);
        for s in [&a, &b] {
            s.for_each_exp(|idx, e| {
                let k = out.index(e).expect("union box");
                out.data[k] += s.data[idx];
            });
        }
        out.clip();
        out.trim();
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(-c1::<T>())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: C<T>) -> Self {
        let mut out = self.clone();
        for z in out.data.iter_mut() {
            *z *= c;
        }
        out.trim();
        out
    }

    pub fn add_constant(&self, c: C<T>) -> Result<Self> {
        self.add(&Self::constant(&self.space, c))
    }

    /// Cauchy product; the known region shrinks by the other factor's poles.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let n = a.nvars();
        let hi: Vec<i32> = (0..n)
            .map(|v| {
                let x = if a.is_zero() { EXACT } else { shift(b.hi[v], a.lo[v]) };
                let y = if b.is_zero() { EXACT } else { shift(a.hi[v], b.lo[v]) };
                x.min(y)
            })
            .collect();
        let total = {
            let x = if a.is_zero() { EXACT } else { shift(b.total, a.min_graded_degree()) };
            let y = if b.is_zero() { EXACT } else { shift(a.total, b.min_graded_degree()) };
            let t = x.min(y);
            if a.max_graded_degree() + b.max_graded_degree() > a.space.total {
                t.min(a.space.total)
            } else {
                t
            }
        };
        let hi: Vec<i32> = (0..n)
            .map(|v| if a.up[v] + b.up[v] > a.space.max_degree[v] { hi[v].min(a.space.max_degree[v]) } else { hi[v] })
            .collect();
        let lo: Vec<i32> = (0..n).map(|v| a.lo[v] + b.lo[v]).collect();
        let up: Vec<i32> = (0..n).map(|v| (a.up[v] + b.up[v]).min(hi[v])).collect();
        let pole_cap = a.pole_cap.max(b.pole_cap);
        if a.is_zero() || b.is_zero() || (0..n).any(|v| up[v] < lo[v]) {
            let mut z = Self::zero(&a.space);
            z.hi = hi;
            z.total = total;
            z.pole_cap = pole_cap;
            z.clip();
            return Ok(z);
        }
        let mut out = Self::empty_box(&a.space, lo, up, hi, total);
        out.pole_cap = pole_cap;
        out.check_poles()?;
        let ta = a.terms();
        let tb = b.terms();
        let st = out.strides();
        let mut e = vec![0i32; n];
        for i in 0..ta.vals.len() {
            let ea = &ta.exps[i * n..(i + 1) * n];
            let da = ta.degs[i];
            'inner: for j in 0..tb.vals.len() {
                if total < EXACT && da + tb.degs[j] > total {
                    break;
                }
                let eb = &tb.exps[j * n..(j + 1) * n];
                let mut idx = 0usize;
                for v in 0..n {
                    e[v] = ea[v] + eb[v];
                    if e[v] > out.up[v] {
                        continue 'inner;
                    }
                    idx += (e[v] - out.lo[v]) as usize * st[v];
                }
                out.data[idx] += ta.vals[i] * tb.vals[j];
            }
        }
        out.clip();
        out.trim();
        out.check_poles()?;
        Ok(out)
    }

    /// Multiplies by `x^m` (any integer exponents), shifting the known region.
    pub fn shift_exponents(&self, m: &[i32]) -> Result<Self> {
        let n = self.nvars();
        let mut out = self.clone();
        for v in 0..n {
            if self.is_zero() {
                break;
            }
            out.lo[v] += m[v];
            out.up[v] += m[v];
        }
        for v in 0..n {
            out.hi[v] = shift(self.hi[v], m[v]);
        }
        out.total = shift(self.total, self.graded_degree(m));
        out.clip();
        out.trim();
        out.check_poles()?;
        Ok(out)
    }

    fn nilpotent_power_sum(w: &Self, coeffs: impl Fn(usize) -> C<T>) -> Result<Self> {
        let mut acc = Self::constant(&w.space, coeffs(0));
        acc.hi = w.hi.clone();
        acc.total = w.total;
        let mut pw = Self::one(&w.space);
        for j in 1..10_000usize {
            pw = pw.mul(w)?;
            acc = acc.add(&pw.scale(coeffs(j)))?;
            if pw.is_zero() {
                return Ok(acc);
            }
        }
        domain("power series composition did not terminate; the space needs degree bounds")
    }

    fn has_poles(&self) -> bool {
        !self.is_zero() && self.lo.iter().any(|&l| l < 0)
    }

    fn constant_term(&self) -> C<T> {
        self.index(&vec![0; self.nvars()]).map(|i| self.data[i]).unwrap_or(cz())
    }

    /// Formal exponential of a series with zero constant term and no poles.
    pub fn exp(&self) -> Result<Self> {
        if self.has_poles() {
            return domain("exp of a series with poles");
        }
        let c0 = self.constant_term();
        if c0.norm() > T::lit(1e-12) {
            return domain("exp needs a zero constant term");
        }
        let this = self.add_constant(-c0)?;
        let mut fact = T::one();
        let facts: Vec<T> = (0..64)
            .map(|j| {
                if j > 0 {
                    fact *= T::count(j);
                }
                fact
            })
            .collect();
        Self::nilpotent_power_sum(&this, |j| {
            let f = if j < facts.len() { facts[j] } else { T::infinity() };
            C::new(T::one() / f, T::zero())
        })
    }

    /// Formal logarithm of a series with unit constant term and no poles.
    pub fn log(&self) -> Result<Self> {
        if self.has_poles() {
            return domain("log of a series with poles");
        }
        if (self.constant_term() - c1::<T>()).norm() > T::lit(1e-12) {
            return domain("log needs constant term 1");
        }
        let w = self.add_constant(-c1::<T>())?;
        Self::nilpotent_power_sum(&w, |j| {
            if j == 0 {
                cz()
            } else {
                let sign = if j % 2 == 1 { T::one() } else { -T::one() };
                C::new(sign / T::count(j), T::zero())
            }
        })
    }

    /// Multiplicative inverse after factoring out the lowest monomial.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Singular("reciprocal of zero".into()));
        }
        let m = self.lo.clone();
        let lead = self.index(&m).map(|i| self.data[i]).unwrap_or(cz());
        if lead.norm() < T::lit(1e-300) || lead.norm() == T::zero() {
            return Err(Error::Singular("no unit leading term after factoring the lowest monomial".into()));
        }
        let neg_m: Vec<i32> = m.iter().map(|x| -x).collect();
        let mut unit = self.clone();
        unit.pole_cap = EXACT;
        let unit = unit.shift_exponents(&neg_m)?.scale(lead.inv());
        let w = unit.add_constant(-c1::<T>())?.neg();
        let geo = Self::nilpotent_power_sum(&w, |_| c1())?;
        let mut out = geo.scale(lead.inv());
        out.pole_cap = EXACT;
        let mut out = out.shift_exponents(&neg_m)?;
        out.pole_cap = self.pole_cap;
        out.check_poles()?;
        Ok(out)
    }

    pub fn derivative(&self, name: &str) -> Result<Self> {
        let v = self
            .space
            .index(name)
            .ok_or_else(|| Error::Domain(format!("unknown variable {name}")))?;
        let mut out = self.clone();
        self.for_each_exp(|idx, e| {
            out.data[idx] = self.data[idx] * T::lit(e[v] as f64);
        });
        let mut m = vec![0; self.nvars()];
        m[v] = -1;
        let mut shifted = out.shift_exponents(&m);
        if let Err(Error::Domain(_)) = shifted {
            out.pole_cap = EXACT;
            shifted = out.shift_exponents(&m);
        }
        let mut s = shifted?;
        s.pole_cap = self.pole_cap.max(-s.lo[v]);
        Ok(s)
    }

    /// Coefficient slice at `name^e`, returned over the same space.
    pub fn slice(&self, name: &str, e: i32) -> Result<Self> {
        let v = self
            .space
            .index(name)
            .ok_or_else(|| Error::Domain(format!("unknown variable {name}")))?;
        if e > self.hi[v] {
            return Err(Error::OutsideBox(format!("{name}^{e} beyond precision {}", self.hi[v])));
        }
        let mut out = self.clone();
        self.for_each_exp(|idx, x| {
            if x[v] != e {
                out.data[idx] = cz();
            }
        });
        let mut m = vec![0; self.nvars()];
        m[v] = -e;
        out.pole_cap = EXACT;
        let mut out = out.shift_exponents(&m)?;
        out.hi[v] = EXACT;
        out.pole_cap = self.pole_cap;
        out.trim();
        Ok(out)
    }

    /// Divides by `x^m`, dropping (and reporting the largest of) the terms
    /// that would become poles.
    pub fn divide_by_monomial(&self, m: &[i32]) -> Result<(Self, T)> {
        let mut out = self.clone();
        let mut dropped = T::zero();
        self.for_each_exp(|idx, e| {
            if e.iter().zip(m).any(|(x, y)| x < y) {
                dropped = dropped.max(self.data[idx].norm());
                out.data[idx] = cz();
            }
        });
        let neg: Vec<i32> = m.iter().map(|x| -x).collect();
        Ok((out.shift_exponents(&neg)?, dropped))
    }

    /// Divides by `(x_j − x_i)`, returning the quotient and the largest
    /// coefficient of `self − (x_j − x_i)·quotient` inside the known region.
    pub fn divide_by_difference(&self, i: usize, j: usize) -> Result<(Self, T)> {
        let n = self.nvars();
        if i == j || i >= n || j >= n || !self.space.graded[i] || !self.space.graded[j] {
            return domain("difference division needs two distinct graded variables");
        }
        if self.has_poles() {
            return domain("difference division of a series with poles");
        }
        let t = self.total;
        if t >= EXACT || self.hi[i] < t || self.hi[j] < t {
            return domain("difference division needs a total-degree bound covering both variables");
        }
        let qt = t - 1;
        let mut lo = vec![0; n];
        let mut up = self.up.clone();
        for v in 0..n {
            lo[v] = 0;
            if self.space.graded[v] {
                up[v] = up[v].min(qt).max(0);
            }
        }
        let mut hi = self.hi.clone();
        hi[i] = hi[i].min(qt);
        hi[j] = hi[j].min(qt);
        let mut q = Self::empty_box(&self.space, lo, up, hi, qt);
        q.pole_cap = self.pole_cap;
        let mut vals = vec![cz(); q.data.len()];
        q.for_each_exp(|idx, e| {
            if self.graded_degree(e) > qt {
                return;
            }
            let mut acc = cz::<T>();
            let mut x = e.to_vec();
            x[j] += 1;
            for _ in 0..=e[i] {
                if let Some(k) = self.index(&x) {
                    acc += self.data[k];
                }
                x[j] += 1;
                x[i] -= 1;
            }
            vals[idx] = acc;
        });
        q.data = vals;
        q.clip();
        q.trim();
        let mut form = Self::zero(&self.space);
        let mut ej = vec![0; n];
        ej[j] = 1;
        let mut ei = vec![0; n];
        ei[i] = 1;
        form = form.add(&Self::monomial(&self.space, &ej, c1()))?;
        form = form.add(&Self::monomial(&self.space, &ei, -c1::<T>()))?;
        let back = form.mul(&q)?;
        let diff = self.sub(&back)?;
        let resid = diff.data.iter().fold(T::zero(), |m, c| m.max(c.norm()));
        Ok((q, resid))
    }

    /// Substitutes each variable by a homogeneous linear form in the graded
    /// variables of `target`; `forms[v]` lists coefficients over `target`.
    pub fn substitute_linear(&self, target: &Arc<Space>, forms: &[Vec<C<T>>]) -> Result<Self> {
        let n = self.nvars();
        if forms.len() != n || forms.iter().any(|f| f.len() != target.nvars()) {
            return domain("substitution needs one form per variable over the target variables");
        }
        if self.has_poles() {
            return domain("linear substitution of a series with poles");
        }
        for f in forms {
            for (w, c) in f.iter().enumerate() {
                if *c != cz() && !target.graded[w] {
                    return domain("linear forms must use graded target variables");
                }
            }
        }
        let mut new_total = if (0..n).any(|v| self.space.graded[v]) { self.total } else { EXACT };
        for v in 0..n {
            new_total = new_total.min(self.hi[v]);
        }
        let mut space_total = (*target.as_ref()).clone();
        space_total.total = space_total.total.min(new_total);
        let work = space_total.shared();
        let mut powers: Vec<Vec<Self>> = Vec::with_capacity(n);
        let maxe: Vec<i32> = (0..n).map(|v| self.up[v].max(0)).collect();
        for v in 0..n {
            let mut lin = Self::zero(&work);
            for (w, c) in forms[v].iter().enumerate() {
                if *c != cz() {
                    let mut e = vec![0; work.nvars()];
                    e[w] = 1;
                    lin = lin.add(&Self::monomial(&work, &e, *c))?;
                }
            }
            let mut pw = vec![Self::one(&work)];
            for p in 1..=maxe[v] {
                let next = pw[(p - 1) as usize].mul(&lin)?;
                pw.push(next);
            }
            powers.push(pw);
        }
        let mut acc = Self::zero(&work);
        for (e, c) in self.nonzero_terms() {
            let mut term = Self::constant(&work, c);
            for v in 0..n {
                if e[v] > 0 {
                    term = term.mul(&powers[v][e[v] as usize])?;
                }
            }
            acc = acc.add(&term)?;
        }
        let mut out = acc;
        out.space = target.clone();
        out.total = out.total.min(new_total);
        out.hi = vec![EXACT; target.nvars()];
        out.clip();
        out.trim();
        Ok(out)
    }

    /// Maps each variable `x_v` to `c_v · y_{map[v].0}` in `target`; poles allowed.
    pub fn rename_scale(&self, target: &Arc<Space>, map: &[(usize, C<T>)]) -> Result<Self> {
        let n = self.nvars();
        if map.len() != n {
            return domain("rename needs one image per variable");
        }
        let mut seen = vec![false; target.nvars()];
        for (v, (w, _)) in map.iter().enumerate() {
            if *w >= target.nvars() || seen[*w] {
                return domain("rename images must be distinct target variables");
            }
            if target.graded[*w] != self.space.graded[v] {
                return domain("rename must preserve gradedness");
            }
            seen[*w] = true;
        }
        let m = target.nvars();
        let mut terms = Vec::new();
        for (e, c) in self.nonzero_terms() {
            let mut x = vec![0; m];
            let mut coef = c;
            for v in 0..n {
                x[map[v].0] = e[v];
                coef *= map[v].1.powi(e[v]);
            }
            terms.push((x, coef));
        }
        let mut hi = vec![EXACT; m];
        for v in 0..n {
            hi[map[v].0] = self.hi[v];
        }
        let mut out = Self::from_terms(&Space::clone(target).with_pole_cap(EXACT).shared(), &terms, hi, self.total)?;
        out.space = target.clone();
        out.pole_cap = self.pole_cap.max(target.pole_cap);
        out.clip();
        out.trim();
        out.check_poles()?;
        Ok(out)
    }

    /// Forgets everything above the given per-variable degrees and total.
    pub fn truncate(&self, hi: &[i32], total: i32) -> Self {
        let mut out = self.clone();
        for v in 0..self.nvars() {
            out.hi[v] = out.hi[v].min(hi[v]);
        }
        out.total = out.total.min(total);
        out.clip();
        out.trim();
        out
    }

    /// Largest coefficient modulus.
    pub fn max_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }
}

/// `ζ(1+x) = 1/x + Σ_{n≤order} (−1)ⁿ γ_n xⁿ/n!`.
pub fn zeta_laurent(order: usize) -> Result<TruncSeries<f64>> {
    let space = Space::new(&["x"], order as i32).shared();
    let mut terms = vec![(vec![-1], C::new(1.0, 0.0))];
    let mut fact = 1.0;
    for n in 0..=order {
        if n > 0 {
            fact *= n as f64;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        terms.push((vec![n as i32], C::new(sign * stieltjes(n)? / fact, 0.0)));
    }
    TruncSeries::from_terms(&space, &terms, vec![order as i32], EXACT)
}

/// `x·ζ(1+x)` as a power series with constant term 1.
pub fn zeta_regular(order: usize) -> Result<TruncSeries<f64>> {
    let z = zeta_laurent(order)?;
    let x = TruncSeries::var(z.space(), "x")?;
    let mut space = (**z.space()).clone();
    space.max_degree[0] = order as i32 + 1;
    let wide = space.shared();
    x.embed(&wide)?.mul(&z.embed(&wide)?)
}

/// `ζ'/ζ(1+x) = −1/x + Σ A_n xⁿ`, from the derivative of `log(x·ζ(1+x))`.
pub fn zeta_logderiv_laurent(order: usize) -> Result<TruncSeries<f64>> {
    let reg = zeta_regular(order)?;
    let dlog = reg.log()?.derivative("x")?;
    let space = Space::new(&["x"], order as i32).shared();
    let pole = TruncSeries::monomial(&space, &[-1], C::new(-1.0, 0.0));
    let d = dlog.embed(&space)?.truncate(&[order as i32], EXACT);
    d.add(&pole)
}

/// `(t/2π)^{−α} = Σ_{j≤order} (−1)ʲ αʲ Lʲ / j!` over variables `(a, L)`.
pub fn t_power_expansion(order: usize) -> Result<TruncSeries<f64>> {
    let space = Space::new(&["a", "L"], order as i32).ungraded("L").shared();
    let mut terms = Vec::new();
    let mut fact = 1.0;
    for j in 0..=order {
        if j > 0 {
            fact *= j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        terms.push((vec![j as i32, j as i32], C::new(sign / fact, 0.0)));
    }
    TruncSeries::from_terms(&space, &terms, vec![order as i32, order as i32], EXACT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn poly(space: &Arc<Space>, terms: &[(&[i32], f64)]) -> TruncSeries<f64> {
        let t: Vec<(Vec<i32>, Complex64)> = terms.iter().map(|(e, v)| (e.to_vec(), c(*v))).collect();
        TruncSeries::from_terms(space, &t, vec![EXACT; space.nvars()], EXACT).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let s = Space::new(&["x"], 2).shared();
        let p = poly(&s, &[(&[0], 1.0), (&[1], 1.0)]).mul(&poly(&s, &[(&[0], 1.0), (&[1], -1.0)])).unwrap();
        assert_eq!(p.coefficient(&[0]).unwrap(), c(1.0));
        assert_eq!(p.coefficient(&[1]).unwrap(), c(0.0));
        assert_eq!(p.coefficient(&[2]).unwrap(), c(-1.0));
        assert_eq!(p.coefficient(&[3]).unwrap(), c(0.0));
        let q = poly(&s, &[(&[0], 1.0), (&[1], 1.0)]).mul(&poly(&s, &[(&[0], 1.0), (&[2], 1.0)])).unwrap();
        assert_eq!(q.coefficient(&[2]).unwrap(), c(1.0));
        assert!(q.coefficient(&[3]).is_err());
    }

    #[test]
    fn pole_cancellation() {
        let s = Space::new(&["x"], 4).shared();
        let inv = poly(&s, &[(&[-1], 1.0)]);
        let x = TruncSeries::var(&s, "x").unwrap();
        let one = inv.mul(&x).unwrap();
        assert_eq!(one.coefficient(&[0]).unwrap(), c(1.0));
        assert_eq!(one.coefficient(&[-1]).unwrap(), c(0.0));
        let g = 0.5772;
        let zl = poly(&s, &[(&[-1], 1.0), (&[0], g)]).mul(&x).unwrap();
        assert_eq!(zl.coefficient(&[0]).unwrap(), c(1.0));
        assert_eq!(zl.coefficient(&[1]).unwrap(), c(g));
    }

    #[test]
    fn pole_cap_enforced() {
        let s = Space::new(&["x"], 4).shared();
        let inv = poly(&s, &[(&[-1], 1.0)]);
        assert!(inv.mul(&inv).is_err());
        let relaxed = inv.clone().with_pole_cap(2).unwrap();
        assert_eq!(relaxed.mul(&inv).unwrap().coefficient(&[-2]).unwrap(), c(1.0));
    }

    #[test]
    fn geometric_reciprocal() {
        let s = Space::new(&["x"], 6).shared();
        let r = poly(&s, &[(&[0], 1.0), (&[1], -1.0)]).reciprocal().unwrap();
        for e in 0..=6 {
            assert!((r.coefficient(&[e]).unwrap() - c(1.0)).norm() < 1e-15);
        }
        assert_eq!(r.coefficient(&[5]).unwrap(), c(1.0));
    }

    #[test]
    fn reciprocal_with_pole() {
        let s = Space::new(&["x"], 6).shared();
        let p = poly(&s, &[(&[1], 1.0), (&[2], 1.0)]);
        let r = p.reciprocal().unwrap();
        assert_eq!(r.valuation(), &[-1]);
        assert_eq!(r.coefficient(&[-1]).unwrap(), c(1.0));
        assert_eq!(r.coefficient(&[0]).unwrap(), c(-1.0));
        assert_eq!(r.coefficient(&[1]).unwrap(), c(1.0));
        let back = p.mul(&r).unwrap();
        for e in 0..=back.precision()[0] {
            let want = if e == 0 { 1.0 } else { 0.0 };
            assert!((back.coefficient(&[e]).unwrap() - c(want)).norm() < 1e-14);
        }
    }

    #[test]
    fn reciprocal_of_zero_is_singular() {
        let s = Space::new(&["x"], 3).shared();
        assert!(matches!(TruncSeries::<f64>::zero(&s).reciprocal(), Err(Error::Singular(_))));
    }

    #[test]
    fn mercator_and_inverse_pair() {
        let s = Space::new(&["x", "y"], 5).shared();
        let l = poly(&s, &[(&[0, 0], 1.0), (&[1, 0], 1.0)]).log().unwrap();
        for k in 1..=5 {
            let want = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            assert!((l.coefficient(&[k, 0]).unwrap() - c(want)).norm() < 1e-15);
        }
        let p = poly(&s, &[(&[0, 0], 1.0), (&[1, 0], 1.0), (&[0, 1], 1.0)]);
        let back = p.log().unwrap().exp().unwrap();
        let diff = back.sub(&p).unwrap();
        assert!(diff.max_norm() < 1e-13);
        assert_eq!(TruncSeries::<f64>::zero(&s).exp().unwrap().coefficient(&[0, 0]).unwrap(), c(1.0));
        assert!(p.exp().is_err());
        assert!(poly(&s, &[(&[1, 0], 1.0)]).log().is_err());
    }

    #[test]
    fn coefficient_lookups() {
        let s = Space::new(&["x", "y"], 3).shared();
        let p = poly(&s, &[(&[0, 0], 1.0), (&[1, 1], 2.0)]);
        assert_eq!(p.coefficient(&[1, 1]).unwrap(), c(2.0));
        let one = Space::new(&["x"], 5).shared();
        assert_eq!(poly(&one, &[(&[-1], 1.0)]).coefficient(&[-1]).unwrap(), c(1.0));
        let geo = poly(&one, &[(&[0], 1.0), (&[1], -1.0)]).reciprocal().unwrap();
        assert_eq!(geo.coefficient(&[5]).unwrap(), c(1.0));
        assert!(matches!(geo.coefficient(&[6]), Err(Error::OutsideBox(_))));
    }

    #[test]
    fn derivative_and_slice() {
        let s = Space::new(&["a", "d"], 4).shared();
        let p = poly(&s, &[(&[2, 1], 3.0), (&[0, 2], 5.0), (&[1, 0], 1.0)]);
        let dd = p.derivative("d").unwrap();
        assert_eq!(dd.coefficient(&[2, 0]).unwrap(), c(3.0));
        assert_eq!(dd.coefficient(&[0, 1]).unwrap(), c(10.0));
        let sl = p.slice("d", 1).unwrap();
        assert_eq!(sl.coefficient(&[2, 0]).unwrap(), c(3.0));
        assert_eq!(sl.coefficient(&[0, 0]).unwrap(), c(0.0));
    }

    #[test]
    fn embedding_missing_variables() {
        let a = Space::new(&["a"], 3).shared();
        let al = Space::new(&["a", "L"], 3).ungraded("L").shared();
        let x = poly(&a, &[(&[0], 1.0), (&[1], 2.0)]);
        let l = TruncSeries::var(&al, "L").unwrap();
        let p = x.mul(&l).unwrap();
        assert_eq!(p.coefficient(&[1, 1]).unwrap(), c(2.0));
        let other = Space::new(&["b"], 3).shared();
        assert!(x.mul(&TruncSeries::var(&other, "b").unwrap()).is_err());
    }

    #[test]
    fn linear_substitution_and_difference_division() {
        let x = Space::new(&["x"], 4).shared();
        let geo = poly(&x, &[(&[0], 1.0), (&[1], -1.0)]).reciprocal().unwrap();
        let ab = Space::new(&["a", "b"], 4).with_total(4).shared();
        let sub = geo.substitute_linear(&ab, &[vec![c(1.0), c(-1.0)]]).unwrap();
        // 1/(1 − a + b) at a² : 1, at ab : −2
        assert!((sub.coefficient(&[2, 0]).unwrap() - c(1.0)).norm() < 1e-14);
        assert!((sub.coefficient(&[1, 1]).unwrap() - c(-2.0)).norm() < 1e-14);
        let diff = poly(&ab, &[(&[0, 1], 1.0), (&[1, 0], -1.0)]);
        let prod = diff.mul(&sub).unwrap();
        let (q, resid) = prod.divide_by_difference(0, 1).unwrap();
        assert!(resid < 1e-14);
        let e = q.sub(&sub.truncate(&[4, 4], 3)).unwrap();
        assert!(e.max_norm() < 1e-14);
    }

    #[test]
    fn monomial_division_reports_remainder() {
        let s = Space::new(&["x"], 4).shared();
        let p = poly(&s, &[(&[0], 1e-3), (&[1], 2.0)]);
        let (q, dropped) = p.divide_by_monomial(&[1]).unwrap();
        assert_eq!(q.coefficient(&[0]).unwrap(), c(2.0));
        assert_eq!(dropped, 1e-3);
    }

    #[test]
    fn zeta_expansions() {
        let z = zeta_laurent(4).unwrap();
        assert_eq!(z.coefficient(&[-1]).unwrap(), c(1.0));
        assert!((z.coefficient(&[0]).unwrap().re - 0.5772156649).abs() < 1e-10);
        assert!((z.coefficient(&[1]).unwrap().re - 0.0728158454).abs() < 1e-9);
        let l = zeta_logderiv_laurent(4).unwrap();
        assert_eq!(l.coefficient(&[-1]).unwrap(), c(-1.0));
        let reg = zeta_regular(4).unwrap();
        let r = reg.reciprocal().unwrap().mul(&reg).unwrap();
        for e in 0..=4 {
            let want = if e == 0 { 1.0 } else { 0.0 };
            assert!((r.coefficient(&[e]).unwrap() - c(want)).norm() < 1e-14);
        }
        // (ζ'/ζ)(1+x) · x ζ(1+x) = x ζ'(1+x)
        let xs = Space::new(&["x"], 4).shared();
        let lhs = l.mul(&reg).unwrap();
        let xzp = z.derivative("x").unwrap().with_pole_cap(2).unwrap().mul(&TruncSeries::var(&xs, "x").unwrap()).unwrap();
        let d = lhs.sub(&xzp).unwrap();
        assert!(d.max_norm() < 1e-13, "{}", d.max_norm());
    }

    #[test]
    fn t_power_coefficients() {
        let t = t_power_expansion(4).unwrap();
        assert_eq!(t.coefficient(&[0, 0]).unwrap(), c(1.0));
        assert_eq!(t.coefficient(&[1, 1]).unwrap(), c(-1.0));
        assert_eq!(t.coefficient(&[2, 2]).unwrap(), c(0.5));
        assert_eq!(t.coefficient(&[2, 1]).unwrap(), c(0.0));
    }

    #[test]
    fn single_precision_series() {
        let s = Space::new(&["x"], 5).shared();
        let p = TruncSeries::<f32>::from_terms(
            &s,
            &[(vec![0], C::new(1.0f32, 0.0)), (vec![1], C::new(-1.0f32, 0.0))],
            vec![EXACT],
            EXACT,
        )
        .unwrap();
        let r = p.reciprocal().unwrap();
        assert_eq!(r.coefficient(&[5]).unwrap().re, 1.0f32);
    }

    fn sparse(space: Arc<Space>) -> impl Strategy<Value = TruncSeries<f64>> {
        prop::collection::vec(((0i32..4, 0i32..4), -2.0f64..2.0), 1..6).prop_map(move |ts| {
            let terms: Vec<(Vec<i32>, Complex64)> = ts.into_iter().map(|((a, b), v)| (vec![a, b], c(v))).collect();
            TruncSeries::from_terms(&space, &terms, vec![EXACT, EXACT], EXACT).unwrap()
        })
    }

    fn sp() -> Arc<Space> {
        Space::new(&["x", "y"], 5).shared()
    }

    fn unit(space: Arc<Space>) -> impl Strategy<Value = TruncSeries<f64>> {
        sparse(space).prop_map(|s| {
            let t = s.coefficient(&[0, 0]).unwrap();
            s.add_constant(Complex64::new(1.5, 0.0) - t).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in sparse(sp()), b in sparse(sp()), c3 in sparse(sp())) {
            let l = a.mul(&b).unwrap().mul(&c3).unwrap();
            let r = a.mul(&b.mul(&c3).unwrap()).unwrap();
            prop_assert!(l.sub(&r).unwrap().max_norm() < 1e-12);
            let d1 = a.mul(&b.add(&c3).unwrap()).unwrap();
            let d2 = a.mul(&b).unwrap().add(&a.mul(&c3).unwrap()).unwrap();
            prop_assert!(d1.sub(&d2).unwrap().max_norm() < 1e-12);
        }

        #[test]
        fn reciprocal_identity(s in unit(sp())) {
            let prod = s.mul(&s.reciprocal().unwrap()).unwrap();
            let e = prod.add_constant(Complex64::new(-1.0, 0.0)).unwrap();
            prop_assert!(e.max_norm() < 1e-10 * s.max_norm().powi(6).max(1.0));
            let back = s.reciprocal().unwrap().reciprocal().unwrap();
            prop_assert!(back.sub(&s).unwrap().max_norm() < 1e-10 * s.max_norm().powi(6).max(1.0));
        }

        #[test]
        fn exp_log_pair(s in unit(sp())) {
            let t = s.coefficient(&[0, 0]).unwrap();
            let u = s.scale(t.inv());
            let back = u.log().unwrap().exp().unwrap();
            prop_assert!(back.sub(&u).unwrap().max_norm() < 1e-10 * u.max_norm().powi(6).max(1.0));
        }
    }
}
