//! Elementary and complete homogeneous symmetric polynomials, Vandermonde
//! products and the alternating sum `Σ_ℓ v_ℓⁿ Π_{j≠ℓ} v_j/(v_j − v_ℓ)`.

use crate::error::{domain, Result};
use crate::scalar::{c1, cz, Real, C};

pub const DEFAULT_EPS_DISTINCT: f64 = 1e-9;

/// A non-empty list of complex values with a confluence threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector<T: Real> {
    entries: Vec<C<T>>,
    eps: T,
}

impl<T: Real> ValueVector<T> {
    pub fn new(entries: Vec<C<T>>) -> Result<Self> {
        Self::with_eps(entries, T::lit(DEFAULT_EPS_DISTINCT))
    }

    pub fn with_eps(entries: Vec<C<T>>, eps: T) -> Result<Self> {
        if entries.is_empty() {
            return domain("value vector must have at least one entry");
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("value vector entries must be finite");
        }
        Ok(Self { entries, eps })
    }

    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C::new(x, T::zero())).collect())
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn distinct(&self) -> bool {
        let v = &self.entries;
        (0..v.len()).all(|i| (i + 1..v.len()).all(|j| (v[i] - v[j]).norm() > self.eps))
    }

    pub fn nonzero(&self) -> bool {
        self.entries.iter().all(|z| z.norm() > self.eps)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.nonzero() {
            return domain("cannot invert a vector with a zero entry");
        }
        Self::with_eps(self.entries.iter().map(|z| z.inv()).collect(), self.eps)
    }
}

/// Ordered complex shifts `α₁, …, α_k`; may be empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSet<T: Real> {
    shifts: Vec<C<T>>,
    eps: T,
}

impl<T: Real> ShiftSet<T> {
    pub fn new(shifts: Vec<C<T>>) -> Self {
        Self { shifts, eps: T::lit(DEFAULT_EPS_DISTINCT) }
    }

    pub fn with_eps(shifts: Vec<C<T>>, eps: T) -> Self {
        Self { shifts, eps }
    }

    pub fn from_real(values: &[T]) -> Self {
        Self::new(values.iter().map(|&x| C::new(x, T::zero())).collect())
    }

    pub fn shifts(&self) -> &[C<T>] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    /// `e^{-iα_r}` for every shift.
    pub fn unit_points(&self) -> Vec<C<T>> {
        self.shifts.iter().map(|a| (C::new(T::zero(), -T::one()) * a).exp()).collect()
    }

    /// Pairwise distinct and nonzero once mapped to the unit circle.
    pub fn separated(&self) -> bool {
        let x = self.unit_points();
        let one = c1::<T>();
        x.iter().all(|z| (one - z).norm() > self.eps)
            && (0..x.len()).all(|i| (i + 1..x.len()).all(|j| (x[i] - x[j]).norm() > self.eps))
    }
}

/// All elementary symmetric polynomials `C_0, …, C_k` of the values.
pub fn elem_sym_all<T: Real>(values: &[C<T>]) -> Vec<C<T>> {
    let mut e = vec![cz::<T>(); values.len() + 1];
    e[0] = c1();
    for (n, &x) in values.iter().enumerate() {
        for j in (1..=n + 1).rev() {
            let prev = e[j - 1];
            e[j] += x * prev;
        }
    }
    e
}

pub fn elem_sym<T: Real>(j: usize, v: &ValueVector<T>) -> Result<C<T>> {
    if j > v.len() {
        return domain(format!("elementary symmetric index {j} exceeds length {}", v.len()));
    }
    Ok(elem_sym_all(v.entries())[j])
}

/// `p_1, …, p_m` (index 0 holds the count).
pub fn power_sums<T: Real>(values: &[C<T>], m: usize) -> Vec<C<T>> {
    let mut p = vec![cz::<T>(); m + 1];
    p[0] = C::new(T::count(values.len()), T::zero());
    let mut pw: Vec<C<T>> = values.to_vec();
    for pj in p.iter_mut().skip(1) {
        *pj = pw.iter().fold(cz(), |acc, &z| acc + z);
        for (w, &z) in pw.iter_mut().zip(values) {
            *w *= z;
        }
    }
    p
}

/// `h_0, …, h_m` by the power-sum recurrence `j h_j = Σ_{i=1}^{j} p_i h_{j−i}`.
pub fn complete_homogeneous_upto<T: Real>(m: usize, values: &[C<T>]) -> Vec<C<T>> {
    let p = power_sums(values, m);
    let mut h = vec![cz::<T>(); m + 1];
    h[0] = c1();
    for j in 1..=m {
        let mut acc = cz::<T>();
        for i in 1..=j {
            acc += p[i] * h[j - i];
        }
        h[j] = acc / T::count(j);
    }
    h
}

pub fn complete_homogeneous<T: Real>(m: usize, v: &ValueVector<T>) -> C<T> {
    complete_homogeneous_upto(m, v.entries())[m]
}

pub fn vandermonde<T: Real>(v: &ValueVector<T>) -> C<T> {
    let e = v.entries();
    let mut acc = c1::<T>();
    for j in 0..e.len() {
        for i in 0..j {
            acc *= e[j] - e[i];
        }
    }
    acc
}

/// `Σ_ℓ v_ℓⁿ Π_{j≠ℓ} v_j/(v_j − v_ℓ)` in closed form.
pub fn combinatorial_sum<T: Real>(n: i64, v: &ValueVector<T>) -> Result<C<T>> {
    if !v.distinct() || !v.nonzero() {
        return domain("alternating sum needs distinct nonzero values");
    }
    let k = v.len() as i64;
    if n >= k {
        let prod = v.entries().iter().fold(c1::<T>(), |acc, &z| acc * z);
        let sign = if (k + 1) % 2 == 0 { T::one() } else { -T::one() };
        Ok(complete_homogeneous((n - k) as usize, v) * prod * sign)
    } else if n >= 1 {
        Ok(cz())
    } else {
        Ok(complete_homogeneous(n.unsigned_abs() as usize, &v.inverse()?))
    }
}

/// The same sum evaluated term by term.
pub fn combinatorial_sum_direct<T: Real>(n: i64, v: &ValueVector<T>) -> C<T> {
    let e = v.entries();
    let mut total = cz::<T>();
    for (l, &vl) in e.iter().enumerate() {
        let mut term = vl.powi(n as i32);
        for (j, &vj) in e.iter().enumerate() {
            if j != l {
                term *= vj / (vj - vl);
            }
        }
        total += term;
    }
    total
}
