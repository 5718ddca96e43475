use super::TruncatedSeries;
use crate::{Result, C64};

/// `f(X, Y) = sum f_ij X^i Y^j`, truncated at total degree `cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariateSeries {
    cap: usize,
    coeffs: Vec<C64>,
}

fn tri_index(i: usize, j: usize) -> usize {
    let s = i + j;
    s * (s + 1) / 2 + j
}

impl BivariateSeries {
    pub fn zero(cap: usize) -> Self {
        BivariateSeries { cap, coeffs: vec![C64::new(0.0, 0.0); (cap + 1) * (cap + 2) / 2] }
    }

    pub fn from_fn(cap: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut s = Self::zero(cap);
        for i in 0..=cap {
            for j in 0..=(cap - i) {
                s.coeffs[tri_index(i, j)] = f(i, j);
            }
        }
        s
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if i + j > self.cap {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[tri_index(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, c: C64) {
        assert!(i + j <= self.cap, "({i}, {j}) beyond cap {}", self.cap);
        self.coeffs[tri_index(i, j)] = c;
    }

    /// `(X + Y) f`.
    pub fn mul_x_plus_y(&self) -> Self {
        Self::from_fn(self.cap, |i, j| {
            let a = if i > 0 { self.get(i - 1, j) } else { C64::new(0.0, 0.0) };
            let b = if j > 0 { self.get(i, j - 1) } else { C64::new(0.0, 0.0) };
            a + b
        })
    }

    /// `f(Y, X)`.
    pub fn swap(&self) -> Self {
        Self::from_fn(self.cap, |i, j| self.get(j, i))
    }

    /// `(f(X, Y) - f(Y, X)) / 2`.
    pub fn antisymmetrize(&self) -> Self {
        Self::from_fn(self.cap, |i, j| (self.get(i, j) - self.get(j, i)) * 0.5)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_fn(self.cap, |i, j| self.get(i, j) * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.cap.max(other.cap), |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let cap = self.cap.max(other.cap);
        let mut m: f64 = 0.0;
        for i in 0..=cap {
            for j in 0..=(cap - i) {
                m = m.max((self.get(i, j) - other.get(i, j)).norm());
            }
        }
        m
    }
}

/// Coefficients of `(f(X + Y) - f(Y)) / X` for `f = sum f_n a^n`, computed
/// term by term: `f_n sum_{k=1}^n C(n, k) X^{k-1} Y^{n-k}`.
pub fn divided_difference(f: &[C64], cap: usize) -> BivariateSeries {
    let mut out = BivariateSeries::zero(cap);
    for (n, &fn_) in f.iter().enumerate().skip(1) {
        let mut binom = 1.0;
        for k in 1..=n {
            binom = binom * (n - k + 1) as f64 / k as f64;
            let (i, j) = (k - 1, n - k);
            if i + j <= cap {
                let old = out.get(i, j);
                out.set(i, j, old + fn_ * binom);
            }
        }
    }
    out
}

/// `f[[B, C]]_t = sum f_ij [ad_t^i B, ad_t^j C]`.
pub fn bibracket(
    f: &BivariateSeries,
    b: &TruncatedSeries,
    c: &TruncatedSeries,
    t: &TruncatedSeries,
) -> Result<TruncatedSeries> {
    let n = b.cap();
    let mut out = TruncatedSeries::zero(n);
    let cap = f.cap();
    let mut ad_b = vec![b.clone()];
    let mut ad_c = vec![c.clone()];
    for k in 1..=cap {
        ad_b.push(t.lie_bracket(&ad_b[k - 1])?);
        ad_c.push(t.lie_bracket(&ad_c[k - 1])?);
    }
    for i in 0..=cap {
        if ad_b[i].is_zero() {
            continue;
        }
        for j in 0..=(cap - i) {
            let fij = f.get(i, j);
            if fij == C64::new(0.0, 0.0) || ad_c[j].is_zero() {
                continue;
            }
            out.axpy(fij, &ad_b[i].lie_bracket(&ad_c[j])?);
        }
    }
    Ok(out)
}
