use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use super::{block_offset, series_len, Letter, Word, MAX_CAP};
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Element of the free algebra on `t`, `A`, truncated above degree `cap`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "SeriesJson", try_from = "SeriesJson")]
pub struct TruncatedSeries {
    cap: usize,
    coeffs: Vec<C64>,
}

impl TruncatedSeries {
    pub fn zero(cap: usize) -> Self {
        assert!(cap <= MAX_CAP, "truncation degree {cap} exceeds {MAX_CAP}");
        TruncatedSeries { cap, coeffs: vec![ZERO; series_len(cap)] }
    }

    pub fn try_zero(cap: usize) -> Result<Self> {
        if cap > MAX_CAP {
            return Err(Error::CapTooLarge(cap));
        }
        Ok(Self::zero(cap))
    }

    pub fn one(cap: usize) -> Self {
        Self::scalar(cap, ONE)
    }

    pub fn scalar(cap: usize, c: C64) -> Self {
        let mut s = Self::zero(cap);
        s.coeffs[0] = c;
        s
    }

    pub fn letter(cap: usize, l: Letter) -> Self {
        Self::monomial(cap, Word::from_letters(&[l]), ONE)
    }

    pub fn t(cap: usize) -> Self {
        Self::letter(cap, Letter::T)
    }

    pub fn a(cap: usize) -> Self {
        Self::letter(cap, Letter::A)
    }

    /// `c * w`, or zero when `w` is longer than `cap`.
    pub fn monomial(cap: usize, w: Word, c: C64) -> Self {
        let mut s = Self::zero(cap);
        if w.len() <= cap {
            s.coeffs[w.flat_index()] = c;
        }
        s
    }

    /// Builds a series from `(word, coefficient)` pairs; repeated words add up.
    pub fn from_terms<'a>(cap: usize, terms: impl IntoIterator<Item = (&'a str, C64)>) -> Result<Self> {
        let mut s = Self::try_zero(cap)?;
        for (w, c) in terms {
            let word = Word::parse(w)?;
            if word.len() > cap {
                return Err(Error::WordTooLong { word: w.to_string(), cap });
            }
            s.coeffs[word.flat_index()] += c;
        }
        Ok(s)
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn coeff(&self, w: &Word) -> C64 {
        if w.len() > self.cap {
            ZERO
        } else {
            self.coeffs[w.flat_index()]
        }
    }

    /// Coefficient of a word given as a string; unknown letters give an error.
    pub fn coeff_str(&self, w: &str) -> Result<C64> {
        Ok(self.coeff(&Word::parse(w)?))
    }

    pub fn set_coeff(&mut self, w: &Word, c: C64) {
        assert!(w.len() <= self.cap, "word {w} longer than cap {}", self.cap);
        self.coeffs[w.flat_index()] = c;
    }

    pub fn constant_term(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    /// Coefficients of the words of length `d`, indexed by word code.
    pub fn block(&self, d: usize) -> &[C64] {
        &self.coeffs[block_offset(d)..block_offset(d + 1)]
    }

    pub fn block_mut(&mut self, d: usize) -> &mut [C64] {
        &mut self.coeffs[block_offset(d)..block_offset(d + 1)]
    }

    /// Nonzero terms in canonical order (by length, then code).
    pub fn terms(&self) -> impl Iterator<Item = (Word, C64)> + '_ {
        Word::all_up_to(self.cap)
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| *c != ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Largest coefficient modulus.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()))
    }

    pub fn sup_diff(&self, other: &Self) -> f64 {
        self.check_cap(other).expect("truncation mismatch");
        self.coeffs.iter().zip(&other.coeffs).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Sup norm of each length block, `d = 0..=cap`.
    pub fn degree_profile(&self) -> Vec<f64> {
        (0..=self.cap).map(|d| self.block(d).iter().fold(0.0f64, |m, c| m.max(c.norm()))).collect()
    }

    /// Smallest length carrying a nonzero coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        (0..=self.cap).find(|&d| self.block(d).iter().any(|c| *c != ZERO))
    }

    fn check_cap(&self, other: &Self) -> Result<()> {
        if self.cap != other.cap {
            Err(Error::CapMismatch { left: self.cap, right: other.cap })
        } else {
            Ok(())
        }
    }

    /// Same element viewed at another truncation degree.
    pub fn with_cap(&self, cap: usize) -> Self {
        let mut out = Self::zero(cap);
        let n = cap.min(self.cap);
        let len = series_len(n);
        out.coeffs[..len].copy_from_slice(&self.coeffs[..len]);
        out
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_cap(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(TruncatedSeries { cap: self.cap, coeffs })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_cap(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(TruncatedSeries { cap: self.cap, coeffs })
    }

    /// Truncated concatenation product.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_cap(other)?;
        let n = self.cap;
        let mut out = vec![ZERO; self.coeffs.len()];
        for da in 0..=n {
            let ablk = self.block(da);
            if ablk.iter().all(|c| *c == ZERO) {
                continue;
            }
            for db in 0..=(n - da) {
                let bblk = other.block(db);
                if bblk.iter().all(|c| *c == ZERO) {
                    continue;
                }
                let dst = block_offset(da + db);
                for (ia, &a) in ablk.iter().enumerate() {
                    if a == ZERO {
                        continue;
                    }
                    let base = dst + (ia << db);
                    for (o, &b) in out[base..base + bblk.len()].iter_mut().zip(bblk) {
                        *o += a * b;
                    }
                }
            }
        }
        Ok(TruncatedSeries { cap: n, coeffs: out })
    }

    pub fn scale(&self, c: C64) -> Self {
        TruncatedSeries { cap: self.cap, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: C64, other: &Self) {
        self.check_cap(other).expect("truncation mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
    }

    pub fn lie_bracket(&self, other: &Self) -> Result<Self> {
        let ab = self.checked_mul(other)?;
        let ba = other.checked_mul(self)?;
        ab.checked_sub(&ba)
    }

    /// `ad_x^k (b)`.
    pub fn ad_pow(x: &Self, k: usize, b: &Self) -> Result<Self> {
        let mut out = b.clone();
        for _ in 0..k {
            out = x.lie_bracket(&out)?;
        }
        Ok(out)
    }

    /// Truncated exponential. The constant term must vanish.
    pub fn exp_trunc(&self) -> Result<Self> {
        if self.coeffs[0].norm() > 1e-14 {
            return Err(Error::NonZeroConstant(format!(
                "exp needs a series without constant term, got {}",
                self.coeffs[0]
            )));
        }
        let mut x = self.clone();
        x.coeffs[0] = ZERO;
        let mut out = Self::one(self.cap);
        let mut term = Self::one(self.cap);
        for k in 1..=self.cap {
            term = term.checked_mul(&x)?.scale_real(1.0 / k as f64);
            out += &term;
        }
        Ok(out)
    }

    /// Truncated logarithm. The constant term must equal 1.
    pub fn log_trunc(&self) -> Result<Self> {
        if (self.coeffs[0] - ONE).norm() > 1e-12 {
            return Err(Error::NonZeroConstant(format!(
                "log needs a series with constant term 1, got {}",
                self.coeffs[0]
            )));
        }
        let mut y = self.clone();
        y.coeffs[0] = ZERO;
        let mut out = Self::zero(self.cap);
        let mut pow = Self::one(self.cap);
        for k in 1..=self.cap {
            pow = pow.checked_mul(&y)?;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            out.axpy(C64::new(sign / k as f64, 0.0), &pow);
        }
        Ok(out)
    }

    /// Inverse of a series with invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.norm() < 1e-300 {
            return Err(Error::NonZeroConstant("series with zero constant term is not invertible".into()));
        }
        // (c0 (1 + y))^{-1} = c0^{-1} sum (-y)^k
        let mut y = self.scale(c0.inv());
        y.coeffs[0] = ZERO;
        let neg_y = -&y;
        let mut out = Self::one(self.cap);
        let mut pow = Self::one(self.cap);
        for _ in 1..=self.cap {
            pow = pow.checked_mul(&neg_y)?;
            out += &pow;
        }
        Ok(out.scale(c0.inv()))
    }

    /// Words whose first letter is `l`, with that letter removed.
    pub fn left_quotient(&self, l: Letter) -> Self {
        let mut out = Self::zero(self.cap);
        for d in 1..=self.cap {
            let src = self.block(d);
            let half = 1usize << (d - 1);
            let start = l.bit() * half;
            out.block_mut(d - 1).copy_from_slice(&src[start..start + half]);
        }
        out
    }

    /// Image under the algebra endomorphism `t -> img_t`, `A -> img_a`.
    pub fn substitute(&self, img_t: &Self, img_a: &Self) -> Result<Self> {
        self.check_cap(img_t)?;
        self.check_cap(img_a)?;
        Ok(self.substitute_rec(img_t, img_a, self.cap))
    }

    // Horner scheme on the first letter: x = x_0 + t x_t + A x_A.
    fn substitute_rec(&self, img_t: &Self, img_a: &Self, max_len: usize) -> Self {
        let mut out = Self::scalar(self.cap, self.coeffs[0]);
        if max_len == 0 {
            return out;
        }
        for (l, img) in [(Letter::T, img_t), (Letter::A, img_a)] {
            let q = self.left_quotient(l);
            if q.is_zero() {
                continue;
            }
            let inner = q.substitute_rec(img_t, img_a, max_len - 1);
            out += &img.checked_mul(&inner).expect("caps checked");
        }
        out
    }

    /// Part of total degree `n` (the component `R_n` of the weight grading).
    pub fn weight_component(&self, n: usize) -> Self {
        let mut out = Self::zero(self.cap);
        if n <= self.cap {
            out.block_mut(n).copy_from_slice(self.block(n));
        }
        out
    }

    /// Part with exactly `p` occurrences of `A`.
    pub fn hodge_component(&self, p: usize) -> Self {
        self.filter_words(|w| w.count_a() == p)
    }

    /// Weight filtration `W_n`: sum of the components `R_i` with `i <= -n`.
    pub fn weight_filtration(&self, n: i64) -> Self {
        self.filter_words(|w| (w.len() as i64) <= -n)
    }

    /// Hodge filtration `F^p`: words with `deg_A >= -p`.
    pub fn hodge_filtration(&self, p: i64) -> Self {
        self.filter_words(|w| (w.count_a() as i64) >= -p)
    }

    fn filter_words(&self, keep: impl Fn(&Word) -> bool) -> Self {
        let mut out = Self::zero(self.cap);
        for (w, c) in Word::all_up_to(self.cap).zip(&self.coeffs) {
            if keep(&w) {
                out.coeffs[w.flat_index()] = *c;
            }
        }
        out
    }

    /// Zeroes coefficients with modulus below `eps`.
    pub fn chop(&self, eps: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| if c.norm() < eps { ZERO } else { *c }).collect();
        TruncatedSeries { cap: self.cap, coeffs }
    }
}

/// `sum_k coeffs[k] ad_x^k (b)`.
pub fn ad_series(x: &TruncatedSeries, coeffs: &[C64], b: &TruncatedSeries) -> Result<TruncatedSeries> {
    let mut out = TruncatedSeries::zero(b.cap());
    let mut term = b.clone();
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            term = x.lie_bracket(&term)?;
            if term.is_zero() {
                break;
            }
        }
        out.axpy(*c, &term);
    }
    Ok(out)
}

/// Taylor coefficients of `exp(f)` up to degree `n`, given those of `f` with
/// `f[0] = 0`.
pub fn exp_series_coeffs(f: &[C64], n: usize) -> Vec<C64> {
    let mut g = vec![ZERO; n + 1];
    g[0] = ONE;
    for m in 1..=n {
        let mut acc = ZERO;
        for k in 1..=m.min(f.len().saturating_sub(1)) {
            acc += f[k] * g[m - k] * k as f64;
        }
        g[m] = acc / m as f64;
    }
    g
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&TruncatedSeries> for &TruncatedSeries {
            type Output = TruncatedSeries;
            fn $m(self, rhs: &TruncatedSeries) -> TruncatedSeries {
                self.$f(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<TruncatedSeries> for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $m(self, rhs: TruncatedSeries) -> TruncatedSeries {
                (&self).$f(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<&TruncatedSeries> for TruncatedSeries {
            type Output = TruncatedSeries;
            fn $m(self, rhs: &TruncatedSeries) -> TruncatedSeries {
                (&self).$f(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<TruncatedSeries> for &TruncatedSeries {
            type Output = TruncatedSeries;
            fn $m(self, rhs: TruncatedSeries) -> TruncatedSeries {
                self.$f(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Mul<C64> for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: C64) -> TruncatedSeries {
        self.scale(rhs)
    }
}

impl Mul<C64> for TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: C64) -> TruncatedSeries {
        self.scale(rhs)
    }
}

impl MulAssign<C64> for TruncatedSeries {
    fn mul_assign(&mut self, rhs: C64) {
        for c in &mut self.coeffs {
            *c *= rhs;
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries { cap: self.cap, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        -&self
    }
}

impl AddAssign<&TruncatedSeries> for TruncatedSeries {
    fn add_assign(&mut self, rhs: &TruncatedSeries) {
        self.axpy(ONE, rhs);
    }
}

impl SubAssign<&TruncatedSeries> for TruncatedSeries {
    fn sub_assign(&mut self, rhs: &TruncatedSeries) {
        self.axpy(-ONE, rhs);
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    word: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    cap: usize,
    terms: Vec<TermJson>,
}

impl From<TruncatedSeries> for SeriesJson {
    fn from(s: TruncatedSeries) -> Self {
        let terms = s
            .terms()
            .map(|(w, c)| TermJson { word: w.to_string(), re: c.re, im: c.im })
            .collect();
        SeriesJson { cap: s.cap, terms }
    }
}

impl TryFrom<SeriesJson> for TruncatedSeries {
    type Error = Error;
    fn try_from(j: SeriesJson) -> Result<Self> {
        let mut s = TruncatedSeries::try_zero(j.cap)?;
        let mut seen = vec![false; s.coeffs.len()];
        for t in j.terms {
            let w = Word::parse(&t.word)?;
            if w.len() > j.cap {
                return Err(Error::WordTooLong { word: t.word, cap: j.cap });
            }
            let i = w.flat_index();
            if seen[i] {
                return Err(Error::DuplicateWord(t.word));
            }
            seen[i] = true;
            s.coeffs[i] = C64::new(t.re, t.im);
        }
        Ok(s)
    }
}

impl TruncatedSeries {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
